use std::collections::BTreeMap;

use serde::Serialize;

use crate::ech_core::{Orbit, OrbitKind, OrbitSet};
use crate::error::{Error, Result};
use crate::rational::{format, is_integer, Rational};

/// `2⌊θ⌋ + 1`.
pub fn cz_elliptic(theta: Rational) -> Result<i64> {
    if is_integer(&theta) {
        return Err(Error::Degenerate(format!("rotation {} is an integer", format(&theta))));
    }
    Ok(2 * theta.floor().to_integer() as i64 + 1)
}

pub fn cz_hyperbolic(k: i64) -> i64 {
    k
}

/// Homotopy classes of trivializations, one integer per orbit id, measured
/// against the reference trivialization in which rotations and windings
/// are given. Missing orbits count as 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trivialization {
    pub shifts: BTreeMap<String, i64>,
}

impl Trivialization {
    pub fn reference() -> Self {
        Self::default()
    }

    pub fn with(mut self, orbit: &str, tau: i64) -> Self {
        self.shifts.insert(orbit.to_string(), tau);
        self
    }

    pub fn get(&self, orbit: &str) -> i64 {
        self.shifts.get(orbit).copied().unwrap_or(0)
    }
}

/// `CZ_τ(γ^k)`: iterate rotation `kθ` (winding `k·w` if hyperbolic) in the
/// reference trivialization, less `2kτ_γ`.
pub fn cz_iterate(orbit: &Orbit, k: u32, triv: &Trivialization) -> Result<i64> {
    let k_i = k as i64;
    let reference = match orbit.kind {
        OrbitKind::Elliptic { rotation } => cz_elliptic(rotation * Rational::from_integer(k as i128))
            .map_err(|_| Error::Degenerate(format!("iterate {k} of {} has integer rotation", orbit.id)))?,
        OrbitKind::PositiveHyperbolic { winding } | OrbitKind::NegativeHyperbolic { winding } => {
            cz_hyperbolic(k_i * winding)
        }
    };
    Ok(reference - 2 * k_i * triv.get(&orbit.id))
}

/// `Σᵢ Σ_{k=1}^{mᵢ} CZ_τ(αᵢ^k)` for α minus the same for β.
pub fn cz_total(alpha: &OrbitSet, beta: &OrbitSet, triv: &Trivialization) -> Result<i64> {
    let side = |s: &OrbitSet| -> Result<i64> {
        s.pairs()
            .iter()
            .map(|(o, m)| (1..=*m).map(|k| cz_iterate(o, k, triv)).sum::<Result<i64>>())
            .sum()
    };
    Ok(side(alpha)? - side(beta)?)
}

/// One asymptotic end: the orbit and the covering multiplicity of the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct End {
    pub orbit: Orbit,
    pub multiplicity: u32,
}

/// Topological bookkeeping of a curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveData {
    pub euler_char: i64,
    pub positive_ends: Vec<End>,
    pub negative_ends: Vec<End>,
    pub c_tau: i64,
    pub q_tau: i64,
    pub writhe: i64,
    pub delta: i64,
}

impl CurveData {
    pub fn validate(&self) -> Result<()> {
        if self.delta < 0 {
            return Err(Error::InvalidArgument(format!("δ = {} is negative", self.delta)));
        }
        if self.positive_ends.iter().chain(&self.negative_ends).any(|e| e.multiplicity == 0) {
            return Err(Error::InvalidArgument("end multiplicity must be at least 1".into()));
        }
        Ok(())
    }

    /// The disjoint union; `Q` is taken additively, which assumes the two
    /// pieces do not interact.
    pub fn disjoint_union(&self, other: &CurveData) -> CurveData {
        CurveData {
            euler_char: self.euler_char + other.euler_char,
            positive_ends: self.positive_ends.iter().chain(&other.positive_ends).cloned().collect(),
            negative_ends: self.negative_ends.iter().chain(&other.negative_ends).cloned().collect(),
            c_tau: self.c_tau + other.c_tau,
            q_tau: self.q_tau + other.q_tau,
            writhe: self.writhe + other.writhe,
            delta: self.delta + other.delta,
        }
    }

    /// Ends aggregated into orbit sets `(α, β)`.
    pub fn orbit_sets(&self) -> Result<(OrbitSet, OrbitSet)> {
        let collect = |ends: &[End]| -> Result<OrbitSet> {
            let mut pairs: Vec<(Orbit, u32)> = Vec::new();
            for e in ends {
                match pairs.iter_mut().find(|(o, _)| o.id == e.orbit.id) {
                    Some((_, m)) => *m += e.multiplicity,
                    None => pairs.push((e.orbit.clone(), e.multiplicity)),
                }
            }
            OrbitSet::new(pairs)
        };
        Ok((collect(&self.positive_ends)?, collect(&self.negative_ends)?))
    }
}

/// `ind = −χ + 2c_τ + Σ CZ_τ(positive ends) − Σ CZ_τ(negative ends)`.
pub fn fredholm_index(c: &CurveData, triv: &Trivialization) -> Result<i64> {
    c.validate()?;
    let ends = |ends: &[End]| -> Result<i64> { ends.iter().map(|e| cz_iterate(&e.orbit, e.multiplicity, triv)).sum() };
    Ok(-c.euler_char + 2 * c.c_tau + ends(&c.positive_ends)? - ends(&c.negative_ends)?)
}

/// `I = c_τ + Q_τ + CZ^I_τ`.
pub fn ech_index(c_tau: i64, q_tau: i64, cz_i: i64) -> i64 {
    c_tau + q_tau + cz_i
}

/// ECH index of the curve's relative class, from its own `c_τ`, `Q_τ` and
/// aggregated ends.
pub fn ech_index_of(c: &CurveData, triv: &Trivialization) -> Result<i64> {
    let (alpha, beta) = c.orbit_sets()?;
    Ok(ech_index(c.c_tau, c.q_tau, cz_total(&alpha, &beta, triv)?))
}

/// `c_τ' = c_τ − [Σᵢ mᵢ(τᵢ⁺ − τᵢ⁺') − Σⱼ nⱼ(τⱼ⁻ − τⱼ⁻')]`.
pub fn retrivialize_c(c_tau: i64, alpha: &OrbitSet, beta: &OrbitSet, old: &Trivialization, new: &Trivialization) -> i64 {
    let side = |s: &OrbitSet| -> i64 {
        s.pairs()
            .iter()
            .map(|(o, m)| *m as i64 * (old.get(&o.id) - new.get(&o.id)))
            .sum()
    };
    c_tau - (side(alpha) - side(beta))
}

/// An end pairing `(orbit id, m, m')` for `Q_τ(Z, Z')`.
pub type PairedEnd<'a> = (&'a str, i64, i64);

/// `Q_τ' = Q_τ − [Σᵢ mᵢmᵢ'(τᵢ⁺ − τᵢ⁺') − Σⱼ nⱼnⱼ'(τⱼ⁻ − τⱼ⁻')]`.
pub fn retrivialize_q(
    q_tau: i64,
    positive: &[PairedEnd<'_>],
    negative: &[PairedEnd<'_>],
    old: &Trivialization,
    new: &Trivialization,
) -> i64 {
    let side = |ends: &[PairedEnd<'_>]| -> i64 {
        ends.iter()
            .map(|(id, m, mp)| m * mp * (old.get(id) - new.get(id)))
            .sum()
    };
    q_tau - (side(positive) - side(negative))
}

/// Pairings of an orbit set with itself.
pub fn self_pairing(s: &OrbitSet) -> Vec<PairedEnd<'_>> {
    s.pairs().iter().map(|(o, m)| (o.id.as_str(), *m as i64, *m as i64)).collect()
}

/// `Q_τ` after changing the relative class by `Z₁ − Z₂`, given its
/// intersection number with the class.
pub fn reclass_q(q_tau: i64, z1_minus_z2_dot_class: i64) -> i64 {
    q_tau + z1_minus_z2_dot_class
}

/// Residual `c_τ − χ − Q_τ − w_τ + 2δ` of the relative adjunction formula.
pub fn check_adjunction(c: &CurveData) -> i64 {
    c.c_tau - c.euler_char - c.q_tau - c.writhe + 2 * c.delta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexInequality {
    pub ind: i64,
    pub ech: i64,
    /// `ind ≤ I`.
    pub ok: bool,
    /// `ind = I`; informational, embeddedness is an input assertion.
    pub equality: bool,
}

pub fn check_index_inequality(c: &CurveData, triv: &Trivialization) -> Result<IndexInequality> {
    let ind = fredholm_index(c, triv)?;
    let ech = ech_index_of(c, triv)?;
    Ok(IndexInequality {
        ind,
        ech,
        ok: ind <= ech,
        equality: ind == ech,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkingViolation {
    pub i: usize,
    pub j: usize,
    pub linking: i64,
    pub bound: i64,
}

/// Flags every pair `i < j` with `l(ζᵢ, ζⱼ) > max(ρᵢqⱼ, ρⱼqᵢ)`.
#[allow(clippy::needless_range_loop)]
pub fn linking_bound_check(rho: &[i64], q: &[i64], l: &[Vec<i64>]) -> Result<Vec<LinkingViolation>> {
    let n = rho.len();
    if q.len() != n || l.len() != n || l.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("ρ, q and the linking matrix must have matching sizes".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if l[i][j] != l[j][i] {
                return Err(Error::InvalidArgument(format!("linking matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let bound = (rho[i] * q[j]).max(rho[j] * q[i]);
            if l[i][j] > bound {
                out.push(LinkingViolation {
                    i,
                    j,
                    linking: l[i][j],
                    bound,
                });
            }
        }
    }
    Ok(out)
}

/// Named inputs reproducing known index computations.
pub mod presets {
    use super::*;
    use crate::ech_core::ClassLabel;

    /// The special hyperbolic orbit of the handle: positive hyperbolic,
    /// winding 0 in the trivialization `τ₀` of the handle's second factor.
    pub fn h_orbit() -> Orbit {
        Orbit::new(
            "h",
            OrbitKind::PositiveHyperbolic { winding: 0 },
            Rational::new(1, 1000),
            ClassLabel::zero(),
        )
        .expect("valid orbit")
    }

    /// A plane with one positive end at `h`: `χ = 1`, `c_τ₀ = 1`, `Q = 0`,
    /// embedded. Both planes of the handle share these numbers.
    pub fn plane() -> CurveData {
        CurveData {
            euler_char: 1,
            positive_ends: vec![End {
                orbit: h_orbit(),
                multiplicity: 1,
            }],
            negative_ends: Vec::new(),
            c_tau: 1,
            q_tau: 0,
            writhe: 0,
            delta: 0,
        }
    }

    pub fn trivial_cylinder() -> CurveData {
        let end = End {
            orbit: h_orbit(),
            multiplicity: 1,
        };
        CurveData {
            euler_char: 0,
            positive_ends: vec![end.clone()],
            negative_ends: vec![end],
            c_tau: 0,
            q_tau: 0,
            writhe: 0,
            delta: 0,
        }
    }

    /// The plane with one double point, `Q` fixed by adjunction.
    pub fn singular_plane() -> CurveData {
        let mut c = plane();
        c.delta = 1;
        c.q_tau = c.c_tau - c.euler_char - c.writhe + 2 * c.delta;
        c
    }

    pub const NAMES: [&str; 4] = ["PS", "PN", "cylinder", "singular"];

    pub fn by_name(name: &str) -> Option<CurveData> {
        match name.to_ascii_lowercase().as_str() {
            "ps" | "pn" => Some(plane()),
            "cylinder" => Some(trivial_cylinder()),
            "singular" => Some(singular_plane()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn cz_values() {
        assert_eq!(cz_elliptic(rat(3, 10)).unwrap(), 1);
        assert_eq!(cz_elliptic(rat(5, 2)).unwrap(), 5);
        assert_eq!(cz_elliptic(rat(-3, 10)).unwrap(), -1);
        assert!(cz_elliptic(int(2)).is_err());
        assert_eq!(cz_hyperbolic(0), 0);
        assert_eq!(cz_hyperbolic(-2), -2);
    }

    #[test]
    fn cz_total_cases() {
        let e = Orbit::elliptic("e", rat(3, 10), int(1)).unwrap();
        let a = OrbitSet::new(vec![(e, 2)]).unwrap();
        let triv = Trivialization::reference();
        assert_eq!(cz_total(&a, &OrbitSet::empty(), &triv).unwrap(), 2);
        assert_eq!(cz_total(&a, &a, &triv).unwrap(), 0);
        let h = OrbitSet::new(vec![(presets::h_orbit(), 1)]).unwrap();
        assert_eq!(cz_total(&h, &OrbitSet::empty(), &triv).unwrap(), 0);
        let e = Orbit::elliptic("e", rat(1, 2), int(1)).unwrap();
        let a = OrbitSet::new(vec![(e, 2)]).unwrap();
        assert!(cz_total(&a, &OrbitSet::empty(), &triv).is_err());
    }

    #[test]
    fn planes_have_index_one() {
        let triv = Trivialization::reference();
        let r = check_index_inequality(&presets::plane(), &triv).unwrap();
        assert_eq!((r.ind, r.ech, r.ok, r.equality), (1, 1, true, true));
        let r = check_index_inequality(&presets::trivial_cylinder(), &triv).unwrap();
        assert_eq!((r.ind, r.ech), (0, 0));
        let r = check_index_inequality(&presets::singular_plane(), &triv).unwrap();
        assert!(r.ok && !r.equality && r.ech > r.ind);
    }

    #[test]
    fn retrivialization_examples() {
        let e = Orbit::elliptic("e", rat(3, 10), int(1)).unwrap();
        let two = OrbitSet::new(vec![(e.clone(), 2)]).unwrap();
        let three = OrbitSet::new(vec![(e, 3)]).unwrap();
        let old = Trivialization::reference();
        let new = Trivialization::reference().with("e", 1);
        assert_eq!(retrivialize_c(5, &two, &OrbitSet::empty(), &old, &old), 5);
        assert_eq!(retrivialize_c(5, &two, &OrbitSet::empty(), &old, &new), 7);
        assert_eq!(retrivialize_c(5, &OrbitSet::empty(), &three, &old, &new), 2);
        assert_eq!(retrivialize_q(4, &[("e", 1, 1)], &[], &old, &new), 5);
        assert_eq!(retrivialize_q(4, &[("e", 1, 1)], &[], &old, &old), 4);
        assert_eq!(reclass_q(4, 2), 6);
    }

    #[test]
    fn adjunction_residuals() {
        let ps = presets::plane();
        assert_eq!(check_adjunction(&ps.disjoint_union(&ps)), 0);
        let mut c = presets::plane();
        c.writhe += 1;
        assert_eq!(check_adjunction(&c), -1);
    }

    #[test]
    fn linking_bounds() {
        assert!(linking_bound_check(&[0, 0], &[3, 5], &[vec![0, -1], vec![-1, 0]]).unwrap().is_empty());
        assert!(linking_bound_check(&[1, 1], &[2, 3], &[vec![0, 3], vec![3, 0]]).unwrap().is_empty());
        let v = linking_bound_check(&[1, 1], &[2, 3], &[vec![0, 4], vec![4, 0]]).unwrap();
        assert_eq!(v, vec![LinkingViolation { i: 0, j: 1, linking: 4, bound: 3 }]);
        assert!(linking_bound_check(&[0, 0], &[1, 1], &[vec![0, 1], vec![2, 0]]).is_err());
    }
}
