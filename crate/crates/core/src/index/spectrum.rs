//! Spectrum of `J₀ d/dt + S` on period-1 loops in ℝ², for constant
//! symmetric `S`.
//!
//! For constant `S` the Fourier modes `cos(2πkt)u + sin(2πkt)w` are
//! invariant, so truncating at `|k| ≤ n_modes` is exact on the retained
//! modes: mode 0 contributes the eigenpairs of `S`, mode `k ≥ 1` those of
//! the 4×4 block `[[S, 2πkJ₀], [−2πkJ₀, S]]` acting on `(u, w)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

pub use nalgebra::Matrix2;
use nalgebra::{Matrix4, SymmetricEigen, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};

/// `[[0, −1], [1, 0]]`.
pub fn j0() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

pub const MIN_NORM: f64 = 1e-10;
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenpair {
    pub eigenvalue: f64,
    pub winding: i64,
    pub mode: usize,
}

fn block(s: &Matrix2<f64>, k: usize) -> Matrix4<f64> {
    let r = j0() * (2.0 * PI * k as f64);
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(s);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(s);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&r);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-r));
    m
}

fn samples_per_mode(k: usize) -> usize {
    64 * k.max(1)
}

/// Winding of `t ↦ cos(2πkt)u + sin(2πkt)w` by argument tracking.
pub fn winding(u: Vector2<f64>, w: Vector2<f64>, k: usize) -> Result<i64> {
    let n = samples_per_mode(k);
    let scale = u.norm().max(w.norm());
    let at = |i: usize| {
        let t = 2.0 * PI * k as f64 * i as f64 / n as f64;
        u * t.cos() + w * t.sin()
    };
    let mut total = 0.0;
    let mut prev = at(0);
    for i in 1..=n {
        let cur = at(i % n);
        if cur.norm() < MIN_NORM * scale.max(1.0) {
            return Err(Error::Resolution(format!("eigenfunction of mode {k} nearly vanishes")));
        }
        let d = (prev.x * cur.y - prev.y * cur.x).atan2(prev.dot(&cur));
        if d.abs() > PI / 2.0 {
            return Err(Error::Resolution(format!("phase step {d:.3} too large in mode {k}")));
        }
        total += d;
        prev = cur;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Eigenpairs sorted by eigenvalue.
pub fn asymptotic_spectrum(s: &Matrix2<f64>, n_modes: usize) -> Result<Vec<Eigenpair>> {
    if (s[(0, 1)] - s[(1, 0)]).abs() > 1e-12 {
        return Err(Error::InvalidArgument("S must be symmetric".into()));
    }
    if n_modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let mut out = Vec::with_capacity(4 * n_modes + 2);
    let e0 = SymmetricEigen::new(*s);
    for i in 0..2 {
        let v = e0.eigenvectors.column(i).into_owned();
        out.push(Eigenpair {
            eigenvalue: e0.eigenvalues[i],
            winding: winding(v, Vector2::zeros(), 0)?,
            mode: 0,
        });
    }
    for k in 1..=n_modes {
        let e = SymmetricEigen::new(block(s, k));
        for i in 0..4 {
            let v = e.eigenvectors.column(i);
            let u = Vector2::new(v[0], v[1]);
            let w = Vector2::new(v[2], v[3]);
            out.push(Eigenpair {
                eigenvalue: e.eigenvalues[i],
                winding: winding(u, w, k)?,
                mode: k,
            });
        }
    }
    out.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue).then(b.winding.cmp(&a.winding)));
    Ok(out)
}

pub fn spectrum_csv(pairs: &[Eigenpair]) -> String {
    let mut s = String::from("eigenvalue,winding\n");
    for p in pairs {
        s.push_str(&format!("{:.12},{}\n", p.eigenvalue, p.winding));
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumChecks {
    /// Windings non-increasing in eigenvalue, and constant on each
    /// degeneracy group.
    pub monotone: bool,
    /// Every winding `|w| ≤ n_modes` carries exactly two eigenvalues.
    pub two_per_winding: bool,
    pub max_winding_positive: Option<i64>,
    pub min_winding_negative: Option<i64>,
    /// `max wind(λ > 0) ≤ ⌊CZ/2⌋` and `min wind(λ < 0) ≥ ⌈CZ/2⌉`.
    pub extremal: bool,
    pub counts: BTreeMap<i64, usize>,
}

impl SpectrumChecks {
    pub fn pass(&self) -> bool {
        self.monotone && self.two_per_winding && self.extremal
    }
}

pub fn check_spectrum(pairs: &[Eigenpair], n_modes: usize, cz: i64) -> SpectrumChecks {
    let mut groups: Vec<Vec<&Eigenpair>> = Vec::new();
    for p in pairs {
        match groups.last_mut() {
            Some(g) if p.eigenvalue - g.last().unwrap().eigenvalue <= DEGENERACY_TOL => g.push(p),
            _ => groups.push(vec![p]),
        }
    }
    let uniform = groups.iter().all(|g| g.iter().all(|p| p.winding == g[0].winding));
    let ordered = groups.windows(2).all(|w| w[0][0].winding >= w[1][0].winding);

    let mut counts = BTreeMap::new();
    for p in pairs {
        *counts.entry(p.winding).or_insert(0) += 1;
    }
    let k = n_modes as i64;
    let two_per_winding = (-k..=k).all(|w| counts.get(&w) == Some(&2)) && counts.keys().all(|w| w.abs() <= k);

    let max_winding_positive = pairs.iter().filter(|p| p.eigenvalue > 0.0).map(|p| p.winding).max();
    let min_winding_negative = pairs.iter().filter(|p| p.eigenvalue < 0.0).map(|p| p.winding).min();
    let extremal = max_winding_positive.is_none_or(|w| w <= cz.div_euclid(2))
        && min_winding_negative.is_none_or(|w| w >= -((-cz).div_euclid(2)));

    SpectrumChecks {
        monotone: uniform && ordered,
        two_per_winding,
        max_winding_positive,
        min_winding_negative,
        extremal,
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_operator() {
        let pairs = asymptotic_spectrum(&Matrix2::zeros(), 8).unwrap();
        for p in &pairs {
            let expected = -2.0 * PI * p.winding as f64;
            assert!((p.eigenvalue - expected).abs() < 1e-9, "{p:?}");
        }
        let c = check_spectrum(&pairs, 8, 0);
        assert!(c.monotone && c.two_per_winding);
    }

    #[test]
    fn handle_operator() {
        let s = Matrix2::new(2.0, 0.0, 0.0, -1.0);
        let pairs = asymptotic_spectrum(&s, 64).unwrap();
        let zero: Vec<f64> = pairs.iter().filter(|p| p.winding == 0).map(|p| p.eigenvalue).collect();
        assert_eq!(zero.len(), 2);
        assert!((zero[0] + 1.0).abs() < 1e-12 && (zero[1] - 2.0).abs() < 1e-12);
        let c = check_spectrum(&pairs, 64, 0);
        assert!(c.pass(), "{c:?}");
        assert_eq!(c.max_winding_positive, Some(0));
        assert_eq!(c.min_winding_negative, Some(0));
    }

    #[test]
    fn extremality_detects_wrong_cz() {
        let s = Matrix2::new(2.0, 0.0, 0.0, -1.0);
        let pairs = asymptotic_spectrum(&s, 8).unwrap();
        assert!(!check_spectrum(&pairs, 8, -2).extremal);
        assert!(!check_spectrum(&pairs, 8, 2).extremal);
    }

    #[test]
    fn asymmetric_rejected() {
        assert!(asymptotic_spectrum(&Matrix2::new(0.0, 1.0, 0.0, 0.0), 4).is_err());
    }

    #[test]
    fn vanishing_loop_is_a_resolution_error() {
        assert!(matches!(
            winding(Vector2::zeros(), Vector2::zeros(), 1),
            Err(Error::Resolution(_))
        ));
    }
}
