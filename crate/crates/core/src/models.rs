//! Concrete chain models: irrational ellipsoids, S¹×S², the unit complex and
//! seeded random filtered complexes.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ech_core::{action_ties, enumerate_orbit_sets_below, ClassLabel, Orbit, OrbitSet};
use crate::error::{Error, Result};
use crate::homalg::{GradedComplex, Generator, SparseF2Matrix, EMPTY_ID};
use crate::rational::{format, Rational};

/// The ellipsoid `E(a, b)` truncated below action `L`.
#[derive(Debug, Clone)]
pub struct EllipsoidModel {
    pub a: Rational,
    pub b: Rational,
    pub l: Rational,
    pub orbits: [Orbit; 2],
    /// Orbit sets in action order; set `r` is generator `r`.
    pub sets: Vec<OrbitSet>,
    pub complex: GradedComplex,
}

impl EllipsoidModel {
    /// `(m, n)` multiplicities of each generator.
    pub fn lattice(&self) -> Vec<(u32, u32)> {
        self.sets
            .iter()
            .map(|s| (s.multiplicity(&self.orbits[0].id), s.multiplicity(&self.orbits[1].id)))
            .collect()
    }

    /// Lattice points as CSV: `m,n,action,grading`.
    pub fn lattice_csv(&self) -> String {
        let mut out = String::from("m,n,action,grading\n");
        for ((m, n), g) in self.lattice().into_iter().zip(self.complex.generators()) {
            let _ = writeln!(out, "{m},{n},{},{}", format(&g.action), g.grading);
        }
        out
    }

    /// Sorted lattice values `ma + nb` below `L`.
    pub fn actions(&self) -> Vec<Rational> {
        self.complex.generators().iter().map(|g| g.action).collect()
    }
}

/// Builds `E(a, b)` below `L`: generators are the orbit sets `γ₁^m γ₂^n`
/// with `ma + nb < L`, ranked by action, the rank-`r` one in grading `2r`;
/// `∂ = 0` and `U` lowers rank by one.
pub fn ellipsoid(a: Rational, b: Rational, l: Rational) -> Result<EllipsoidModel> {
    let zero = Rational::from_integer(0);
    if a <= zero || b <= zero {
        return Err(Error::InvalidArgument("ellipsoid radii must be positive".into()));
    }
    let orbits = [Orbit::elliptic("γ1", a / b, a)?, Orbit::elliptic("γ2", b / a, b)?];
    let sets = enumerate_orbit_sets_below(&orbits, l, None)?;
    if let Some((x, y, v)) = action_ties(&sets).into_iter().next() {
        return Err(Error::Degenerate(format!(
            "lattice values tie: {x} and {y} both have action {}; use an approximation of a/b with a larger denominator",
            format(&v)
        )));
    }
    let n = sets.len();
    let generators: Vec<Generator> = sets
        .iter()
        .enumerate()
        .map(|(r, s)| Generator::new(s.id(), 2 * r as i64, s.action()))
        .collect();
    let u = SparseF2Matrix::from_entries(n, n, (1..n).map(|r| (r - 1, r)))?;
    let complex = GradedComplex::new(generators, SparseF2Matrix::zeros(n, n), Some(u))?
        .with_complete_through(Some(2 * n as i64 - 1));
    Ok(EllipsoidModel {
        a,
        b,
        l,
        orbits,
        sets,
        complex,
    })
}

/// `E(a, b)` with exactly `count` generators, truncated halfway between the
/// `count`-th and `count+1`-th lattice values.
pub fn ellipsoid_with_count(a: Rational, b: Rational, count: usize) -> Result<EllipsoidModel> {
    if count == 0 {
        return Err(Error::InvalidArgument("an ellipsoid model needs at least one generator".into()));
    }
    let mut l = a.min(b) * Rational::from_integer(2);
    loop {
        let model = ellipsoid(a, b, l)?;
        if model.sets.len() > count {
            let values = model.actions();
            let cut = (values[count - 1] + values[count]) / Rational::from_integer(2);
            return ellipsoid(a, b, cut);
        }
        l *= Rational::from_integer(2);
    }
}

/// The S¹×S² model of depth `N`.
#[derive(Debug, Clone)]
pub struct S1xS2Model {
    pub depth: usize,
    pub eps0: Rational,
    pub complex: GradedComplex,
}

/// One generator per grading `0..2N`, with the synthetic action
/// `(g + 1)·ε₀`; `∂ = 0`, `U` lowers grading by two and kills gradings 0, 1.
pub fn s1_x_s2(depth: usize) -> Result<S1xS2Model> {
    s1_x_s2_with(depth, Rational::new(1, 10))
}

pub fn s1_x_s2_with(depth: usize, eps0: Rational) -> Result<S1xS2Model> {
    if depth == 0 {
        return Err(Error::InvalidArgument("S¹×S² depth must be at least 1".into()));
    }
    if eps0 <= Rational::from_integer(0) {
        return Err(Error::InvalidArgument("ε₀ must be positive".into()));
    }
    let n = 2 * depth;
    let generators = (0..n)
        .map(|g| Generator::new(format!("s{g}"), g as i64, eps0 * Rational::from_integer(g as i128 + 1)))
        .collect();
    let u = SparseF2Matrix::from_entries(n, n, (2..n).map(|g| (g - 2, g)))?;
    let complex = GradedComplex::new(generators, SparseF2Matrix::zeros(n, n), Some(u))?
        .with_complete_through(Some(n as i64 - 1));
    Ok(S1xS2Model { depth, eps0, complex })
}

/// The one-generator complex `{∅}` with `U = 0`.
pub fn unit() -> GradedComplex {
    GradedComplex::new(
        vec![Generator::new(EMPTY_ID, 0, Rational::from_integer(0))],
        SparseF2Matrix::zeros(1, 1),
        Some(SparseF2Matrix::zeros(1, 1)),
    )
    .expect("unit complex is well formed")
}

/// Every generator relabelled with `class`.
pub fn relabel(c: &GradedComplex, class: &ClassLabel) -> GradedComplex {
    let generators = c
        .generators()
        .iter()
        .map(|g| g.clone().with_class(class.clone()))
        .collect();
    GradedComplex::new(generators, c.differential().clone(), c.umap().cloned())
        .expect("same shape")
        .with_complete_through(c.complete_through())
}

/// Every generator id prefixed, to keep direct sums disjoint.
pub fn prefixed(c: &GradedComplex, prefix: &str) -> GradedComplex {
    let generators = c
        .generators()
        .iter()
        .map(|g| Generator {
            id: format!("{prefix}{}", g.id),
            ..g.clone()
        })
        .collect();
    GradedComplex::new(generators, c.differential().clone(), c.umap().cloned())
        .expect("same shape")
        .with_complete_through(c.complete_through())
}

/// A random valid filtered complex with a U-map, reproducible from `seed`.
///
/// It starts from a normal form (acyclic pairs `x → y` plus cycles) with a
/// U-map chosen to commute with `∂`, then conjugates both by a random
/// filtered change of basis in each grading. `density ∈ [0, 1]` controls the
/// share of generators in acyclic pairs and the fill of U and the basis
/// change; `density = 0` gives `∂ = 0`.
pub fn random_model(seed: u64, n_generators: usize, density: f64) -> Result<GradedComplex> {
    if n_generators == 0 {
        return Err(Error::InvalidArgument("need at least one generator".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_generators;

    // Normal form. pair_of[i] = Some(j) means ∂(i) = j.
    let max_pairs = n / 2;
    let pairs = (0..max_pairs).filter(|_| rng.gen_bool(density)).count();
    let mut gradings = Vec::with_capacity(n);
    let mut pair_of: Vec<Option<usize>> = vec![None; n];
    for p in 0..pairs {
        let g = rng.gen_range(0..4i64);
        gradings.push(g + 1);
        gradings.push(g);
        pair_of[2 * p] = Some(2 * p + 1);
    }
    for _ in 2 * pairs..n {
        gradings.push(rng.gen_range(0..5i64));
    }
    // Distinct actions k/10, larger on the source of each pair.
    let mut ks: Vec<i128> = (1..=(10 * n as i128)).collect();
    ks.shuffle(&mut rng);
    let mut actions: Vec<Rational> = ks[..n].iter().map(|&k| Rational::new(k, 10)).collect();
    for p in 0..pairs {
        if actions[2 * p] < actions[2 * p + 1] {
            actions.swap(2 * p, 2 * p + 1);
        }
    }
    let is_source = |i: usize| pair_of[i].is_some();
    let is_target = |i: usize| i < 2 * pairs && i % 2 == 1;

    // U in normal form: cycles go to cycles, sources are free, targets are
    // forced to U(y) = ∂U(x).
    let mut ucols: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in (0..n).filter(|&i| !is_target(i)) {
        let mut col = Vec::new();
        for j in 0..n {
            if gradings[j] != gradings[i] - 2 || actions[j] >= actions[i] {
                continue;
            }
            let ok = if is_source(i) {
                // x_j may appear only if y_j stays below y_i.
                match pair_of[j] {
                    Some(yj) => actions[yj] < actions[pair_of[i].expect("source")],
                    None => true,
                }
            } else {
                !is_source(j)
            };
            if ok && rng.gen_bool(density.max(0.3)) {
                col.push(j);
            }
        }
        ucols[i] = col;
    }
    for p in 0..pairs {
        let (x, y) = (2 * p, 2 * p + 1);
        ucols[y] = ucols[x].iter().filter_map(|&j| pair_of[j]).collect();
    }
    let dcols: Vec<Vec<usize>> = pair_of.iter().map(|p| p.iter().copied().collect()).collect();
    let d = SparseF2Matrix::from_columns(n, dcols);
    let u = SparseF2Matrix::from_columns(n, ucols);

    // Filtered change of basis: e_j ↦ e_j + Σ e_i over same-grading i of
    // smaller action.
    let mut acols: Vec<Vec<usize>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut col = vec![j];
        for i in 0..n {
            if i != j && gradings[i] == gradings[j] && actions[i] < actions[j] && rng.gen_bool(density / 2.0) {
                col.push(i);
            }
        }
        acols.push(col);
    }
    let a = SparseF2Matrix::from_columns(n, acols);
    let a_inv = a.inverse().expect("unitriangular in action order");
    let d = a.mul(&d)?.mul(&a_inv)?;
    let u = a.mul(&u)?.mul(&a_inv)?;

    // Shuffle the listing order so nothing downstream relies on it.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let generators = (0..n)
        .map(|i| Generator::new(format!("r{i}"), gradings[i], actions[i]))
        .collect();
    let c = GradedComplex::new(generators, d, Some(u))?;
    c.permuted(&perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::homology;
    use crate::rational::{int, rat};

    fn b() -> Rational {
        rat(141421, 100000)
    }

    #[test]
    fn ellipsoid_at_three() {
        let m = ellipsoid(int(1), b(), int(3)).unwrap();
        let g: Vec<i64> = m.complex.generators().iter().map(|g| g.grading).collect();
        assert_eq!(g, [0, 2, 4, 6, 8, 10]);
        assert_eq!(m.lattice(), [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        assert!(m.complex.validate().is_empty());
        assert!(m.lattice_csv().starts_with("m,n,action,grading\n0,0,0/1,0\n1,0,1/1,2\n"));
    }

    #[test]
    fn ellipsoid_below_smallest_radius() {
        let m = ellipsoid(int(1), b(), int(1)).unwrap();
        assert_eq!(m.complex.len(), 1);
        assert_eq!(homology(&m.complex).unwrap().dims().into_iter().collect::<Vec<_>>(), [(0, 1)]);
    }

    #[test]
    fn ellipsoid_ties_are_reported() {
        assert!(ellipsoid(int(1), int(2), int(5)).is_err());
        assert!(ellipsoid(int(1), rat(3, 2), int(4)).is_err());
    }

    #[test]
    fn ellipsoid_with_exact_count() {
        for count in [1, 2, 7, 50] {
            assert_eq!(ellipsoid_with_count(int(1), b(), count).unwrap().sets.len(), count);
        }
    }

    #[test]
    fn s1xs2_shapes() {
        let m = s1_x_s2(1).unwrap();
        assert_eq!(m.complex.len(), 2);
        assert!(m.complex.umap().unwrap().is_zero());
        let m = s1_x_s2(3).unwrap();
        let h = homology(&m.complex).unwrap();
        assert_eq!(h.dims().values().copied().collect::<Vec<_>>(), [1; 6]);
        assert_eq!(h.induced_u(2).unwrap().rank(), 1);
        assert!(m.complex.validate().is_empty());
    }

    #[test]
    fn random_models_are_valid_and_reproducible() {
        for seed in 0..200 {
            let c = random_model(seed, 12, 0.6).unwrap();
            assert!(c.validate().is_empty(), "seed {seed}: {}", c.validate());
            assert_eq!(c, random_model(seed, 12, 0.6).unwrap());
        }
        let c = random_model(3, 10, 0.0).unwrap();
        assert!(c.differential().is_zero());
    }
}
