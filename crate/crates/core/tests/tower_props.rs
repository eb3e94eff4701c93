use proptest::prelude::*;

use ech_calc::ech_core::{action_gap_thresholds, enumerate_orbit_sets, truncate, FilteredTower, Stabilization};
use ech_calc::homalg::matrix::SparseF2Matrix;
use ech_calc::models;
use ech_calc::rational::{int, rat, Rational};
use ech_calc::spectral::{base_tower, spectrum_table};

const B: (i128, i128) = (141421, 100000);

/// Oracle: the sorted values `m + n·b` below `limit`, by brute force.
fn lattice_actions(b: Rational, limit: Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    for m in 0..200i128 {
        for n in 0..200i128 {
            let a = int(m) + b * int(n);
            if a < limit {
                out.push(a);
            }
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncation_closure(seed in 0u64..10_000, n in 1usize..40, num in 0i128..60) {
        let c = models::random_model(seed, n, 0.4).unwrap();
        let l = Rational::new(2 * num + 1, 20);
        let t = truncate(&c, l).unwrap();
        for (r, s) in t.differential().entries() {
            prop_assert!(t.generator(r).action < l && t.generator(s).action < l);
        }
        let kept = c.generators().iter().filter(|g| g.action < l).count();
        prop_assert_eq!(t.len(), kept);
        // every boundary of a kept generator is itself kept
        for j in 0..c.len() {
            if c.generator(j).action < l {
                for &i in c.differential().col(j) {
                    prop_assert!(c.generator(i).action < l);
                }
            }
        }
    }

    #[test]
    fn inclusions_compose(seed in 0u64..10_000, n in 3usize..30) {
        let c = models::random_model(seed, n, 0.4).unwrap();
        let th = action_gap_thresholds(&c);
        prop_assume!(th.len() >= 3);
        let (a, b, d) = (0, th.len() / 2, th.len() - 1);
        let tower = FilteredTower::new(c, vec![th[a], th[b], th[d]]).unwrap();
        for g in tower.base().gradings() {
            let i01 = tower.induced_inclusion(0, 1, g).unwrap();
            let i12 = tower.induced_inclusion(1, 2, g).unwrap();
            let i02 = tower.induced_inclusion(0, 2, g).unwrap();
            let composed = i12.mul(&i01).unwrap();
            prop_assert_eq!(composed.rank(), i02.rank());
            prop_assert_eq!(&composed, &i02);
        }
    }

    #[test]
    fn spectra_are_monotone(seed in 0u64..1000, count in 2usize..30) {
        let b = Rational::new(B.0, B.1) + Rational::new(seed as i128, 1_000_000_007);
        let m = models::ellipsoid_with_count(int(1), b, count).unwrap();
        let table = spectrum_table(&base_tower(m.complex.clone()).unwrap(), count - 1).unwrap();
        let v = table.values();
        prop_assert_eq!(v.len(), count);
        prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn ellipsoid_spectrum_is_lattice() {
    let b = rat(B.0, B.1);
    let m = models::ellipsoid(int(1), b, int(12)).unwrap();
    let expected = lattice_actions(b, int(12));
    assert_eq!(m.actions(), expected);
    let n = expected.len();
    let table = spectrum_table(&base_tower(m.complex.clone()).unwrap(), n - 1).unwrap();
    assert_eq!(table.values(), expected);
}

#[test]
fn truncations_are_enumerations() {
    let m = models::ellipsoid(int(1), rat(B.0, B.1), int(12)).unwrap();
    for l in [rat(1, 2), rat(31, 10), rat(59, 7), rat(119, 10)] {
        let t = truncate(&m.complex, l).unwrap();
        let mut got: Vec<String> = t.generators().iter().map(|g| g.id.clone()).collect();
        let mut want: Vec<String> = enumerate_orbit_sets(&m.orbits, l, None).unwrap().iter().map(|s| s.id()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want, "L = {l}");
        for (r, s) in t.differential().entries() {
            assert!(r < t.len() && s < t.len());
        }
    }
}

#[test]
fn ellipsoid_stabilization_matches_spectrum() {
    let b = rat(B.0, B.1);
    let m = models::ellipsoid(int(1), b, int(12)).unwrap();
    let tower = FilteredTower::at_action_gaps(m.complex.clone()).unwrap();
    let table = spectrum_table(&base_tower(m.complex).unwrap(), 15).unwrap();
    for k in 0..=15usize {
        let c_k = table.get(k).unwrap();
        let expected = tower.thresholds().iter().position(|t| *t > c_k).unwrap();
        match tower.stabilization_profile(2 * k as i64).unwrap() {
            Stabilization::At { index, threshold } => {
                assert_eq!(index, expected, "k = {k}");
                assert!(threshold > c_k);
            }
            Stabilization::NotStabilized => panic!("grading {} never stabilizes", 2 * k),
        }
    }
}

#[test]
fn identity_inclusion_on_equal_levels() {
    let m = models::ellipsoid(int(1), rat(B.0, B.1), int(5)).unwrap();
    let tower = FilteredTower::new(m.complex, vec![rat(31, 10), rat(41, 10)]).unwrap();
    for g in [0, 2, 4] {
        let id = tower.induced_inclusion(0, 0, g).unwrap();
        assert_eq!(id, SparseF2Matrix::identity(id.cols()));
    }
}
