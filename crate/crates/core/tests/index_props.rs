use nalgebra::{Matrix2, Matrix4};
use proptest::prelude::*;

use ech_calc::ech_core::{ClassLabel, Orbit, OrbitKind};
use ech_calc::index::flow::{flow_report, weinstein_flow};
use ech_calc::index::{
    asymptotic_spectrum, check_adjunction, check_spectrum, cz_total, ech_index_of, fredholm_index, presets,
    retrivialize_c, retrivialize_q, self_pairing, CurveData, End, Trivialization,
};
use ech_calc::rational::{int, rat};

fn orbit_pool() -> Vec<Orbit> {
    vec![
        Orbit::elliptic("e1", rat(3, 10), int(1)).unwrap(),
        Orbit::elliptic("e2", rat(17, 7), rat(3, 2)).unwrap(),
        Orbit::new("h", OrbitKind::PositiveHyperbolic { winding: 2 }, int(2), ClassLabel::zero()).unwrap(),
        Orbit::new("n", OrbitKind::NegativeHyperbolic { winding: -1 }, int(3), ClassLabel::zero()).unwrap(),
    ]
}

fn arb_curve() -> impl Strategy<Value = CurveData> {
    let pool = orbit_pool();
    let end = (0usize..2, 1u32..4).prop_map(move |(i, m)| (i, m));
    (
        -4i64..3,
        proptest::collection::vec(end.clone(), 0..3),
        proptest::collection::vec(end, 0..3),
        -5i64..6,
        -5i64..6,
        -3i64..4,
        0i64..3,
        any::<bool>(),
    )
        .prop_map(move |(chi, pos, neg, c, q, w, delta, hyper)| {
            let to_ends = |v: Vec<(usize, u32)>, offset: usize| -> Vec<End> {
                // distinct orbits per side, each hyperbolic at most once
                let mut seen = Vec::new();
                v.into_iter()
                    .filter(|(i, _)| {
                        let fresh = !seen.contains(i);
                        seen.push(*i);
                        fresh
                    })
                    .map(|(i, m)| End { orbit: pool[(i + offset) % 2].clone(), multiplicity: m })
                    .collect()
            };
            let mut positive_ends = to_ends(pos, 0);
            let negative_ends = to_ends(neg, 1);
            if hyper {
                positive_ends.push(End { orbit: pool[2].clone(), multiplicity: 1 });
            }
            CurveData { euler_char: chi, positive_ends, negative_ends, c_tau: c, q_tau: q, writhe: w, delta }
        })
}

fn arb_triv() -> impl Strategy<Value = Trivialization> {
    (-3i64..4, -3i64..4, -3i64..4).prop_map(|(a, b, c)| Trivialization::reference().with("e1", a).with("e2", b).with("h", c))
}

/// Transports `c_τ` and `Q_τ` of a curve to a new trivialization.
fn transport(c: &CurveData, old: &Trivialization, new: &Trivialization) -> CurveData {
    let (alpha, beta) = c.orbit_sets().unwrap();
    let mut out = c.clone();
    out.c_tau = retrivialize_c(c.c_tau, &alpha, &beta, old, new);
    out.q_tau = retrivialize_q(c.q_tau, &self_pairing(&alpha), &self_pairing(&beta), old, new);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn indices_are_trivialization_invariant(c in arb_curve(), t1 in arb_triv(), t2 in arb_triv()) {
        let moved = transport(&c, &t1, &t2);
        prop_assert_eq!(fredholm_index(&c, &t1).unwrap(), fredholm_index(&moved, &t2).unwrap());
        let (i1, i2) = (ech_index_of(&c, &t1).unwrap(), ech_index_of(&moved, &t2).unwrap());
        prop_assert_eq!(i1, i2);
        prop_assert_eq!(i1.rem_euclid(2), i2.rem_euclid(2));
    }

    #[test]
    fn retrivialization_round_trips(c in arb_curve(), t1 in arb_triv(), t2 in arb_triv()) {
        let back = transport(&transport(&c, &t1, &t2), &t2, &t1);
        prop_assert_eq!(back, c);
    }

    #[test]
    fn fredholm_additive(a in arb_curve(), b in arb_curve(), t in arb_triv()) {
        let sum = fredholm_index(&a, &t).unwrap() + fredholm_index(&b, &t).unwrap();
        prop_assert_eq!(fredholm_index(&a.disjoint_union(&b), &t).unwrap(), sum);
    }

    #[test]
    fn fredholm_linear_in_chi_and_c(c in arb_curve(), t in arb_triv(), dc in -3i64..4, dchi in -3i64..4) {
        let mut d = c.clone();
        d.c_tau += dc;
        d.euler_char += dchi;
        prop_assert_eq!(fredholm_index(&d, &t).unwrap(), fredholm_index(&c, &t).unwrap() + 2 * dc - dchi);
        let base = ech_index_of(&c, &t).unwrap();
        prop_assert_eq!(ech_index_of(&d, &t).unwrap(), base + dc);
    }

    #[test]
    fn adjunction_linear(c in arb_curve(), dd in 0i64..3) {
        let mut d = c.clone();
        d.delta += dd;
        prop_assert_eq!(check_adjunction(&d), check_adjunction(&c) + 2 * dd);
    }

    #[test]
    fn flow_group_law(s in 0.0f64..5.0, t in 0.0f64..5.0) {
        let lhs = weinstein_flow(s + t);
        let rhs = weinstein_flow(s) * weinstein_flow(t);
        let scale = lhs.abs().max().max(1.0);
        prop_assert!((lhs - rhs).abs().max() / scale <= 1e-12);
    }

    #[test]
    fn windings_monotone(a in -20.0f64..20.0, b in -20.0f64..20.0, off in -20.0f64..20.0) {
        let s = Matrix2::new(a, off, off, b);
        let pairs = asymptotic_spectrum(&s, 12).unwrap();
        let checks = check_spectrum(&pairs, 12, 0);
        prop_assert!(checks.monotone, "{:?}", pairs);
        prop_assert!(checks.two_per_winding);
    }
}

#[test]
fn cz_total_hand_values() {
    let pool = orbit_pool();
    let a = ech_calc::ech_core::OrbitSet::new(vec![(pool[0].clone(), 3), (pool[2].clone(), 1)]).unwrap();
    // e1: 2⌊0.3⌋+1 + 2⌊0.6⌋+1 + 2⌊0.9⌋+1 = 3; h: 2
    assert_eq!(cz_total(&a, &ech_calc::ech_core::OrbitSet::empty(), &Trivialization::reference()).unwrap(), 5);
    let t = Trivialization::reference().with("e1", 1);
    // each iterate k loses 2k: 3 − 2(1+2+3)
    assert_eq!(cz_total(&a, &ech_calc::ech_core::OrbitSet::empty(), &t).unwrap(), 5 - 12);
}

#[test]
fn preset_values() {
    let t = Trivialization::reference();
    for name in ["PS", "PN"] {
        let c = presets::by_name(name).unwrap();
        assert_eq!(fredholm_index(&c, &t).unwrap(), 1);
        assert_eq!(ech_index_of(&c, &t).unwrap(), 1);
        assert_eq!(check_adjunction(&c), 0);
    }
}

#[test]
fn spectrum_scales_continuously() {
    let s = Matrix2::new(2.0, 0.0, 0.0, -1.0);
    let base = asymptotic_spectrum(&Matrix2::zeros(), 16).unwrap();
    let mut prev = base.clone();
    for step in 1..=20 {
        let lambda = step as f64 / 20.0;
        let cur = asymptotic_spectrum(&(s * lambda), 16).unwrap();
        for (p, q) in prev.iter().zip(&cur) {
            assert!((p.eigenvalue - q.eigenvalue).abs() <= 2.0 / 20.0 + 1e-9);
            assert_eq!(p.winding, q.winding, "winding jump at λ = {lambda}");
        }
        prev = cur;
    }
}

#[test]
fn flow_report_passes_on_grid() {
    let ts: Vec<f64> = (1..=100).map(|i| i as f64 / 10.0).collect();
    let r = flow_report(&ts, 1e-9, 1e-6);
    assert!(r.pass());
    let phi = weinstein_flow(0.0);
    assert_eq!(phi, Matrix4::identity());
}
