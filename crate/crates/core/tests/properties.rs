//! Property tests: set algebra and essential-closure lemmas on random finite
//! unions, positivity of Weyl functions, and the Green's function identities
//! at random interior points.

use std::f64::consts::TAU;

use num_complex::Complex64 as C;
use proptest::prelude::*;

use spectral_closure::boundary::{self, BoundaryFunction, CaratheodoryRepresentation, FnBoundary};
use spectral_closure::cmv::{self, M11Mode, VerblunskyCoefficients};
use spectral_closure::grid::Grid;
use spectral_closure::interval_sets::{
    equivalent_supports, CircleArcSet, Interval, MixedMeasure, RealIntervalSet,
};
use spectral_closure::jacobi::{JacobiCoefficients, Side, Truncation};
use spectral_closure::linalg::tridiagonal_resolvent_diag;
use spectral_closure::schrodinger::{piece_propagator, PiecewisePotential};
use spectral_closure::spectral::{phase_fraction, AnalysisOptions, LineOperator};

/// Endpoints on a 1/8 lattice keep every measure sum exact.
fn interval() -> impl Strategy<Value = Interval> {
    (-40i32..40, 0i32..24, any::<bool>(), any::<bool>()).prop_map(|(a, l, lc, hc)| {
        let lo = a as f64 / 8.0;
        let hi = (a + l) as f64 / 8.0;
        if l == 0 {
            Interval::closed(lo, lo)
        } else {
            Interval::new(lo, hi, lc, hc)
        }
    })
}

fn union() -> impl Strategy<Value = RealIntervalSet> {
    (
        prop::collection::vec(interval(), 0..7),
        prop::collection::vec((-48i32..48).prop_map(|k| k as f64 / 8.0 + 1.0 / 64.0), 0..4),
    )
        .prop_map(|(ivs, pts)| RealIntervalSet::from_parts(&ivs, &pts).expect("finite input"))
}

fn null_set() -> impl Strategy<Value = RealIntervalSet> {
    prop::collection::vec(-80i32..80, 0..6)
        .prop_map(|ks| RealIntervalSet::from_parts(&[], &ks.iter().map(|&k| k as f64 / 16.0).collect::<Vec<_>>()).expect("finite"))
}

fn arcs() -> impl Strategy<Value = CircleArcSet> {
    prop::collection::vec((0i32..64, 1i32..24), 0..5).prop_map(|v| {
        let pairs: Vec<(f64, f64)> = v
            .iter()
            .map(|&(a, l)| (a as f64 * TAU / 64.0, (a + l) as f64 * TAU / 64.0))
            .collect();
        CircleArcSet::from_closed_arcs(&pairs).expect("valid arcs")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn union_and_intersection_measures_add_up(a in union(), b in union()) {
        prop_assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());
    }

    #[test]
    fn algebra_identities(a in union(), b in union(), x in -6.0f64..6.0) {
        prop_assert_eq!(a.union(&b).contains(x), a.contains(x) || b.contains(x));
        prop_assert_eq!(a.intersect(&b).contains(x), a.contains(x) && b.contains(x));
        prop_assert_eq!(a.difference(&b).contains(x), a.contains(x) && !b.contains(x));
        prop_assert_eq!(a.symmetric_difference(&b), a.difference(&b).union(&b.difference(&a)));
        prop_assert!(a.difference(&b).is_subset(&a));
        prop_assert!(a.intersect(&b).is_subset(&a.union(&b)));
    }

    #[test]
    fn canonical_form_is_unique(a in union()) {
        let again = RealIntervalSet::from_parts(a.intervals(), a.points()).unwrap();
        prop_assert_eq!(&again, &a);
        for w in a.intervals().windows(2) {
            prop_assert!(w[0].hi < w[1].lo || (w[0].hi == w[1].lo && !w[0].hi_closed && !w[1].lo_closed));
        }
    }

    #[test]
    fn essential_closure_lemmas(a in union(), b in union(), c in null_set()) {
        let e = a.essential_closure();
        prop_assert_eq!(e.essential_closure(), e.clone());
        prop_assert!(e.is_subset(&a.closure()));
        prop_assert_eq!(a.difference(&e).measure(), 0.0);
        prop_assert!(e.measure() >= a.measure());
        prop_assert!(e.points().is_empty());
        prop_assert_eq!(a.union(&c).essential_closure(), e.clone());
        let ab = a.union(&b);
        prop_assert!(e.is_subset(&ab.essential_closure()));
    }

    #[test]
    fn supports_equivalence_relation(a in union(), c1 in null_set(), c2 in null_set()) {
        let mu = MixedMeasure { density: 2.0, atoms: vec![] };
        let s = a.clone();
        let t = a.union(&c1);
        let u = a.difference(&c2);
        prop_assert!(equivalent_supports(&s, &s, &mu, 0.0));
        prop_assert_eq!(equivalent_supports(&s, &t, &mu, 0.0), equivalent_supports(&t, &s, &mu, 0.0));
        prop_assert!(equivalent_supports(&s, &t, &mu, 0.0) && equivalent_supports(&t, &u, &mu, 0.0));
        prop_assert!(equivalent_supports(&s, &u, &mu, 0.0));
    }

    #[test]
    fn arc_algebra(a in arcs(), b in arcs(), t in 0.0f64..TAU) {
        let m = a.union(&b).measure() + a.intersect(&b).measure() - a.measure() - b.measure();
        prop_assert!(m.abs() < 1e-12);
        prop_assert_eq!(a.union(&b).contains(t), a.contains(t) || b.contains(t));
        prop_assert!(a.essential_closure().is_subset(&a.closure()));
        prop_assert!((a.measure() + CircleArcSet::full().difference(&a).measure() - TAU).abs() < 1e-12);
    }
}

fn jacobi() -> impl Strategy<Value = JacobiCoefficients> {
    (1usize..4)
        .prop_flat_map(|p| (prop::collection::vec(0.3f64..2.0, p), prop::collection::vec(-2.0f64..2.0, p)))
        .prop_map(|(a, b)| JacobiCoefficients::periodic(a, b).unwrap())
}

fn verblunsky() -> impl Strategy<Value = VerblunskyCoefficients> {
    (1usize..4)
        .prop_flat_map(|p| prop::collection::vec((0.0f64..0.8, 0.0f64..TAU), p))
        .prop_map(|v| VerblunskyCoefficients::periodic(v.iter().map(|&(r, t)| C::from_polar(r, t)).collect()).unwrap())
}

fn potential() -> impl Strategy<Value = PiecewisePotential> {
    prop::collection::vec((0.2f64..1.0, -3.0f64..6.0), 1..4)
        .prop_map(|pieces| {
            let period = pieces.iter().map(|p| p.0).sum();
            PiecewisePotential::periodic(period, pieces).unwrap()
        })
}

fn upper_points(window: (f64, f64), seed: u64, n: usize) -> Vec<C> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C::new(rng.gen_range(window.0..window.1), rng.gen_range(0.05..3.0))).collect()
}

fn disk_points(seed: u64, n: usize) -> Vec<C> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..TAU))).collect()
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jacobi_herglotz_and_green_identity(j in jacobi(), seed in any::<u64>()) {
        let tri = j.truncated_matrix(3000, Truncation::Window { center: 0 }).unwrap();
        let k = tri.index_of(0).unwrap();
        for z in upper_points(j.spectral_window(), seed, 200) {
            let w = j.weyl_data(z, 0).unwrap();
            prop_assert!(w.m_plus.im > 0.0 && w.m_minus.im > 0.0);
            prop_assert!(w.big_m_plus.im > 0.0 && w.big_m_minus.im < 0.0 && w.g.im > 0.0);
            prop_assert!((w.g * (w.big_m_minus - w.big_m_plus) - 1.0).norm() < 1e-10);
            if z.im >= 0.1 {
                let o = tridiagonal_resolvent_diag(&tri.diag, &tri.off, z, k);
                prop_assert!(rel(w.g, o) < 1e-10, "z = {}", z);
            }
            prop_assert!(rel(j.big_m_from_psi(z, 0, Side::Plus).unwrap(), w.big_m_plus) < 1e-10);
        }
    }

    #[test]
    fn cmv_caratheodory_and_formula(v in verblunsky(), seed in any::<u64>()) {
        for z in disk_points(seed, 200) {
            let w = v.weyl_data(z, 0).unwrap();
            prop_assert!(w.m_plus.re > 0.0 && w.m_minus.re > 0.0);
            prop_assert!(w.big_m_plus.re > 0.0 && w.big_m_minus.re < 0.0 && w.m11.re > 0.0);
        }
        for z in disk_points(seed ^ 1, 20) {
            let f = v.m11(z, 0, M11Mode::Formula).unwrap();
            let o = v.m11(z, 0, M11Mode::Oracle { window: 2048 }).unwrap();
            prop_assert!(rel(f, o) < 1e-6, "z = {}", z);
        }
    }

    #[test]
    fn cmv_sections_are_unitary(v in verblunsky(), lo in -50i64..50) {
        let t = cmv::build_truncation(&v, 2 * lo, 200).unwrap();
        prop_assert!(t.unitarity_residual() < 1e-12);
    }

    #[test]
    fn schrodinger_herglotz_and_green_identity(s in potential(), seed in any::<u64>(), x1 in 0.1f64..0.9) {
        for z in upper_points(s.spectral_window(), seed, 200) {
            let w = s.weyl_data(z, 0.0).unwrap();
            prop_assert!(w.m_plus.im > 0.0 && w.m_minus.im < 0.0 && w.g.im > 0.0);
            let o = s.green_via(z, 0.0, x1 * s.period()).unwrap();
            prop_assert!(rel(w.g, o) < 1e-10, "z = {}", z);
        }
    }

    #[test]
    fn propagators_are_unimodular(l in 1e-6f64..5.0, v in -20.0f64..50.0, re in -10.0f64..40.0, im in -5.0f64..5.0) {
        let m = piece_propagator(l, v, C::new(re, im));
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let scale = m.iter().flatten().map(|x| x.norm()).fold(1.0, f64::max);
        prop_assert!((det - 1.0).norm() < 1e-12 * scale * scale);
    }

    #[test]
    fn phases_stay_in_range(j in jacobi(), l in -6.0f64..6.0) {
        let opts = AnalysisOptions::default();
        if let Ok(x) = j.xi(l, 0, &opts) {
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(&x));
        }
    }

    #[test]
    fn ac_spectrum_is_site_independent(j in jacobi()) {
        let (lo, hi) = j.spectral_window();
        let g = Grid::new(lo, hi, 801).unwrap();
        let ac = j.ac_spectrum(&g.points(), &AnalysisOptions::default()).unwrap();
        prop_assert!(ac.site_discrepancy <= g.step(), "{:?}", ac.per_site);
    }

    #[test]
    fn reflection_twice_is_identity(v in verblunsky(), j in jacobi(), seed in any::<u64>()) {
        let f = FnBoundary::caratheodory("M11", |z| v.m11(z, 0, M11Mode::Formula));
        let h = FnBoundary::herglotz("m+", |z| j.m_half_line(z, 0, Side::Plus));
        for z in disk_points(seed, 20) {
            if z.norm() < 1e-3 { continue; }
            let outside = 1.0 / z.conj();
            let back = -boundary::evaluate_extended(&f, outside).unwrap().conj();
            prop_assert!((back - f.evaluate(z).unwrap()).norm() < 1e-12 * (1.0 + back.norm()));
        }
        for z in upper_points(j.spectral_window(), seed, 20) {
            let back = boundary::reflect(&h, z.conj()).unwrap();
            prop_assert!((back.conj() - h.evaluate(z).unwrap()).norm() < 1e-12 * (1.0 + back.norm()));
        }
    }

    #[test]
    fn caratheodory_mass_matches_probe(v in verblunsky()) {
        let f = FnBoundary::caratheodory("M11", |z| v.m11(z, 0, M11Mode::Formula));
        let rep = CaratheodoryRepresentation::compute(&f).unwrap();
        let probe = CaratheodoryRepresentation::measure_probe(&f, 0.0, TAU).unwrap();
        prop_assert!((probe - rep.total_mass).abs() < 1e-6, "{} vs {}", probe, rep.total_mass);
    }
}

#[test]
fn phase_fraction_range() {
    for k in 0..1000 {
        let t = k as f64 * 0.0123;
        let x = phase_fraction(C::from_polar(1.0 + t, t));
        assert!((0.0..=1.0).contains(&x));
    }
}
