//! Randomized invariants of the transform and the mixed norms.

use modspace_core::{invert, mixed_norm, wpt, ComplexField, Exponent, Grid, MixedNormSpec, Window};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::line(32, 6.0).unwrap()
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (1.0..4.0f64).prop_map(Exponent::Finite),
        Just(Exponent::Finite(1.0)),
        Just(Exponent::Infinity),
    ]
}

fn signal() -> impl Strategy<Value = ComplexField> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 32).prop_map(|v| {
        let values = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        ComplexField::from_values(&grid(), values).unwrap()
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_is_absolutely_homogeneous(f in signal(), p in exponent(), q in exponent(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let w = wpt(&f, &Window::gaussian(&grid(), 1.0).unwrap()).unwrap();
        let spec = MixedNormSpec::new(p, q);
        let c = Complex64::new(re, im);
        let scaled = mixed_norm(&w.scaled(c), spec).unwrap();
        prop_assert!(close(scaled, c.norm() * mixed_norm(&w, spec).unwrap(), 1e-12));
    }

    #[test]
    fn norm_satisfies_triangle_inequality(f in signal(), g in signal(), p in exponent(), q in exponent()) {
        let phi = Window::gaussian(&grid(), 0.8).unwrap();
        let (wf, wg) = (wpt(&f, &phi).unwrap(), wpt(&g, &phi).unwrap());
        let spec = MixedNormSpec::new(p, q);
        let lhs = mixed_norm(&wf.add(&wg).unwrap(), spec).unwrap();
        let rhs = mixed_norm(&wf, spec).unwrap() + mixed_norm(&wg, spec).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn transform_is_linear(f in signal(), g in signal(), a in -2.0..2.0f64) {
        let phi = Window::gaussian(&grid(), 1.0).unwrap();
        let c = Complex64::new(a, 0.5);
        let lhs = wpt(&f.scaled(c).add(&g).unwrap(), &phi).unwrap();
        let rhs = wpt(&f, &phi).unwrap().scaled(c).add(&wpt(&g, &phi).unwrap()).unwrap();
        prop_assert!(lhs.relative_l2_distance(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn inversion_round_trips(f in signal(), width in 0.5..2.0f64) {
        let phi = Window::gaussian(&grid(), 1.0).unwrap();
        let psi = Window::gaussian(&grid(), width).unwrap();
        let back = invert(&wpt(&f, &phi).unwrap(), &psi, &phi).unwrap();
        prop_assert!(back.sup_distance(&f).unwrap() < 1e-10);
    }

    #[test]
    fn l2_is_diagonal_mixed_norm(f in signal()) {
        let phi = Window::gaussian(&grid(), 1.0).unwrap();
        let w = wpt(&f, &phi).unwrap();
        let m = mixed_norm(&w, MixedNormSpec::diagonal(Exponent::Finite(2.0))).unwrap();
        prop_assert!(close(m, w.l2_norm(), 1e-12));
        let expected = 2.0 * std::f64::consts::PI * f.l2_norm_sq() * phi.l2_norm_sq();
        prop_assert!(close(m * m, expected, 1e-10));
    }
}
