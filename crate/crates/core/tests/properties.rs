use num_complex::Complex64;
use proptest::prelude::*;

use qhtoeplitz::commutant::{commutator_residual, fit_constants, product_identity_residual, CommutantConfig};
use qhtoeplitz::mellin::{mellin_eval, mellin_monomial, MellinDomainPoint, RadialSymbol};
use qhtoeplitz::operators::{
    commutator, compose, power, shift_from_symbol, Provenance, QuasiSymbol, WeightedShift,
};
use qhtoeplitz::roots::{build_root, root_mellin_grid, verify_root, RootSpec};
use qhtoeplitz::special::{beta, gamma_ratio_eval, proportionality_test, GammaRatio, GridFn};

fn shift(degree: u32, k_max: usize) -> impl Strategy<Value = WeightedShift> {
    prop::collection::vec((-4.0f64..4.0, -4.0f64..4.0), k_max + 1).prop_map(move |w| {
        let w = w.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        WeightedShift::new(degree, w, Provenance::Composite).unwrap()
    })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, .. ProptestConfig::default() })]

    #[test]
    fn monomial_eval_is_closed_form(n in 0u32..40, re in 2.0f64..200.0, im in -50.0f64..50.0) {
        let z = Complex64::new(re, im);
        let v = mellin_eval(&RadialSymbol::monomial(n), MellinDomainPoint::new(z).unwrap(), 1e-12).unwrap();
        prop_assert_eq!(v, mellin_monomial(n, z).unwrap());
    }

    #[test]
    fn sampled_monomial_within_tolerance(n in 0i32..8, re in 2.0f64..30.0) {
        let s = RadialSymbol::sampled(move |r| r.powi(n), n as f64).unwrap();
        let v = mellin_eval(&s, MellinDomainPoint::real(re).unwrap(), 1e-12).unwrap();
        prop_assert!((v.re - 1.0 / (re + n as f64)).abs() < 1e-12);
    }

    #[test]
    fn monomial_sum_is_linear(
        terms in prop::collection::vec((-10.0f64..10.0, -0.9f64..12.0), 1..8),
        re in 2.0f64..50.0,
        im in -5.0f64..5.0,
    ) {
        let z = Complex64::new(re, im);
        let s = RadialSymbol::sum(terms.clone()).unwrap();
        let v = mellin_eval(&s, MellinDomainPoint::new(z).unwrap(), 1e-12).unwrap();
        let parts: Vec<Complex64> = terms.iter().map(|&(c, e)| c * (z + e).inv()).collect();
        let direct: Complex64 = parts.iter().sum();
        let scale: f64 = parts.iter().map(|t| t.norm()).sum();
        prop_assert!((v - direct).norm() <= 10.0 * f64::EPSILON * terms.len() as f64 * scale);
    }

    #[test]
    fn monomial_derivative(n in 0u32..20, re in 2.0f64..40.0, im in -10.0f64..10.0) {
        let z = Complex64::new(re, im);
        let h = 1e-4;
        let f = |z| mellin_monomial(n, z).unwrap();
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        let exact = -(z + n as f64).powi(-2);
        prop_assert!((fd - exact).norm() < 1e-6);
    }

    #[test]
    fn gamma_recurrence(delta in 1u32..4, z in 1.0f64..1000.0) {
        let two_d = 2 * delta as i64;
        let ratio = GammaRatio::new(&[two_d], &[0], 2 * delta).unwrap();
        prop_assume!(ratio.collision(z).is_none());
        let v = gamma_ratio_eval(&ratio, z).unwrap();
        let expect = z / two_d as f64;
        prop_assert!((v - expect).abs() < 1e-11 * expect.abs());
    }

    #[test]
    fn beta_symmetry(x in 0.01f64..200.0, y in 0.01f64..200.0) {
        let (a, b) = (beta(x, y).unwrap(), beta(y, x).unwrap());
        prop_assert!((a - b).abs() <= 1e-13 * a.abs());
    }

    #[test]
    fn proportional_pairs_recover_constant(
        coeffs in prop::collection::vec(0.1f64..5.0, 3),
        c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
        period in 1u32..4,
    ) {
        let f = GridFn::sample(2.0, 1.0, 40, |z| coeffs[0] / (z + coeffs[1]) + coeffs[2] / (z * z + 1.0));
        let g = GridFn::sample(2.0, 1.0, 40, |z| c * (coeffs[0] / (z + coeffs[1]) + coeffs[2] / (z * z + 1.0)));
        let found = proportionality_test(&g, &f, period, 1e-12).unwrap();
        prop_assert!(found.is_some());
        prop_assert!((found.unwrap() - c).abs() < 1e-10 * c.abs().max(1.0));
    }

    #[test]
    fn compose_is_associative(
        (a, b, c) in (0u32..4, 0u32..4, 0u32..4).prop_flat_map(|(da, db, dc)| (shift(da, 24), shift(db, 24), shift(dc, 24))),
    ) {
        let left = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        let right = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        prop_assert_eq!(left.degree(), right.degree());
        prop_assert_eq!(left.k_max(), right.k_max());
        for (x, y) in left.weights().iter().zip(right.weights()) {
            prop_assert!(rel(*x, *y) <= 4.0 * f64::EPSILON);
        }
        let size = left.k_max() + left.degree() as usize + 1;
        let (ml, mr) = (left.matrix(size).unwrap(), right.matrix(size).unwrap());
        prop_assert!(ml.iter().zip(mr.iter()).all(|(x, y)| rel(*x, *y) <= 4.0 * f64::EPSILON));
    }

    #[test]
    fn commutator_is_antisymmetric(a in shift(1, 30), b in shift(3, 30)) {
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert_eq!(ab.k_max(), ba.k_max());
        for (x, y) in ab.weights().iter().zip(ba.weights()) {
            prop_assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn matrix_of_composite_is_product(a in shift(2, 20), b in shift(1, 22)) {
        let ab = compose(&a, &b).unwrap();
        let size = ab.k_max() + ab.degree() as usize + 1;
        let prod = a.matrix(size).unwrap() * b.matrix(size).unwrap();
        let direct = ab.matrix(size).unwrap();
        for j in 0..=ab.k_max() {
            let i = j + ab.degree() as usize;
            prop_assert!(rel(direct[(i, j)], prod[(i, j)]) < 1e-13);
        }
    }

    #[test]
    fn apply_moves_degree(p in 0u32..5, n in 0u32..6, k in 0usize..30) {
        let op = shift_from_symbol(&QuasiSymbol::monomial(p, n), 30).unwrap();
        let mut e = vec![Complex64::new(0.0, 0.0); k + 1];
        e[k] = Complex64::new(1.0, 0.0);
        let out = op.apply(&e).unwrap();
        prop_assert_eq!(out.len(), k + 1 + p as usize);
        for (i, v) in out.iter().enumerate() {
            if i == k + p as usize {
                prop_assert_eq!(*v, op.weights()[k]);
            } else {
                prop_assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn roots_are_positive_and_verify(p in 2u32..5, n in 1u32..9) {
        let spec = RootSpec::calibrated(p, n, 80 + p as usize).unwrap();
        prop_assert!(spec.calibration.re > 0.0 && spec.calibration.im == 0.0);
        prop_assert!(root_mellin_grid(&spec).unwrap().iter().all(|v| v.re > 0.0 && v.im == 0.0));
        let rep = verify_root(&spec, 80, 1e-10).unwrap();
        prop_assert!(rep.pass, "{:?}", rep);
        let r = build_root(&spec).unwrap();
        prop_assert!(power(&r, p).is_ok());
    }

    #[test]
    fn operator_and_product_forms_agree(
        (p, s) in (1u32..4).prop_flat_map(|p| (Just(p), p + 1..p + 4)),
        n in 1u32..7,
        d in 1u32..7,
        m in 1u32..6,
    ) {
        let c = CommutantConfig::new(p, s, n, d, m, m + s - p, 30);
        let op = fit_constants(&c, 30).unwrap();
        let prod = product_identity_residual(&c, op.best_c1, op.best_c2, 30).unwrap();
        prop_assert_eq!(op.feasible, prod.feasible, "{:?}: {} vs {}", c, op.min_residual, prod.min_residual);
        prop_assert!((op.min_residual - prod.min_residual).abs() < 1e-8);
    }

    #[test]
    fn forms_agree_at_any_constants(
        (p, s) in (1u32..4).prop_flat_map(|p| (Just(p), p + 1..p + 4)),
        n in 1u32..7,
        d in 1u32..7,
        m in 1u32..6,
        (a, b, c, e) in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
    ) {
        let cfg = CommutantConfig::new(p, s, n, d, m, m + s - p, 30);
        let (c1, c2) = (Complex64::new(a, b), Complex64::new(c, e));
        let op = commutator_residual(&cfg, c1, c2, 30).unwrap();
        let prod = product_identity_residual(&cfg, c1, c2, 30).unwrap();
        prop_assert_eq!(op.feasible, prod.feasible);
        for ((_, x), (_, y)) in op.per_k.iter().zip(&prod.per_k) {
            prop_assert!((x - y).abs() < 1e-9, "{:?}: {} vs {}", cfg, x, y);
        }
    }
}
