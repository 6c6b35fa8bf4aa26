use e8p_core::scalar::{cabs_f64, cx, imag_unit};
use e8p_core::suites::elliptic_suite;
use e8p_core::weyl::sample_rng;
use e8p_core::{DoubleDouble, EllipticContext, EllipticError};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

mod common;
use common::{big_k, scd};

fn ctx(k: f64) -> EllipticContext<f64> {
    EllipticContext::new(cx(k, 0.0), 1e-12).unwrap()
}

#[test]
fn complete_integrals_against_agm() {
    for k in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let c = ctx(k);
        assert!((c.big_k.re - big_k(k)).abs() < 1e-14);
        assert!((c.big_kprime.re - big_k((1.0 - k * k).sqrt())).abs() < 1e-13);
        assert!(((c.k * c.k + c.kprime * c.kprime) - 1.0).norm() < 1e-15);
        let q = (-std::f64::consts::PI * c.big_kprime.re / c.big_k.re).exp();
        assert!((c.q.re - q).abs() < 1e-15);
    }
}

#[test]
fn jacobi_against_oracle() {
    let mut rng = sample_rng(1, 0);
    for _ in 0..200 {
        let k = rng.random_range(0.1..0.9);
        let c = ctx(k);
        let u = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(-1.0..1.0));
        let (s, cn, d) = scd(u, k);
        let Ok(j) = c.jacobi(u) else { continue };
        let scale = s.norm().max(1.0);
        assert!((j.sn - s).norm() < 1e-11 * scale, "k={k} u={u}");
        assert!((j.cn - cn).norm() < 1e-11 * scale);
        assert!((j.dn - d).norm() < 1e-11 * scale);
        assert!((j.cd - cn / d).norm() < 1e-10 * (cn / d).norm().max(1.0));
    }
}

#[test]
fn identity_suite_binary64() {
    let r = elliptic_suite::<f64>(100, 7, 1e-10);
    assert_eq!(r.checks.len(), 8);
    assert!(r.all_passed(), "{:?}", r.checks);
}

#[test]
fn identity_suite_extended() {
    let r = elliptic_suite::<DoubleDouble>(30, 8, 1e-25);
    assert!(r.all_passed(), "{:?}", r.checks);
}

#[test]
fn parities() {
    let c = ctx(0.45);
    let mut rng = sample_rng(2, 0);
    for _ in 0..20 {
        let u = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
        let (a, b) = (c.jacobi(u).unwrap(), c.jacobi(-u).unwrap());
        assert!((a.sn + b.sn).norm() < 1e-13);
        assert!((a.cn - b.cn).norm() < 1e-13);
        assert!((a.dn - b.dn).norm() < 1e-13);
        assert!((a.cd - b.cd).norm() < 1e-12);
        let (t, tm) = (c.theta(u).unwrap(), c.theta(-u).unwrap());
        assert!((t.h + tm.h).norm() < 1e-14);
        assert!((t.theta - tm.theta).norm() < 1e-14);
    }
}

#[test]
fn special_points() {
    let c = ctx(0.6);
    assert!(c.cd(c.big_k).unwrap().norm() < 1e-15);
    assert!((c.sn(c.big_k).unwrap() - 1.0).norm() < 1e-15);
    assert!((c.dn(c.big_k).unwrap() - c.kprime).norm() < 1e-15);
    let i = imag_unit::<f64>();
    assert!(matches!(c.sn(i * c.big_kprime), Err(EllipticError::PoleEncountered { .. })));
    assert!(c.cd_projective(c.big_k + i * c.big_kprime).is_infinite(1e-14));
    assert_eq!(c.kappa(), 2.0 * c.big_k + i * c.big_kprime);
}

#[test]
fn reduction_is_invisible() {
    let c = ctx(0.35);
    let (w1, w2) = c.periods();
    let u = cx(0.3, 0.2);
    for (m, n) in [(1.0, 0.0), (0.0, 1.0), (-3.0, 2.0), (5.0, -4.0)] {
        let v = u + m * w1 + n * w2;
        assert!((c.sn(v).unwrap() - c.sn(u).unwrap()).norm() < 1e-12);
        assert!((c.cd(v).unwrap() - c.cd(u).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn complex_modulus() {
    let c = EllipticContext::<f64>::new(cx(0.4, 0.3), 1e-12).unwrap();
    let mut rng = sample_rng(3, 0);
    for _ in 0..20 {
        let u = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5));
        let j = c.jacobi(u).unwrap();
        assert!((j.sn * j.sn + j.cn * j.cn - 1.0).norm() < 1e-12);
        assert!((c.k * c.k * j.sn * j.sn + j.dn * j.dn - 1.0).norm() < 1e-12);
    }
}

#[test]
fn extended_precision_tracks_binary64() {
    let lo = ctx(0.55);
    let hi: EllipticContext<DoubleDouble> = lo.convert().unwrap();
    let u = cx(0.81, -0.27);
    let a = lo.jacobi(u).unwrap();
    let b = hi.jacobi(cx(0.81, -0.27)).unwrap();
    assert!(cabs_f64(e8p_core::scalar::convert::<DoubleDouble, f64>(b.sn) - a.sn) < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn addition_formula(k in 0.1f64..0.9, a in -2.0f64..2.0, b in -1.0f64..1.0, c in -2.0f64..2.0, d in -1.0f64..1.0) {
        let r = ctx(k).sn_addition_check(Complex64::new(a, b), Complex64::new(c, d));
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() < 1e-9);
    }

    #[test]
    fn theta_addition(k in 0.1f64..0.9, a in -2.0f64..2.0, b in -1.0f64..1.0, c in -2.0f64..2.0, d in -1.0f64..1.0) {
        let r = ctx(k).theta_addition_check(Complex64::new(a, b), Complex64::new(c, d)).unwrap();
        prop_assert!(r < 1e-12);
    }
}
