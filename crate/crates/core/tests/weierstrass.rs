use e8p_core::scalar::cx;
use e8p_core::weierstrass::*;
use e8p_core::weyl::{equivalence_deviation, random_state, sample_rng};
use e8p_core::{DoubleDouble, EllipticContext, ProjectiveValue};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

mod common;
use common::scd;

fn setting(k: f64) -> WeierstrassSetting<f64> {
    WeierstrassSetting::new(EllipticContext::new(cx(k, 0.0), 1e-12).unwrap(), 1.0).unwrap()
}

#[test]
fn oracle_matches_library_jacobi() {
    let ctx = EllipticContext::<f64>::new(cx(0.5, 0.0), 1e-12).unwrap();
    let mut rng = sample_rng(1, 0);
    for _ in 0..50 {
        let u = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-0.6..0.6));
        let j = ctx.jacobi(u).unwrap();
        let (s, c, d) = scd(u, 0.5);
        assert!((j.sn - s).norm() < 1e-12 && (j.cn - c).norm() < 1e-12 && (j.dn - d).norm() < 1e-12);
    }
}

#[test]
fn landen_identity_against_oracle() {
    let k: f64 = 0.5;
    let l = 2.0 * k.sqrt() / (1.0 + k);
    let mut rng = sample_rng(2, 0);
    for _ in 0..50 {
        let u = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-0.5..0.5));
        let (_, cn, dn) = scd(u, k);
        let (s, _, d) = scd((1.0 + k) * u / 2.0, l);
        let cn_l = (1.0 - 2.0 / (1.0 + k) * s * s) / d;
        let dn_l = (1.0 - 2.0 * k / (1.0 + k) * s * s) / d;
        assert!((cn - cn_l).norm() < 1e-12 && (dn - dn_l).norm() < 1e-12);
    }
}

#[test]
fn landen_residuals() {
    let s = setting(0.5);
    assert!(landen_residual(cx(0.0, 0.0), &s).unwrap() < 1e-15);
    let mut rng = sample_rng(3, 0);
    for _ in 0..100 {
        let u = cx(rng.random_range(-3.0..3.0), 0.0);
        assert!(landen_residual(u, &s).unwrap() < 1e-10);
    }
    let kp3 = s.jacobi.big_kprime / 3.0;
    for _ in 0..100 {
        let u = Complex64::new(rng.random_range(-0.3..0.3), kp3.re + rng.random_range(-0.1..0.1));
        assert!(landen_residual(u, &s).unwrap() < 1e-9);
    }
}

#[test]
fn landen_modulus_values() {
    assert!((landen_modulus(cx::<f64>(0.5, 0.0)) - cx(2.0 * 0.5f64.sqrt() / 1.5, 0.0)).norm() < 1e-16);
    // the descent of a complex modulus uses the principal root
    let k = Complex64::new(0.3, 0.2);
    assert!((landen_modulus(k) - 2.0 * k.sqrt() / (1.0 + k)).norm() < 1e-15);
}

#[test]
fn frame_relations() {
    for k in [0.2, 0.5, 0.8] {
        let f = make_frame::<f64>(cx(k, 0.0), 1.0, 1e-12).unwrap();
        assert_eq!(f.e1 - f.e3, cx(1.0, 0.0));
        assert!(f.sum_residual() < 1e-15);
        assert!(((f.e2 - f.e3) / (f.e1 - f.e3) - k * k).norm() < 1e-15);
        assert!(((f.e1 - f.e2) / (f.e1 - f.e3) - (1.0 - k * k)).norm() < 1e-15);
        assert!((((f.e2 - f.e3) / (f.e1 - f.e3)).sqrt() - k).norm() < 1e-15);
    }
    let f = make_frame::<f64>(cx(0.5, 0.0), 3.0, 1e-12).unwrap();
    assert!((f.e1 - f.e3 - 3.0).norm() < 1e-15);
    assert!(f.sum_residual() < 1e-15);
}

#[test]
fn wp_special_values() {
    let f = make_frame::<f64>(cx(0.6, 0.0), 1.0, 1e-12).unwrap();
    assert!((f.wp(f.ctx.big_k).unwrap() - f.e1).norm() < 1e-13);
    assert!(f.wp_projective(cx(0.0, 0.0)).is_infinite(1e-15));
    assert!(f.wp(cx(0.0, 0.0)).is_err());
    let mut rng = sample_rng(4, 0);
    for _ in 0..20 {
        let u = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-0.8..0.8));
        let a = f.wp(u).unwrap();
        assert!((a - f.wp(-u).unwrap()).norm() < 1e-12 * a.norm().max(1.0));
        let (s, _, _) = scd(u, 0.6);
        assert!((a - (1.0 / (s * s) + f.e3)).norm() < 1e-11 * a.norm().max(1.0));
    }
    for h in [1e-2, 1e-3, 1e-4] {
        let u = Complex64::new(h, 0.5 * h);
        let d = (u * u * f.wp(u).unwrap() - 1.0).norm();
        assert!(d < 2.0 * h * h, "{h} {d}");
    }
}

#[test]
fn cd_correspondence() {
    let s = setting(0.4);
    assert!(cd_wp_residual(cx(0.0, 0.0), &s).unwrap() < 1e-15);
    let four_k = 4.0 * s.jacobi.big_k;
    let mut rng = sample_rng(5, 0);
    for _ in 0..100 {
        let u = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
        let r = cd_wp_residual(u, &s).unwrap();
        assert!(r < 1e-9);
        assert!((cd_wp_residual(u + four_k, &s).unwrap() - r).abs() < 1e-9);
    }
}

#[test]
fn correspondence_is_scale_covariant() {
    let ctx = EllipticContext::<f64>::new(cx(0.55, 0.0), 1e-12).unwrap();
    let a = WeierstrassSetting::new(ctx, 1.0).unwrap();
    let b = WeierstrassSetting::new(ctx, 2.7).unwrap();
    let mut rng = sample_rng(6, 0);
    for _ in 0..20 {
        let u = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
        let (va, vb) = (a.cd_via_wp(u).unwrap(), b.cd_via_wp(u).unwrap());
        assert!(va.chordal(&vb) < 1e-13);
        assert!((cd_wp_residual(u, &a).unwrap() - cd_wp_residual(u, &b).unwrap()).abs() < 1e-13);
    }
}

#[test]
fn base_point_transport() {
    for seed in 0..10 {
        let st = random_state::<f64, _>(&mut sample_rng(seed, 0), 1e-12);
        let s = WeierstrassSetting::new(st.ctx, 1.0).unwrap();
        assert!(base_point_transport_residual(&st, &s).unwrap() < 1e-8);
        let w = jacobi_to_weierstrass(&st, &s).unwrap();
        let scale = (s.frame.e1 - s.frame.e3).sqrt();
        assert!((w.t - (1.0 + st.ctx.k) * st.eta / (2.0 * scale)).norm() < 1e-15);
        let back = weierstrass_to_jacobi(&w, &s).unwrap();
        assert!(equivalence_deviation(&back, &st).max() < 1e-12);
        let again = jacobi_to_weierstrass(&back, &s).unwrap();
        assert!(again.f.chordal(&w.f) < 1e-12 && again.g.chordal(&w.g) < 1e-12);
    }
}

#[test]
fn p8_image() {
    let st = random_state::<f64, _>(&mut sample_rng(20, 0), 1e-12);
    let s = setting(st.ctx.k.re);
    let x = st.ctx.cd_projective(st.c[7] + st.eta);
    let w = jacobi_to_weierstrass(&st, &s).unwrap();
    let f = s.to_weierstrass_coordinate(&x).unwrap();
    assert!(f.chordal(&s.frame.wp_projective(w.b[7] + w.t)) < 1e-10);
}

#[test]
fn x_equal_one_is_the_pole() {
    let s = setting(0.5);
    let f = s.to_weierstrass_coordinate(&ProjectiveValue::finite(cx(1.0, 0.0))).unwrap();
    assert!(f.is_infinite(1e-15));
}

#[test]
fn extended_precision_correspondence() {
    let ctx = EllipticContext::<DoubleDouble>::new(cx(0.4, 0.0), 1e-28).unwrap();
    let s = WeierstrassSetting::new(ctx, DoubleDouble::from(1.0)).unwrap();
    let u = cx(0.37, 0.21);
    assert!(cd_wp_residual(u, &s).unwrap() < 1e-28);
    assert!(landen_residual(u, &s).unwrap() < 1e-28);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cd_wp_prop(k in 0.1f64..0.9, re in -3.0f64..3.0, im in -1.0f64..1.0) {
        let s = setting(k);
        let r = cd_wp_residual(Complex64::new(re, im), &s);
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() < 1e-9);
    }

    #[test]
    fn landen_prop(k in 0.1f64..0.9, re in -3.0f64..3.0, im in -0.5f64..0.5) {
        let s = setting(k);
        let r = landen_residual(Complex64::new(re, im), &s);
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() < 1e-9);
    }
}
