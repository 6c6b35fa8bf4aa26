use e8p_core::painleve::*;
use e8p_core::scalar::{cx, from_c64, Cx};
use e8p_core::weyl::*;
use e8p_core::{DoubleDouble, EllipticContext, Generator, ProjectiveValue, Word};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn state(seed: u64) -> SurfaceState<f64> {
    random_state(&mut sample_rng(seed, 0), 1e-12)
}

fn rcg(seed: u64) -> (RcgParams<f64>, ProjectiveValue<f64>, ProjectiveValue<f64>) {
    let st = state(seed);
    (RcgParams { gamma_e: st.c[0], gamma_o: st.c[1], z0: st.c[2], ctx: st.ctx }, st.x, st.y)
}

fn msypr(seed: u64) -> EquationState<f64> {
    let st = state(seed);
    let params = MsyPrParams { c: [st.c[0], st.c[1], st.c[2], st.c[3]], lambda: 2.5 * st.c[4], ctx: st.ctx };
    EquationState::Msypr { params, eta: st.eta, x_prev: st.y, x_curr: st.x }
}

fn dd(st: &SurfaceState<f64>) -> SurfaceState<DoubleDouble> {
    st.convert().unwrap()
}

#[test]
fn base_points_lie_on_the_curve() {
    for seed in 0..50 {
        let st = state(seed);
        let bp = base_points(&st.c, st.eta, &st.ctx).unwrap();
        assert!(bp.max_residual(st.eta, &st.ctx) < 1e-10);
    }
}

#[test]
fn curve_parametrization_and_off_curve_points() {
    let st = state(1);
    let mut rng = sample_rng(1, 1);
    for _ in 0..20 {
        let u = random_parameter(&mut rng) * 3.0;
        let x = st.ctx.cd_projective(st.eta + u);
        let y = st.ctx.cd_projective(st.eta - u);
        assert!(curve_residual(&x, &y, st.eta, &st.ctx) < 1e-12);
    }
    let p = st.ctx.cd_projective(st.eta);
    assert!(curve_residual(&p, &p, st.eta, &st.ctx) < 1e-12);
    let off = ProjectiveValue::finite(cx(0.3, 0.2));
    assert!(curve_residual(&off, &off, st.eta, &st.ctx) > 0.01);
    let inf = ProjectiveValue::infinity();
    assert!(curve_residual(&inf, &inf, st.eta, &st.ctx).is_finite());
}

#[test]
fn coincident_base_points_are_rejected() {
    let st = state(2);
    let zero = [cx(0.0, 0.0); 8];
    assert!(matches!(base_points(&zero, st.eta, &st.ctx), Err(PainleveError::DegenerateConfiguration(1, 2))));
}

#[test]
fn p_vanishes_at_its_three_points() {
    let st = state(3);
    let ctx = &st.ctx;
    let (a, b) = ([st.c[0], st.c[1], st.c[2]], st.eta);
    for aj in a {
        let x = ctx.cd(b + aj).unwrap();
        let y = ctx.cd(b - aj).unwrap();
        let v = p_func(a, b, x, y, ctx).unwrap();
        let scale = PCoefficients::new(a, b, ctx).unwrap().0.iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(v.norm() < 1e-12 * scale.max(1.0), "{v}");
    }
    let v = p_func(a, b, cx(0.1, 0.2), cx(-0.4, 0.3), ctx).unwrap();
    assert!(v.norm() > 1e-6);
}

#[test]
fn g_with_equal_a3_a4_is_one() {
    let st = state(4);
    let g = g_func([st.c[0], st.c[1], st.c[2], st.c[2]], st.eta, &st.ctx).unwrap();
    assert!((g - 1.0).norm() < 1e-13);
}

#[test]
fn q_is_finite_and_linear() {
    let st = state(5);
    let a = [st.c[0], st.c[1], st.c[2], st.c[3], st.c[4]];
    let q = |x: Complex64| q_func(a, st.eta, x, &st.ctx).unwrap();
    let (q0, q1, q2) = (q(cx(0.0, 0.0)), q(cx(1.0, 0.0)), q(cx(2.0, 0.0)));
    assert!(q0.is_finite() && q1.is_finite());
    assert!((q2 - 2.0 * q1 + q0).norm() < 1e-12 * q1.norm().max(1.0));
}

#[test]
fn rcg_round_trip() {
    for seed in 0..10 {
        let (p, x, y) = rcg(seed);
        let (p2, xt, yt) = rcg_step(&p, &x, &y).unwrap();
        let (p3, xb, yb) = rcg_step_inverse(&p2, &xt, &yt).unwrap();
        assert!((p3.z0 - p.z0).norm() < 1e-14);
        assert!(xb.chordal(&x) < 1e-10 && yb.chordal(&y) < 1e-10);
    }
}

#[test]
fn rcg_with_zero_gammas_matches_direct_substitution() {
    let (mut p, x, y) = rcg(6);
    p.gamma_e = cx(0.0, 0.0);
    p.gamma_o = cx(0.0, 0.0);
    let (_, _, yt) = rcg_step(&p, &x, &y).unwrap();
    let j = p.ctx.jacobi(p.z0).unwrap();
    let k2 = p.ctx.k * p.ctx.k;
    let (sz, cz, dz) = (j.sn, j.cn, j.dn);
    let (x, y) = (x.affine().unwrap(), y.affine().unwrap());
    let one = Complex64::new(1.0, 0.0);
    let num = (one - k2 * sz.powi(4)) * x * y - (one - cz * cz) * cz * dz - cz * dz * x * x;
    let den = k2 * (one - cz * cz) * cz * dz * x * x * y - (one - k2 * sz.powi(4)) * x + cz * dz * y;
    assert!(yt.chordal(&ProjectiveValue::finite(num / den)) < 1e-12);
}

#[test]
fn rcg_embedding_round_trip_and_base_points() {
    for seed in 0..10 {
        let (p, x, y) = rcg(seed);
        let st = embed_rcg(&p, x, y);
        let back = specialize(&st, 1e-12).unwrap();
        assert!((back.z0 - p.z0).norm() < 1e-13);
        assert!((back.gamma_e - p.gamma_e).norm() < 1e-13);
        assert!((back.gamma_o - p.gamma_o).norm() < 1e-13);
        // the generic base points are the listed RCG points up to relabelling
        let generic = base_points(&st.c, st.eta, &st.ctx).unwrap();
        for (px, py) in p.base_points() {
            let hit = generic.points.iter().any(|(gx, gy)| gx.chordal(&px) < 1e-12 && gy.chordal(&py) < 1e-12);
            assert!(hit);
        }
    }
    assert!(matches!(specialize(&state(1), 1e-9), Err(PainleveError::NotOnSubspace(_))));
}

#[test]
fn rcg_matches_r_j1_word() {
    for seed in 0..10 {
        let (p, x, y) = rcg(seed);
        let st = embed_rcg(&p, x, y);
        let word = apply_word(&Word::r_j1(), &st).unwrap();
        let moved = specialize(&word, 1e-9).unwrap();
        let kap = p.ctx.kappa();
        let (w1, w2) = p.ctx.periods();
        let expected = p.z0 + 2.0 * (p.gamma_e + p.gamma_o) - 2.0 * kap;
        assert!(e8p_core::elliptic::lattice_residue(moved.z0 - expected, w1, w2).norm() < 1e-12);
        assert!((moved.z0 - expected).norm() < 1e-12);
        let (_, xt, yt) = rcg_step(&p, &x, &y).unwrap();
        assert!(word.x.chordal(&xt) < 1e-10 && word.y.chordal(&yt) < 1e-10);
    }
}

#[test]
fn tj1_parameter_advance() {
    let st = state(7);
    let o = tj1_step(&st).unwrap();
    let (lam, kap) = (st.lambda(), st.ctx.kappa());
    for i in 0..4 {
        assert!((o.c[i] - (st.c[i] - lam)).norm() < 1e-14);
        assert!((o.c[i + 4] - (st.c[i + 4] + lam - 4.0 * kap)).norm() < 1e-13);
    }
    assert!((o.eta - (st.eta + lam - 2.0 * kap)).norm() < 1e-13);
    // λ moves by -8κ, a period
    assert!((o.lambda() - (lam - 8.0 * kap)).norm() < 1e-12);
}

#[test]
fn tj1_matches_word() {
    for seed in 0..10 {
        let c = compare_with_word(&EquationState::Tj1(dd(&state(seed))), 1).unwrap();
        assert!(c.deviation.max() < 1e-20, "{seed}: {:?}", c.deviation);
    }
}

#[test]
fn intermediate_point_is_r_j1() {
    let st = state(8);
    let (xt, yt) = rj1_coordinates(&st).unwrap();
    let w = apply_word(&Word::r_j1(), &st).unwrap();
    assert!(w.x.chordal(&xt) < 1e-9 && w.y.chordal(&yt) < 1e-9);
}

#[test]
fn msy_matches_word() {
    for seed in 0..10 {
        let st = state(seed);
        let o = msy_step(&st).unwrap();
        assert_eq!(o.c, st.c);
        assert!((o.eta - (st.eta + st.lambda())).norm() < 1e-14);
        let c = compare_with_word(&EquationState::Msy(dd(&st)), 1).unwrap();
        assert!(c.deviation.max() < 1e-20, "{seed}: {:?}", c.deviation);
    }
}

#[test]
fn msy_pr_matches_r_j2_on_subspace() {
    for seed in 0..10 {
        let m = msypr(seed);
        let full = m.surface();
        let word = apply_word(&Word::r_j2(), &full).unwrap();
        // (x, y) ↦ (x̃, x) with c fixed and η advanced by λ/2
        assert!(word.y.chordal(&full.x) < 1e-12);
        assert!(exact_deviation(&word, &m.step().unwrap().surface()).max() < 1e-10);
        let again = MsyPrParams::from_state(&m.step().unwrap().surface(), 1e-12).unwrap();
        assert_eq!(again.0.c, full.c[..4]);
    }
}

#[test]
fn square_laws() {
    for seed in 0..10 {
        let (p, x, y) = rcg(seed);
        let r = EquationState::Rcg { params: p, x, y };
        let two = r.steps(2).unwrap().surface();
        let one = tj1_step(&r.surface()).unwrap();
        assert!(equivalence_deviation(&two, &one).max() < 1e-10);

        let m = msypr(seed);
        let two = m.steps(2).unwrap().surface();
        let one = msy_step(&m.surface()).unwrap();
        assert!(exact_deviation(&two, &one).max() < 1e-10);
    }
}

#[test]
fn tj1_orbit_matches_repeated_word() {
    let st = dd(&state(9));
    let n = 5;
    let closed = EquationState::Tj1(st.clone()).steps(n).unwrap().surface();
    let word = apply_word(&Word::t_j1().pow(n), &st).unwrap();
    assert!(exact_deviation(&closed, &word).max() < n as f64 * 1e-20);
    let (w1, w2) = st.ctx.periods();
    let d = e8p_core::elliptic::lattice_residue(closed.lambda() - st.lambda(), w1, w2);
    assert!(e8p_core::scalar::cabs_f64(d) < 1e-25);
}

#[test]
fn orbit_records_stay_coherent() {
    for eq in [
        EquationState::Tj1(state(10)),
        EquationState::Msy(state(10)),
        msypr(10),
        EquationState::Rcg { params: rcg(10).0, x: rcg(10).1, y: rcg(10).2 },
    ] {
        let orbit = iterate(&eq, 5, None);
        assert!(orbit.error.is_none());
        let recs = orbit.records;
        assert_eq!(recs.len(), 5);
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.step, i + 1);
            assert!(r.residual < 1e-8, "{} {}", eq.equation(), r.residual);
        }
        assert_eq!(recs[0].rcg.is_some(), eq.equation() == Equation::Rcg);
        assert_eq!(eq.steps(5).unwrap().record(5), recs[4]);
    }
}

#[test]
fn zero_steps_give_no_records() {
    let o = iterate(&EquationState::Msy(state(13)), 0, None);
    assert!(o.records.is_empty() && o.error.is_none());
}

#[test]
fn singular_step_and_perturbed_retry() {
    // x sitting on the indeterminacy of s2 inside the word makes the closed form singular
    let mut st = state(14);
    st.c[1] = st.c[0];
    let o = iterate(&EquationState::Tj1(st.clone()), 3, None);
    let (at, _) = o.error.expect("singular");
    assert_eq!(at, 1);
    assert!(o.records.is_empty());
    let p = EquationState::Tj1(st).perturbed(1e-3);
    match p {
        EquationState::Tj1(s) => assert!((s.x.affine().unwrap() - state(14).x.affine().unwrap()).norm() > 9e-4),
        _ => unreachable!(),
    }
}

#[test]
fn words_keep_base_points_on_curve() {
    let mut rng = sample_rng(11, 0);
    for _ in 0..20 {
        let st = random_state::<f64, _>(&mut rng, 1e-12);
        let len = rng.random_range(0..=10);
        let w = Word::new(
            (0..len)
                .map(|_| {
                    if rng.random_bool(0.75) {
                        Generator::S(rng.random_range(0..9))
                    } else {
                        Generator::Iota(rng.random_range(1..5))
                    }
                })
                .collect(),
        );
        if let Ok(o) = apply_word(&w, &st) {
            assert!(pencil_residual(&o) < 1e-10, "{w}");
        }
    }
}

#[test]
fn generators_keep_base_points_on_curve() {
    for g in (0..9).map(Generator::S).chain((1..5).map(Generator::Iota)) {
        for seed in 0..20 {
            let o = apply_generator(g, &state(seed)).unwrap();
            assert!(pencil_residual(&o) < 1e-10);
        }
    }
}

#[test]
fn equation_names() {
    for e in Equation::ALL {
        assert_eq!(e.as_str().parse::<Equation>().unwrap(), e);
    }
    assert_eq!("MSY_PR".parse::<Equation>().unwrap(), Equation::Msypr);
    assert!("xyz".parse::<Equation>().is_err());
}

#[test]
fn record_serialization() {
    let recs = iterate(&EquationState::Tj1(state(12)), 1, None).records;
    let s = serde_json::to_string(&recs[0]).unwrap();
    let back: OrbitRecord = serde_json::from_str(&s).unwrap();
    assert_eq!(back, recs[0]);
    assert!(!s.contains("rcg"));
}

fn arb_params() -> impl Strategy<Value = (f64, [Complex64; 8], Complex64)> {
    let p = (-0.2f64..0.2, 0.1f64..0.5).prop_map(|(a, b)| Complex64::new(a, b));
    (0.2f64..0.8, prop::array::uniform8(p.clone()), p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn base_points_on_curve_prop((k, c, eta) in arb_params()) {
        let ctx = EllipticContext::new(cx(k, 0.0), 1e-12).unwrap();
        let c: [Cx<f64>; 8] = c.map(from_c64);
        let bp = base_points(&c, eta, &ctx);
        prop_assume!(bp.is_ok());
        prop_assert!(bp.unwrap().max_residual(eta, &ctx) < 1e-10);
    }

    #[test]
    fn rcg_inverse_prop((k, c, _eta) in arb_params(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let ctx = EllipticContext::new(cx(k, 0.0), 1e-12).unwrap();
        let p = RcgParams { gamma_e: c[0], gamma_o: c[1], z0: c[2], ctx };
        let (x, y) = (ProjectiveValue::finite(cx(x, 0.3)), ProjectiveValue::finite(cx(y, -0.2)));
        let fwd = rcg_step(&p, &x, &y);
        prop_assume!(fwd.is_ok());
        let (p2, xt, yt) = fwd.unwrap();
        let back = rcg_step_inverse(&p2, &xt, &yt);
        prop_assume!(back.is_ok());
        let (_, xb, yb) = back.unwrap();
        prop_assert!(xb.chordal(&x) < 1e-7 && yb.chordal(&y) < 1e-7);
    }
}
