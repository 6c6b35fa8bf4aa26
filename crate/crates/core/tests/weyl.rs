use e8p_core::scalar::{cx, from_c64, Cx};
use e8p_core::weyl::*;
use e8p_core::{DoubleDouble, EllipticContext, Generator, ProjectiveValue, Word};
use num_complex::Complex64;
use proptest::prelude::*;

fn state(seed: u64) -> SurfaceState<f64> {
    random_state(&mut sample_rng(seed, 0), 1e-12)
}

fn sum(c: &[Complex64]) -> Complex64 {
    c.iter().sum()
}

#[test]
fn s1_swaps_and_negates_eta() {
    let st = state(1);
    let o = apply_generator(Generator::S(1), &st).unwrap();
    assert_eq!(o.x, st.y);
    assert_eq!(o.y, st.x);
    assert_eq!(o.eta, -st.eta);
    assert_eq!(o.c, st.c);
}

#[test]
fn s2_parameter_shifts() {
    let st = state(2);
    let o = apply_generator(Generator::S(2), &st).unwrap();
    let t = 2.0 * st.eta + st.c[0] + st.c[1];
    assert!((o.eta - (st.eta - t / 4.0)).norm() < 1e-15);
    assert!((o.c[0] - (st.c[0] - 0.75 * t)).norm() < 1e-15);
    assert!((o.c[1] - (st.c[1] - 0.75 * t)).norm() < 1e-15);
    for i in 2..8 {
        assert!((o.c[i] - (st.c[i] + t / 4.0)).norm() < 1e-15);
    }
    assert_eq!(o.x, st.x);
    assert!((o.lambda() - st.lambda()).norm() < 1e-15);
}

#[test]
fn iota3_example() {
    let st = state(3);
    let o = apply_generator(Generator::Iota(3), &st).unwrap();
    let k = st.ctx.big_k;
    for i in 0..8 {
        assert!((o.c[i] - (st.c[i] - k)).norm() < 1e-15);
    }
    assert!((o.eta - (st.eta - k)).norm() < 1e-15);
    assert_eq!(o.x, st.x.neg());
    assert_eq!(o.y, st.y);
}

#[test]
fn s2_fixed_locus() {
    // 2η + c1 + c2 = 0 makes the parameter shifts vanish
    let mut st = state(4);
    st.eta = -(st.c[0] + st.c[1]) / 2.0;
    let o = apply_generator(Generator::S(2), &st).unwrap();
    assert!(exact_deviation(&o, &st).max() < 1e-12, "{:?}", exact_deviation(&o, &st));
}

#[test]
fn s2_degenerate_when_anchor_values_coincide() {
    let mut st = state(5);
    st.c[1] = st.c[0];
    assert_eq!(solve_s2_y(&st), Err(WeylError::MoebiusDegenerate));
}

#[test]
fn s2_is_an_involution() {
    for seed in 0..10 {
        let st = state(seed);
        let twice = apply_word(&"s2 s2".parse().unwrap(), &st).unwrap();
        assert!(exact_deviation(&twice, &st).max() < 1e-11);
    }
}

#[test]
fn g_is_constant() {
    for seed in 0..10 {
        let st = state(seed);
        let g0 = s2_invariant(&st, cx(0.0, 0.0));
        for z in [st.c[2], cx(0.31, -0.12), st.eta] {
            let gz = s2_invariant(&st, z);
            let v0 = g0.n / g0.d;
            let vz = gz.n / gz.d;
            assert!((v0 - vz).norm() < 1e-10 * v0.norm().max(1.0), "{v0} {vz}");
        }
    }
}

#[test]
fn empty_word_is_identity() {
    let st = state(6);
    assert_eq!(apply_word(&Word::empty(), &st).unwrap(), st);
}

#[test]
fn errors_carry_word_position() {
    let mut st = state(7);
    st.c[1] = st.c[0];
    let err = apply_word(&"s5 s6 s2".parse().unwrap(), &st).unwrap_err();
    match err {
        WeylError::AtPosition { position, symbol, .. } => {
            assert_eq!(position, 2);
            assert_eq!(symbol, Generator::S(2));
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn r_j1_parameter_map() {
    for seed in 0..5 {
        let st = state(seed);
        let o = apply_word(&Word::r_j1(), &st).unwrap();
        let kap = st.ctx.kappa();
        let (a, b) = (sum(&st.c[..4]), sum(&st.c[4..]));
        for i in 0..4 {
            assert!((o.c[i] - (-st.c[i] + (a - b) / 4.0 - kap)).norm() < 1e-12);
            assert!((o.c[i + 4] - (-st.c[i + 4] + (a + 3.0 * b) / 4.0 - kap)).norm() < 1e-12);
        }
        assert!((o.eta - (st.eta + st.lambda() / 2.0)).norm() < 1e-12);
    }
}

#[test]
fn t_j1_parameter_map() {
    for seed in 0..5 {
        let st = state(seed);
        let o = apply_word(&Word::t_j1(), &st).unwrap();
        let (kap, lam) = (st.ctx.kappa(), st.lambda());
        for i in 0..4 {
            assert!((o.c[i] - (st.c[i] - lam)).norm() < 1e-11);
            assert!((o.c[i + 4] - (st.c[i + 4] + lam - 4.0 * kap)).norm() < 1e-11);
        }
        assert!((o.eta - (st.eta + lam - 2.0 * kap)).norm() < 1e-11);
    }
}

#[test]
fn t_j1_displayed_map_agrees_modulo_periods() {
    let st = state(8);
    let o = apply_word(&Word::t_j1(), &st).unwrap();
    let (kap, lam) = (st.ctx.kappa(), st.lambda());
    let mut displayed = st.clone();
    let mut reduced = st.clone();
    for i in 0..4 {
        displayed.c[i] -= lam;
        displayed.c[i + 4] += lam + 4.0 * kap;
        reduced.c[i] -= lam;
        reduced.c[i + 4] += lam;
    }
    displayed.eta += lam - 2.0 * kap;
    reduced.eta += lam;
    displayed.x = o.x;
    displayed.y = o.y;
    reduced.x = o.x;
    reduced.y = o.y;
    assert!(period_deviation(&o, &displayed).max() < 1e-12);
    assert!(period_deviation(&o, &reduced).max() < 1e-12);
    assert!(exact_deviation(&o, &displayed).parameters > 1.0);
}

#[test]
fn t_j2_parameter_map() {
    let st = state(9);
    let o = apply_word(&Word::t_j2(), &st).unwrap();
    for i in 0..8 {
        assert!((o.c[i] - st.c[i]).norm() < 1e-12);
    }
    assert!((o.eta - (st.eta + st.lambda())).norm() < 1e-12);
}

#[test]
fn normalize_examples() {
    let st = state(10);
    let mut shifted = st.clone();
    shifted.c[0] += 4.0 * st.ctx.big_k;
    let n = normalize_periods(&shifted);
    assert!(period_deviation(&n, &st).max() < 1e-13);
    assert!((n.c[0] - normalize_periods(&st).c[0]).norm() < 1e-13);
    let same = normalize_periods(&st);
    for i in 0..8 {
        assert!((same.c[i] - st.c[i]).norm() < 1e-15);
    }
}

#[test]
fn lambda_changes() {
    let st = state(11);
    let kp = st.ctx.big_kprime;
    let k = st.ctx.big_k;
    for g in 0..9 {
        let o = apply_generator(Generator::S(g), &st).unwrap();
        assert!((o.sum_c() - st.sum_c()).norm() < 1e-14);
    }
    for (i, shift) in [(1, cx::<f64>(0.0, -2.0) * kp), (2, cx::<f64>(0.0, -2.0) * kp), (3, -4.0 * k), (4, -4.0 * k)] {
        let o = apply_generator(Generator::Iota(i), &st).unwrap();
        assert!((o.lambda() - st.lambda() - shift).norm() < 1e-13);
    }
}

#[test]
fn relations_at_binary64() {
    let r = verify_extended_relations::<f64>(20, 11, 1e-9);
    assert_eq!(r.relations.len(), 45 + 10 + 28 + 4 + 4);
    assert!(r.all_passed(), "{:?}", r.relations.iter().filter(|x| !x.passed).collect::<Vec<_>>());
}

#[test]
fn relations_at_extended_precision() {
    let r = verify_extended_relations::<DoubleDouble>(3, 12, 1e-20);
    assert!(r.all_passed(), "max {}", r.max_deviation());
}

#[test]
fn extended_state_tracks_binary64_state() {
    let st = state(13);
    let hi: SurfaceState<DoubleDouble> = st.convert().unwrap();
    let a = apply_word(&Word::r_j1(), &st).unwrap();
    let b = apply_word(&Word::r_j1(), &hi).unwrap().convert::<f64>().unwrap();
    assert!(exact_deviation(&a, &b).max() < 1e-9);
}

#[test]
fn point_at_infinity_is_a_legal_coordinate() {
    let mut st = state(14);
    st.x = ProjectiveValue::infinity();
    let o = apply_word(&Word::r_j2(), &st).unwrap();
    let back = apply_word(&Word::r_j2().inverse(), &o).unwrap();
    assert!(exact_deviation(&back, &st).max() < 1e-9);
}

fn arb_state() -> impl Strategy<Value = SurfaceState<f64>> {
    let p = (-0.2f64..0.2, 0.1f64..0.5).prop_map(|(a, b)| Complex64::new(a, b));
    let xy = (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b));
    (0.2f64..0.8, prop::array::uniform8(p.clone()), p, xy.clone(), xy).prop_map(|(k, c, eta, x, y)| {
        let ctx = EllipticContext::new(cx(k, 0.0), 1e-12).unwrap();
        let w = from_c64::<f64>;
        SurfaceState::new(c.map(w), w(eta), ProjectiveValue::finite(x), ProjectiveValue::finite(y), ctx)
    })
}

fn arb_word() -> impl Strategy<Value = Word> {
    let g = prop_oneof![(0u8..9).prop_map(Generator::S), (1u8..5).prop_map(Generator::Iota)];
    prop::collection::vec(g, 0..12).prop_map(Word::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_word_round_trip(st in arb_state(), w in arb_word()) {
        let fwd = apply_word(&w, &st);
        prop_assume!(fwd.is_ok());
        let back = apply_word(&w.inverse(), &fwd.unwrap());
        prop_assume!(back.is_ok());
        let d = equivalence_deviation(&back.unwrap(), &st);
        prop_assert!(d.parameters < 1e-12 && d.coordinates < 1e-7, "{:?}", d);
    }

    #[test]
    fn s_generators_preserve_sum(st in arb_state(), g in 0u8..9) {
        let o = apply_generator(Generator::S(g), &st);
        prop_assume!(o.is_ok());
        let d: Cx<f64> = o.unwrap().sum_c() - st.sum_c();
        prop_assert!(d.norm() < 1e-13);
    }
}
