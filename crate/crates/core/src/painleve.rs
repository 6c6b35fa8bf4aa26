//! Closed-form elliptic Painlevé maps (RCG, TJ1, MSY and its projective reduction), their base
//! points and invariant curve, and comparison against word composition.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elliptic::{lattice_residue, EllipticContext, EllipticError};
use crate::projective::{cross_ratio, solve_cross_ratio, ProjectiveValue, Ratio};
use crate::scalar::{cabs, creal, imag_unit, to_c64, Cx, Real};
use crate::weyl::{apply_word, equivalence_deviation, StateDeviation, SurfaceState, WeylError};
use crate::word::Word;

/// Two base points closer than this (chordal, both coordinates) count as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PainleveError {
    #[error("map is singular: {0}")]
    MapSingular(&'static str),
    #[error("base points p{0} and p{1} coincide")]
    DegenerateConfiguration(usize, usize),
    #[error("state is not on the constrained subspace: {0}")]
    NotOnSubspace(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

fn half<R: Real>() -> R {
    R::from_f64(0.5)
}

fn sum<R: Real>(c: &[Cx<R>]) -> Cx<R> {
    c.iter().fold(Complex::zero(), |a, b| a + b)
}

// ---------------------------------------------------------------------------------------------
// base points and the curve

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasePointSet<R: Real> {
    pub points: [(ProjectiveValue<R>, ProjectiveValue<R>); 8],
}

impl<R: Real> BasePointSet<R> {
    pub fn max_residual(&self, eta: Cx<R>, ctx: &EllipticContext<R>) -> f64 {
        self.points.iter().map(|(x, y)| curve_residual(x, y, eta, ctx)).fold(0.0, f64::max)
    }
}

/// `p_i = (cd(c_i + η), cd(η − c_i))`.
pub fn base_points<R: Real>(
    c: &[Cx<R>; 8],
    eta: Cx<R>,
    ctx: &EllipticContext<R>,
) -> Result<BasePointSet<R>, PainleveError> {
    let points: [(ProjectiveValue<R>, ProjectiveValue<R>); 8] =
        std::array::from_fn(|i| (ctx.cd_projective(c[i] + eta), ctx.cd_projective(eta - c[i])));
    for i in 0..8 {
        for j in i + 1..8 {
            let (a, b) = (&points[i], &points[j]);
            if a.0.chordal(&b.0) < COINCIDENCE_TOL && a.1.chordal(&b.1) < COINCIDENCE_TOL {
                return Err(PainleveError::DegenerateConfiguration(i + 1, j + 1));
            }
        }
    }
    Ok(BasePointSet { points })
}

/// Residual of `sn(2η)^2 (1 + k^2 x^2 y^2) + 2 cn(2η) dn(2η) x y − (x^2 + y^2) = 0`.
///
/// The equation is multiplied through by `k Θ(2η)^2` and by `xd^2 yd^2`, so poles of the
/// coefficients and points at infinity need no special handling. The result is relative to
/// the largest monomial.
pub fn curve_residual<R: Real>(
    x: &ProjectiveValue<R>,
    y: &ProjectiveValue<R>,
    eta: Cx<R>,
    ctx: &EllipticContext<R>,
) -> f64 {
    let t = ctx.theta_reduced(eta.scale(R::from_f64(2.0)));
    let k = ctx.k;
    let sk = ctx.sqrt_k();
    let (xn, xd, yn, yd) = (x.num(), x.den(), y.num(), y.den());
    let h2 = t.h * t.h;
    let terms = [
        h2 * xd * xd * yd * yd,
        h2 * k * k * xn * xn * yn * yn,
        Complex::new(R::from_f64(2.0), R::zero()) * ctx.kprime * sk * t.h1 * t.theta1 * xn * xd * yn * yd,
        -(k * t.theta * t.theta * xn * xn * yd * yd),
        -(k * t.theta * t.theta * yn * yn * xd * xd),
    ];
    let total: Cx<R> = terms.iter().fold(Complex::zero(), |a, b| a + b);
    let scale: R = terms.iter().map(|z| cabs(*z)).fold(R::zero(), |a, b| a.max(b));
    if scale.is_zero() {
        return 0.0;
    }
    (cabs(total) / scale).to_f64()
}

/// Largest curve residual over the base points of a state.
pub fn pencil_residual<R: Real>(st: &SurfaceState<R>) -> f64 {
    let pts: [(ProjectiveValue<R>, ProjectiveValue<R>); 8] =
        std::array::from_fn(|i| (st.ctx.cd_projective(st.c[i] + st.eta), st.ctx.cd_projective(st.eta - st.c[i])));
    BasePointSet { points: pts }.max_residual(st.eta, &st.ctx)
}

// ---------------------------------------------------------------------------------------------
// G, Q, P

/// `(cd q − cd p) / (cd q − cd r)`, i.e. `(1 − cd p / cd q) / (1 − cd r / cd q)`.
fn rat<R: Real>(ctx: &EllipticContext<R>, q: Cx<R>, p: Cx<R>, r: Cx<R>) -> Ratio<R> {
    cross_ratio(&ctx.cd_projective(q), &ctx.cd_projective(p), &ctx.cd_projective(r))
}

/// `G(a1, a2, a3, a4, b)` as a ratio; the four factors are cross-ratios of `cd` values.
pub fn g_ratio<R: Real>(a: [Cx<R>; 4], b: Cx<R>, ctx: &EllipticContext<R>) -> Ratio<R> {
    let [a1, a2, a3, a4] = a;
    let h = (a1 + a2).scale(half());
    let s = (a1 + a2 + a3 + a4).scale(half());
    rat(ctx, a2 + h, a4 + h, a3 + h)
        * rat(ctx, b - a1, b - a4, b - a3)
        * rat(ctx, b + a2 + s, b + a4 - s, b + a3 - s)
        * rat(ctx, b.scale(R::from_f64(2.0)) + a2 - h, a3 + h, a4 + h)
}

pub fn g_func<R: Real>(a: [Cx<R>; 4], b: Cx<R>, ctx: &EllipticContext<R>) -> Result<Cx<R>, EllipticError> {
    g_ratio(a, b, ctx).get().ok_or(EllipticError::PoleEncountered { function: "G", re: to_c64(b).re, im: to_c64(b).im })
}

/// `Q(a1..a5, b; X) = q0 + q1 X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QCoefficients<R: Real> {
    pub q0: Cx<R>,
    pub q1: Cx<R>,
}

impl<R: Real> QCoefficients<R> {
    pub fn new(a: [Cx<R>; 5], b: Cx<R>, ctx: &EllipticContext<R>) -> Result<Self, EllipticError> {
        let [a1, a2, a3, a4, a5] = a;
        let h5 = a5.scale(half());
        let cd = |u: Cx<R>| ctx.cd(u);
        let m3 = cd(b + a3 - h5)?;
        let (p1, p2, p4) = (cd(b + a1 + h5)?, cd(b + a2 + h5)?, cd(b + a4 + h5)?);
        let (d1, d2, d4) = (cd(b + a1)?, cd(b + a2)?, cd(b + a4)?);
        let ta = (m3 - p2) * (p1 - p4);
        let tb = (m3 - p1) * (p4 - p2);
        let tc = (m3 - p4) * (p1 - p2);
        Ok(QCoefficients { q0: ta * d4 * d1 + tb * d4 * d2 - tc * d1 * d2, q1: ta * d2 + tb * d1 - tc * d4 })
    }

    pub fn eval(&self, x: Cx<R>) -> Cx<R> {
        self.q0 + self.q1 * x
    }

    /// `Q(X) · Xd`.
    pub fn eval_h(&self, x: &ProjectiveValue<R>) -> Cx<R> {
        self.q0 * x.den() + self.q1 * x.num()
    }
}

pub fn q_func<R: Real>(a: [Cx<R>; 5], b: Cx<R>, x: Cx<R>, ctx: &EllipticContext<R>) -> Result<Cx<R>, EllipticError> {
    Ok(QCoefficients::new(a, b, ctx)?.eval(x))
}

/// `P(a1, a2, a3, b; X, Y) = C1 X Y + C2 X + C3 Y + C4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PCoefficients<R: Real>(pub [Cx<R>; 4]);

impl<R: Real> PCoefficients<R> {
    pub fn new(a: [Cx<R>; 3], b: Cx<R>, ctx: &EllipticContext<R>) -> Result<Self, EllipticError> {
        let [a1, a2, a3] = a;
        let (m1, m2, m3) = (ctx.cd(b - a1)?, ctx.cd(b - a2)?, ctx.cd(b - a3)?);
        let (p1, p2, p3) = (ctx.cd(b + a1)?, ctx.cd(b + a2)?, ctx.cd(b + a3)?);
        let c1 = (m3 - m2) * p1 + (m1 - m3) * p2 + (m2 - m1) * p3;
        let c2 = (m2 - m3) * m1 * p1 + (m3 - m1) * m2 * p2 + (m1 - m2) * m3 * p3;
        let c3 = (p3 - p2) * m1 * p1 + (p1 - p3) * m2 * p2 + (p2 - p1) * m3 * p3;
        let c4 = (p2 * m3 - m2 * p3) * m1 * p1 + (p3 * m1 - m3 * p1) * m2 * p2 + (p1 * m2 - m1 * p2) * m3 * p3;
        Ok(PCoefficients([c1, c2, c3, c4]))
    }

    pub fn eval(&self, x: Cx<R>, y: Cx<R>) -> Cx<R> {
        let [c1, c2, c3, c4] = self.0;
        c1 * x * y + c2 * x + c3 * y + c4
    }

    /// `P(X, Y) · Xd · Yd`.
    pub fn eval_h(&self, x: &ProjectiveValue<R>, y: &ProjectiveValue<R>) -> Cx<R> {
        let [c1, c2, c3, c4] = self.0;
        let (xn, xd, yn, yd) = (x.num(), x.den(), y.num(), y.den());
        c1 * xn * yn + c2 * xn * yd + c3 * xd * yn + c4 * xd * yd
    }
}

pub fn p_func<R: Real>(
    a: [Cx<R>; 3],
    b: Cx<R>,
    x: Cx<R>,
    y: Cx<R>,
    ctx: &EllipticContext<R>,
) -> Result<Cx<R>, EllipticError> {
    Ok(PCoefficients::new(a, b, ctx)?.eval(x, y))
}

// ---------------------------------------------------------------------------------------------
// relation solving

/// `(k cd(p) Y + 1) / (k cd(q) Y + 1)`.
fn kd_ratio<R: Real>(ctx: &EllipticContext<R>, p: Cx<R>, q: Cx<R>, y: &ProjectiveValue<R>) -> Ratio<R> {
    let (cp, cq) = (ctx.cd_projective(p), ctx.cd_projective(q));
    let n = (ctx.k * cp.num() * y.num() + cp.den() * y.den()) * cq.den();
    let d = (ctx.k * cq.num() * y.num() + cq.den() * y.den()) * cp.den();
    Ratio::new(n, d)
}

/// Solves `(k cd(p) Y + 1) / (k cd(q) Y + 1) = r` for `Y`.
fn solve_kd<R: Real>(
    ctx: &EllipticContext<R>,
    p: Cx<R>,
    q: Cx<R>,
    r: Ratio<R>,
    stage: &'static str,
) -> Result<ProjectiveValue<R>, PainleveError> {
    if r.is_indeterminate(R::one()) {
        return Err(PainleveError::MapSingular(stage));
    }
    let (cp, cq) = (ctx.cd_projective(p), ctx.cd_projective(q));
    let num = cp.den() * cq.den() * (r.n - r.d);
    let den = ctx.k * (cp.num() * cq.den() * r.d - cq.num() * cp.den() * r.n);
    ProjectiveValue::new(num, den).ok_or(PainleveError::MapSingular(stage))
}

/// Solves `(Y − cd a) / (Y − cd b) = r` for `Y`.
fn solve_cd<R: Real>(
    ctx: &EllipticContext<R>,
    a: Cx<R>,
    b: Cx<R>,
    r: Ratio<R>,
    stage: &'static str,
) -> Result<ProjectiveValue<R>, PainleveError> {
    if r.is_indeterminate(R::one()) {
        return Err(PainleveError::MapSingular(stage));
    }
    solve_cross_ratio(&ctx.cd_projective(a), &ctx.cd_projective(b), r).ok_or(PainleveError::MapSingular(stage))
}

fn cd_cross<R: Real>(ctx: &EllipticContext<R>, p: &ProjectiveValue<R>, a: Cx<R>, b: Cx<R>) -> Ratio<R> {
    cross_ratio(p, &ctx.cd_projective(a), &ctx.cd_projective(b))
}

/// `−1 / (k Y)`.
fn neg_inv_k<R: Real>(ctx: &EllipticContext<R>, y: &ProjectiveValue<R>) -> ProjectiveValue<R> {
    y.inv_scaled(ctx.k).neg()
}

/// `G(a1..a4, b) · P(a1, a2, a3, b; X, Y) / P(a1, a2, a4, b; X, Y)`.
fn gpp<R: Real>(
    ctx: &EllipticContext<R>,
    a: [Cx<R>; 4],
    b: Cx<R>,
    x: &ProjectiveValue<R>,
    y: &ProjectiveValue<R>,
) -> Result<Ratio<R>, PainleveError> {
    let p3 = PCoefficients::new([a[0], a[1], a[2]], b, ctx)?.eval_h(x, y);
    let p4 = PCoefficients::new([a[0], a[1], a[3]], b, ctx)?.eval_h(x, y);
    Ok(g_ratio(a, b, ctx) * Ratio::new(p3, p4))
}

fn check_finite<R: Real>(st: &SurfaceState<R>) -> Result<(), PainleveError> {
    if st.c.iter().chain([st.eta].iter()).all(|z| crate::scalar::cis_finite(*z)) {
        Ok(())
    } else {
        Err(PainleveError::MapSingular("non-finite parameters"))
    }
}

// ---------------------------------------------------------------------------------------------
// RCG

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcgParams<R: Real> {
    pub gamma_e: Cx<R>,
    pub gamma_o: Cx<R>,
    pub z0: Cx<R>,
    pub ctx: EllipticContext<R>,
}

impl<R: Real> RcgParams<R> {
    /// Parameters after one step: `z0 + 2(γe + γo)`.
    pub fn advanced(&self) -> Self {
        RcgParams { z0: self.z0 + (self.gamma_e + self.gamma_o).scale(R::from_f64(2.0)), ..*self }
    }

    /// Parameters before one step.
    pub fn retreated(&self) -> Self {
        RcgParams { z0: self.z0 - (self.gamma_e + self.gamma_o).scale(R::from_f64(2.0)), ..*self }
    }

    /// The eight base points of the constrained surface, in the order listed for RCG.
    pub fn base_points(&self) -> [(ProjectiveValue<R>, ProjectiveValue<R>); 8] {
        let ctx = &self.ctx;
        let kap = ctx.kappa();
        let ikp = imag_unit::<R>() * ctx.big_kprime;
        let two_k = ctx.big_k.scale(R::from_f64(2.0));
        let shifts = [kap, ikp, two_k, Complex::zero()];
        let w = self.z0 - self.gamma_e - self.gamma_o;
        let mut out = [(ProjectiveValue::infinity(), ProjectiveValue::infinity()); 8];
        for (i, s) in shifts.iter().enumerate() {
            out[i] = (ctx.cd_projective(self.gamma_o + s), ctx.cd_projective(w + s));
            out[i + 4] = (ctx.cd_projective(self.z0 + s), ctx.cd_projective(self.gamma_e + s));
        }
        out
    }
}

/// Full surface data on the subspace `c2 = c1 + 2K, c3 = c1 + iK', c4 = c1 + κ` (and the same
/// for `c5..c8`), with `z0 = η + c5 + κ`, `γe = c5 − η + κ`, `γo = η + c1 + κ`.
pub fn embed_rcg<R: Real>(p: &RcgParams<R>, x: ProjectiveValue<R>, y: ProjectiveValue<R>) -> SurfaceState<R> {
    let ctx = p.ctx;
    let kap = ctx.kappa();
    let eta = (p.z0 - p.gamma_e).scale(half());
    let c5 = p.z0 - eta - kap;
    let c1 = p.gamma_o - eta - kap;
    let two_k = ctx.big_k.scale(R::from_f64(2.0));
    let ikp = imag_unit::<R>() * ctx.big_kprime;
    let c = [c1, c1 + two_k, c1 + ikp, c1 + kap, c5, c5 + two_k, c5 + ikp, c5 + kap];
    SurfaceState::new(c, eta, x, y, ctx)
}

/// Inverse of [`embed_rcg`]. The six constraints are checked modulo the period lattice.
pub fn specialize<R: Real>(st: &SurfaceState<R>, tol: f64) -> Result<RcgParams<R>, PainleveError> {
    let ctx = &st.ctx;
    let kap = ctx.kappa();
    let two_k = ctx.big_k.scale(R::from_f64(2.0));
    let ikp = imag_unit::<R>() * ctx.big_kprime;
    let (w1, w2) = ctx.periods();
    let scale = st.c.iter().fold(R::one(), |m, z| m.max(cabs(*z)));
    for base in [0usize, 4] {
        for (off, shift) in [(1usize, two_k), (2, ikp), (3, kap)] {
            let r = lattice_residue(st.c[base + off] - st.c[base] - shift, w1, w2);
            let dev = (cabs(r) / scale).to_f64();
            if dev > tol {
                return Err(PainleveError::NotOnSubspace(format!(
                    "c{} - c{} is off by {dev:.3e}",
                    base + off + 1,
                    base + 1
                )));
            }
        }
    }
    Ok(RcgParams {
        z0: st.eta + st.c[4] + kap,
        gamma_e: st.c[4] - st.eta + kap,
        gamma_o: st.eta + st.c[0] + kap,
        ctx: *ctx,
    })
}

/// Coefficients `(a, b, c, d)` of one half of the RCG map for given `z` and `γ`.
fn rcg_coefficients<R: Real>(ctx: &EllipticContext<R>, z: Cx<R>, g: Cx<R>) -> Result<[Cx<R>; 4], EllipticError> {
    let jz = ctx.jacobi(z)?;
    let jg = ctx.jacobi(g)?;
    let k2 = ctx.k * ctx.k;
    let one = Complex::<R>::one();
    let sz2 = jz.sn * jz.sn;
    let czdz = jz.cn * jz.dn;
    let a = (one - k2 * sz2 * sz2) * jg.cn * jg.dn;
    let b = (jg.cn * jg.cn - jz.cn * jz.cn) * czdz;
    let c = (one - k2 * jg.sn * jg.sn * sz2) * czdz;
    Ok([a, b, c, k2 * b])
}

/// `(a u v − b − c u^2) / (d u^2 v − a u + c v)` evaluated projectively.
fn rcg_half<R: Real>(
    coef: [Cx<R>; 4],
    u: &ProjectiveValue<R>,
    v: &ProjectiveValue<R>,
    stage: &'static str,
) -> Result<ProjectiveValue<R>, PainleveError> {
    let [a, b, c, d] = coef;
    let (un, ud, vn, vd) = (u.num(), u.den(), v.num(), v.den());
    let num = a * un * vn * ud - b * ud * ud * vd - c * un * un * vd;
    let den = d * un * un * vn - a * un * ud * vd + c * vn * ud * ud;
    ProjectiveValue::new(num, den).ok_or(PainleveError::MapSingular(stage))
}

/// One RCG step: `ỹ` from `(x, y)`, then `x̃` from `(ỹ, x)`; `z0` advances by `2(γe + γo)`.
#[allow(clippy::type_complexity)]
pub fn rcg_step<R: Real>(
    p: &RcgParams<R>,
    x: &ProjectiveValue<R>,
    y: &ProjectiveValue<R>,
) -> Result<(RcgParams<R>, ProjectiveValue<R>, ProjectiveValue<R>), PainleveError> {
    let ctx = &p.ctx;
    let even = rcg_coefficients(ctx, p.z0, p.gamma_e)?;
    let odd = rcg_coefficients(ctx, p.z0 + p.gamma_e + p.gamma_o, p.gamma_o)?;
    let yt = rcg_half(even, x, y, "rcg y-map")?;
    let xt = rcg_half(odd, &yt, x, "rcg x-map")?;
    Ok((p.advanced(), xt, yt))
}

/// Inverse of [`rcg_step`]: takes the advanced parameters and `(x̃, ỹ)`. Each half of the map
/// is an involution in its linear variable, so the same formulas run backwards.
#[allow(clippy::type_complexity)]
pub fn rcg_step_inverse<R: Real>(
    p: &RcgParams<R>,
    xt: &ProjectiveValue<R>,
    yt: &ProjectiveValue<R>,
) -> Result<(RcgParams<R>, ProjectiveValue<R>, ProjectiveValue<R>), PainleveError> {
    let prev = p.retreated();
    let ctx = &p.ctx;
    let even = rcg_coefficients(ctx, prev.z0, prev.gamma_e)?;
    let odd = rcg_coefficients(ctx, prev.z0 + prev.gamma_e + prev.gamma_o, prev.gamma_o)?;
    let x = rcg_half(odd, yt, xt, "rcg inverse x-map")?;
    let y = rcg_half(even, &x, yt, "rcg inverse y-map")?;
    Ok((prev, x, y))
}

// ---------------------------------------------------------------------------------------------
// TJ1

/// The intermediate point `(x̃, ỹ) = R_J1(x, y)` from the two bilinear relations.
pub fn rj1_coordinates<R: Real>(
    st: &SurfaceState<R>,
) -> Result<(ProjectiveValue<R>, ProjectiveValue<R>), PainleveError> {
    check_finite(st)?;
    let ctx = &st.ctx;
    let (c, eta) = (&st.c, st.eta);
    let c1234 = sum(&c[..4]);
    let c5678 = sum(&c[4..]);
    let quarter = R::from_f64(0.25);

    // ỹ from (x, y)
    let rhs = gpp(ctx, [c[4], c[5], c[6], c[7]], eta, &st.x, &st.y)?;
    let known = cd_cross(ctx, &st.x, eta + c[6], eta + c[7]);
    let h = c5678.scale(half());
    let yt = solve_kd(ctx, eta + c[7] - h, eta + c[6] - h, rhs / known, "R_J1 y-relation")?;

    // x̃ from (ỹ, x)
    let e: [Cx<R>; 4] = std::array::from_fn(|i| eta + c[i] + c5678.scale(quarter));
    let b = c5678.scale(quarter);
    let rhs = gpp(ctx, e, b, &neg_inv_k(ctx, &yt), &st.x)?;
    let known = kd_ratio(ctx, eta + c[2] + h, eta + c[3] + h, &yt);
    let h1 = c1234.scale(half());
    let xt = solve_kd(ctx, eta - c[3] + h1, eta - c[2] + h1, rhs / known, "R_J1 x-relation")?;
    Ok((xt, yt))
}

/// One step of the TJ1 equation: `(c_i, c_{i+4}, η) ↦ (c_i − λ, c_{i+4} + λ − 4κ, η + λ − 2κ)`.
pub fn tj1_step<R: Real>(st: &SurfaceState<R>) -> Result<SurfaceState<R>, PainleveError> {
    let ctx = &st.ctx;
    let (xt, yt) = rj1_coordinates(st)?;
    let (c, eta) = (&st.c, st.eta);
    let lam = st.lambda();
    let kap = ctx.kappa();
    let c1234 = sum(&c[..4]);
    let c5678 = sum(&c[4..]);
    let quarter = R::from_f64(0.25);
    let two = R::from_f64(2.0);

    // ȳ from (x̃, ỹ)
    let a: [Cx<R>; 4] = std::array::from_fn(|j| (c5678 - c[j + 4].scale(two) + lam).scale(half()));
    let bb = eta + lam.scale(half()) + kap;
    let rhs = gpp(ctx, a, bb, &xt, &yt)?;
    let shift = c5678.scale(half()) + lam + kap;
    let known = cd_cross(ctx, &xt, eta - c[6] + shift, eta - c[7] + shift);
    let yb = solve_kd(ctx, eta - c[7] + kap, eta - c[6] + kap, rhs / known, "TJ1 y-relation")?;

    // x̄ from (ȳ, x̃)
    let bv: [Cx<R>; 4] = std::array::from_fn(|i| eta - c[i] + c1234.scale(quarter) + lam);
    let bb2 = (c5678 + lam.scale(two)).scale(quarter) + kap;
    let rhs = gpp(ctx, bv, bb2, &neg_inv_k(ctx, &yb), &xt)?;
    let l2 = lam.scale(two);
    let known = kd_ratio(ctx, eta - c[2] + l2 + kap, eta - c[3] + l2 + kap, &yb);
    let xb = solve_kd(ctx, eta + c[3] + kap, eta + c[2] + kap, rhs / known, "TJ1 x-relation")?;

    let four_kap = kap.scale(R::from_f64(4.0));
    let mut out = st.clone();
    for i in 0..4 {
        out.c[i] = c[i] - lam;
        out.c[i + 4] = c[i + 4] + lam - four_kap;
    }
    out.eta = eta + lam - kap.scale(two);
    out.x = xb;
    out.y = yb;
    Ok(out)
}

// ---------------------------------------------------------------------------------------------
// MSY

/// `Q_a(X) / P_124(X, Y) − cross · Q_b(X) / (G · P_123(X, Y))` with the common factor of the
/// homogeneous forms dropped; `args` are `(q_a, q_b, p124, p123, g, cross)`.
#[allow(clippy::too_many_arguments)]
fn bracket<R: Real>(
    qa: &QCoefficients<R>,
    qb: &QCoefficients<R>,
    p124: &PCoefficients<R>,
    p123: &PCoefficients<R>,
    g: Ratio<R>,
    cross: Ratio<R>,
    x: &ProjectiveValue<R>,
    y: &ProjectiveValue<R>,
) -> Ratio<R> {
    let t1 = Ratio::new(qa.eval_h(x), p124.eval_h(x, y));
    let t2 = cross * Ratio::new(qb.eval_h(x), p123.eval_h(x, y)) / g;
    t1 - t2
}

/// The four-factor prefactor shared by the MSY relations for `x̄`.
fn msy_x_prefactor<R: Real>(ctx: &EllipticContext<R>, c: &[Cx<R>; 8], eta: Cx<R>, lam: Cx<R>) -> Ratio<R> {
    let two = R::from_f64(2.0);
    let three = R::from_f64(3.0);
    let c1234 = sum(&c[..4]);
    let d = (c[0] - c[1]).scale(half());
    let m = (c[0] + c[1]).scale(half());
    let e2 = eta.scale(two) + lam.scale(two);
    rat(ctx, eta.scale(three) - c[2] + lam.scale(three), eta + c[0] + lam, eta + c[1] + lam)
        * rat(ctx, c[2] + m, e2 + d, e2 - d)
        * rat(ctx, e2 - c[2] + m, e2 - d, e2 + d)
        * rat(
            ctx,
            eta - c[3] + c1234.scale(half()) + lam,
            eta - c[0] + c1234.scale(half()) + lam,
            eta - c[1] + c1234.scale(half()) + lam,
        )
}

/// One step of the MSY equation: `c` fixed, `η ↦ η + λ`.
pub fn msy_step<R: Real>(st: &SurfaceState<R>) -> Result<SurfaceState<R>, PainleveError> {
    check_finite(st)?;
    let ctx = &st.ctx;
    let (c, eta, x, y) = (&st.c, st.eta, &st.x, &st.y);
    let lam = st.lambda();
    let two = R::from_f64(2.0);
    let three = R::from_f64(3.0);
    let c1234 = sum(&c[..4]);

    // ȳ from (x, y)
    let d = (c[6] - c[7]).scale(half());
    let m = (c[6] + c[7]).scale(half());
    let e2 = eta.scale(two) + lam;
    let f = rat(ctx, eta.scale(three) + c[5] + lam, eta - c[7] + lam, eta - c[6] + lam)
        * rat(ctx, c[5] + m - lam, e2 + d, e2 - d)
        * rat(ctx, e2 + c[5] - m, e2 - d, e2 + d)
        * rat(
            ctx,
            eta + c[4] + c1234.scale(half()),
            eta + c[7] + c1234.scale(half()),
            eta + c[6] + c1234.scale(half()),
        );
    let p124 = PCoefficients::new([c[0], c[1], c[3]], eta, ctx)?;
    let p123 = PCoefficients::new([c[0], c[1], c[2]], eta, ctx)?;
    let g = g_ratio([c[0], c[1], c[2], c[3]], eta, ctx);
    let cross = cd_cross(ctx, x, eta + c[2], eta + c[3]);
    let br = |cc: Cx<R>| -> Result<Ratio<R>, PainleveError> {
        let qa = QCoefficients::new([c[4], c[5], c[2], cc, c1234], eta, ctx)?;
        let qb = QCoefficients::new([c[4], c[5], c[3], cc, c1234], eta, ctx)?;
        Ok(bracket(&qa, &qb, &p124, &p123, g, cross, x, y))
    };
    let rhs = f * (br(c[6])? / br(c[7])?);
    let known = cd_cross(ctx, x, eta + c[6], eta + c[7]);
    let yb = solve_cd(ctx, eta - c[7] + lam, eta - c[6] + lam, rhs / known, "MSY y-relation")?;

    // x̄ from (ȳ, x)
    let h = lam.scale(half());
    let bb = eta + h;
    let hm = |i: usize| h - c[i];
    let p_a = PCoefficients::new([hm(7), hm(6), hm(4)], bb, ctx)?;
    let p_b = PCoefficients::new([hm(7), hm(6), hm(5)], bb, ctx)?;
    let g2 = g_ratio([hm(7), hm(6), hm(5), hm(4)], bb, ctx);
    let cross2 = cd_cross(ctx, &yb, eta - c[5] + lam, eta - c[4] + lam);
    let br2 = |cc: Cx<R>| -> Result<Ratio<R>, PainleveError> {
        let qa = QCoefficients::new([hm(3), hm(2), hm(5), h - cc, c1234], bb, ctx)?;
        let qb = QCoefficients::new([hm(3), hm(2), hm(4), h - cc, c1234], bb, ctx)?;
        Ok(bracket(&qa, &qb, &p_a, &p_b, g2, cross2, &yb, x))
    };
    let rhs = msy_x_prefactor(ctx, c, eta, lam) * (br2(c[1])? / br2(c[0])?);
    let known = cd_cross(ctx, &yb, eta - c[1] + lam, eta - c[0] + lam);
    let xb = solve_cd(ctx, eta + c[0] + lam, eta + c[1] + lam, rhs / known, "MSY x-relation")?;

    let mut out = st.clone();
    out.eta = eta + lam;
    out.x = xb;
    out.y = yb;
    Ok(out)
}

/// Parameters of the projectively reduced MSY map: `c1..c4` and `λ`, with
/// `c5 + c4 = c6 + c3 = c7 + c2 = c8 + c1 = λ/2` imposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsyPrParams<R: Real> {
    pub c: [Cx<R>; 4],
    pub lambda: Cx<R>,
    pub ctx: EllipticContext<R>,
}

impl<R: Real> MsyPrParams<R> {
    pub fn full_parameters(&self) -> [Cx<R>; 8] {
        let h = self.lambda.scale(half());
        let c = self.c;
        [c[0], c[1], c[2], c[3], h - c[3], h - c[2], h - c[1], h - c[0]]
    }

    /// Full state for the pair `(x_prev, x_curr)` at `eta`, the parameter attached to `x_prev`.
    pub fn embed(&self, eta: Cx<R>, x_prev: ProjectiveValue<R>, x_curr: ProjectiveValue<R>) -> SurfaceState<R> {
        SurfaceState::new(self.full_parameters(), eta + self.lambda.scale(half()), x_curr, x_prev, self.ctx)
    }

    /// Reads `(params, eta, x_prev, x_curr)` back from a full state on the subspace.
    #[allow(clippy::type_complexity)]
    pub fn from_state(
        st: &SurfaceState<R>,
        tol: f64,
    ) -> Result<(Self, Cx<R>, ProjectiveValue<R>, ProjectiveValue<R>), PainleveError> {
        let lam = st.lambda();
        let h = lam.scale(half());
        let scale = st.c.iter().fold(R::one(), |m, z| m.max(cabs(*z)));
        for i in 0..4 {
            let dev = (cabs(st.c[i] + st.c[7 - i] - h) / scale).to_f64();
            if dev > tol {
                return Err(PainleveError::NotOnSubspace(format!("c{} + c{} - λ/2 = {dev:.3e}", i + 1, 8 - i)));
            }
        }
        let p = MsyPrParams { c: [st.c[0], st.c[1], st.c[2], st.c[3]], lambda: lam, ctx: st.ctx };
        Ok((p, st.eta - h, st.y, st.x))
    }
}

/// One step of the scalar second-order map: from `(x_prev, x_curr)` at `eta` returns
/// `x_next` and the advanced `eta + λ/2`.
pub fn msy_pr_step<R: Real>(
    p: &MsyPrParams<R>,
    eta: Cx<R>,
    x_prev: &ProjectiveValue<R>,
    x_curr: &ProjectiveValue<R>,
) -> Result<(Cx<R>, ProjectiveValue<R>), PainleveError> {
    let ctx = &p.ctx;
    let c8 = p.full_parameters();
    let c = &p.c;
    let lam = p.lambda;
    let h = lam.scale(half());
    let bb = eta + h;
    let c1234 = sum(c);
    let (x, xt) = (x_prev, x_curr);

    let p124 = PCoefficients::new([c[0], c[1], c[3]], bb, ctx)?;
    let p123 = PCoefficients::new([c[0], c[1], c[2]], bb, ctx)?;
    let g = g_ratio([c[0], c[1], c[2], c[3]], bb, ctx);
    let cross = cd_cross(ctx, xt, eta + c[2] + h, eta + c[3] + h);
    let br = |cc: Cx<R>| -> Result<Ratio<R>, PainleveError> {
        let qa = QCoefficients::new([h - c[3], h - c[2], c[2], h - cc, c1234], bb, ctx)?;
        let qb = QCoefficients::new([h - c[3], h - c[2], c[3], h - cc, c1234], bb, ctx)?;
        Ok(bracket(&qa, &qb, &p124, &p123, g, cross, xt, x))
    };
    let rhs = msy_x_prefactor(ctx, &c8, eta, lam) * (br(c[1])? / br(c[0])?);
    let known = cd_cross(ctx, xt, eta - c[1] + lam, eta - c[0] + lam);
    let next = solve_cd(ctx, eta + c[0] + lam, eta + c[1] + lam, rhs / known, "reduced MSY relation")?;
    Ok((eta + h, next))
}

// ---------------------------------------------------------------------------------------------
// equations, orbits, comparison

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Rcg,
    Tj1,
    Msy,
    Msypr,
}

impl Equation {
    pub const ALL: [Equation; 4] = [Equation::Rcg, Equation::Tj1, Equation::Msy, Equation::Msypr];

    pub fn as_str(self) -> &'static str {
        match self {
            Equation::Rcg => "rcg",
            Equation::Tj1 => "tj1",
            Equation::Msy => "msy",
            Equation::Msypr => "msypr",
        }
    }

    /// The word whose action one closed-form step reproduces.
    pub fn word(self) -> Word {
        match self {
            Equation::Rcg => Word::r_j1(),
            Equation::Tj1 => Word::t_j1(),
            Equation::Msy => Word::t_j2(),
            Equation::Msypr => Word::r_j2(),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Equation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "rcg" => Ok(Equation::Rcg),
            "tj1" => Ok(Equation::Tj1),
            "msy" => Ok(Equation::Msy),
            "msypr" => Ok(Equation::Msypr),
            _ => Err(format!("unknown equation `{s}` (expected rcg, tj1, msy or msypr)")),
        }
    }
}

/// State of one of the four maps.
#[derive(Debug, Clone, PartialEq)]
pub enum EquationState<R: Real> {
    Rcg { params: RcgParams<R>, x: ProjectiveValue<R>, y: ProjectiveValue<R> },
    Tj1(SurfaceState<R>),
    Msy(SurfaceState<R>),
    Msypr { params: MsyPrParams<R>, eta: Cx<R>, x_prev: ProjectiveValue<R>, x_curr: ProjectiveValue<R> },
}

impl<R: Real> EquationState<R> {
    pub fn equation(&self) -> Equation {
        match self {
            EquationState::Rcg { .. } => Equation::Rcg,
            EquationState::Tj1(_) => Equation::Tj1,
            EquationState::Msy(_) => Equation::Msy,
            EquationState::Msypr { .. } => Equation::Msypr,
        }
    }

    /// The full surface data this state stands for.
    pub fn surface(&self) -> SurfaceState<R> {
        match self {
            EquationState::Rcg { params, x, y } => embed_rcg(params, *x, *y),
            EquationState::Tj1(s) | EquationState::Msy(s) => s.clone(),
            EquationState::Msypr { params, eta, x_prev, x_curr } => params.embed(*eta, *x_prev, *x_curr),
        }
    }

    pub fn step(&self) -> Result<Self, PainleveError> {
        Ok(match self {
            EquationState::Rcg { params, x, y } => {
                let (params, x, y) = rcg_step(params, x, y)?;
                EquationState::Rcg { params, x, y }
            }
            EquationState::Tj1(s) => EquationState::Tj1(tj1_step(s)?),
            EquationState::Msy(s) => EquationState::Msy(msy_step(s)?),
            EquationState::Msypr { params, eta, x_prev, x_curr } => {
                let (eta, next) = msy_pr_step(params, *eta, x_prev, x_curr)?;
                EquationState::Msypr { params: *params, eta, x_prev: *x_curr, x_curr: next }
            }
        })
    }

    /// Applies `n` steps.
    pub fn steps(&self, n: usize) -> Result<Self, PainleveError> {
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.step()?;
        }
        Ok(cur)
    }

    /// Moves the current `x` by `eps` in whichever affine chart contains it.
    pub fn perturbed(&self, eps: f64) -> Self {
        let nudge = |p: &ProjectiveValue<R>| {
            let e = creal(R::from_f64(eps));
            match p.affine() {
                Some(z) if cabs(z) <= R::one() => ProjectiveValue::finite(z + e),
                _ => ProjectiveValue::new(p.num(), p.den() + e * p.num()).unwrap_or(*p),
            }
        };
        let mut out = self.clone();
        match &mut out {
            EquationState::Rcg { x, .. } => *x = nudge(x),
            EquationState::Tj1(s) | EquationState::Msy(s) => s.x = nudge(&s.x),
            EquationState::Msypr { x_curr, .. } => *x_curr = nudge(x_curr),
        }
        out
    }

    pub fn record(&self, step: usize) -> OrbitRecord {
        let s = self.surface();
        let pair = |z: Cx<R>| {
            let z = to_c64(z);
            [z.re, z.im]
        };
        let rcg = match self {
            EquationState::Rcg { params, .. } => {
                Some(RcgRecord { gamma_e: pair(params.gamma_e), gamma_o: pair(params.gamma_o), z0: pair(params.z0) })
            }
            _ => None,
        };
        OrbitRecord {
            step,
            c: s.c.map(pair),
            eta: pair(s.eta),
            x: HomogeneousPair::from(&s.x),
            y: HomogeneousPair::from(&s.y),
            residual: pencil_residual(&s),
            lambda: pair(s.lambda()),
            rcg,
        }
    }
}

/// `(num : den)` as `(re, im)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousPair {
    pub num: [f64; 2],
    pub den: [f64; 2],
}

impl HomogeneousPair {
    /// Affine value, `None` at infinity.
    pub fn affine(&self) -> Option<[f64; 2]> {
        let n = Complex::new(self.num[0], self.num[1]);
        let d = Complex::new(self.den[0], self.den[1]);
        if d.norm() == 0.0 {
            None
        } else {
            let z = n / d;
            Some([z.re, z.im])
        }
    }
}

impl<R: Real> From<&ProjectiveValue<R>> for HomogeneousPair {
    fn from(p: &ProjectiveValue<R>) -> Self {
        let (n, d) = (to_c64(p.num()), to_c64(p.den()));
        HomogeneousPair { num: [n.re, n.im], den: [d.re, d.im] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcgRecord {
    pub gamma_e: [f64; 2],
    pub gamma_o: [f64; 2],
    pub z0: [f64; 2],
}

/// One orbit point: all parameters of the surface, the point, and the largest curve residual
/// of the eight base points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub step: usize,
    pub c: [[f64; 2]; 8],
    pub eta: [f64; 2],
    pub x: HomogeneousPair,
    pub y: HomogeneousPair,
    pub residual: f64,
    pub lambda: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rcg: Option<RcgRecord>,
}

/// Result of [`iterate`]. `records[i]` is the state after step `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub records: Vec<OrbitRecord>,
    /// Steps that only succeeded after perturbing `x`.
    pub perturbed_at: Vec<usize>,
    /// The step that failed, if the orbit stopped early.
    pub error: Option<(usize, PainleveError)>,
}

/// Runs `steps` steps and stops at the first singular one. With `perturb = Some(ε)` a singular
/// step is retried once from the state with `x` moved by `ε`; this changes the orbit.
pub fn iterate<R: Real>(start: &EquationState<R>, steps: usize, perturb: Option<f64>) -> Orbit {
    let mut orbit = Orbit { records: Vec::with_capacity(steps), perturbed_at: Vec::new(), error: None };
    let mut cur = start.clone();
    for i in 1..=steps {
        let next = match (cur.step(), perturb) {
            (Ok(n), _) => Ok(n),
            (Err(_), Some(eps)) => {
                let retry = cur.perturbed(eps).step();
                if retry.is_ok() {
                    orbit.perturbed_at.push(i);
                }
                retry
            }
            (Err(e), None) => Err(e),
        };
        match next {
            Ok(n) => {
                orbit.records.push(n.record(i));
                cur = n;
            }
            Err(e) => {
                orbit.error = Some((i, e));
                break;
            }
        }
    }
    orbit
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub equation: Equation,
    pub steps: usize,
    pub word: Word,
    /// Parameters compared modulo the shifts that leave every base point fixed.
    pub deviation: StateDeviation,
}

/// Runs `steps` closed-form steps and the corresponding word `steps` times and compares the
/// resulting surface data.
pub fn compare_with_word<R: Real>(start: &EquationState<R>, steps: usize) -> Result<Comparison, PainleveError> {
    let eq = start.equation();
    let closed = start.steps(steps)?.surface();
    let word = eq.word().pow(steps);
    let via_word = apply_word(&word, &start.surface())?;
    Ok(Comparison { equation: eq, steps, word, deviation: equivalence_deviation(&closed, &via_word) })
}
