//! Landen descent and the change of variables between the cd-based surface and the
//! Weierstrass ℘ setting.

use num_complex::Complex;
use num_traits::One;
use thiserror::Error;

use crate::elliptic::{EllipticContext, EllipticError};
use crate::projective::ProjectiveValue;
use crate::scalar::{cabs, cabs_f64, creal, csqrt, to_c64, Cx, Real};
use crate::weyl::SurfaceState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeierstrassError {
    #[error("degenerate modulus k = {re} + {im}i")]
    DegenerateModulus { re: f64, im: f64 },
    #[error("frame scale must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("change of variables is singular: {0}")]
    MapSingular(&'static str),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

/// `l = 2 k^(1/2) / (1 + k)`.
pub fn landen_modulus<R: Real>(k: Cx<R>) -> Cx<R> {
    csqrt(k).scale(R::from_f64(2.0)) / (k + R::one())
}

/// The e-values of one modulus, normalized by `e1 - e3 = scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassFrame<R: Real> {
    /// Modulus the e-values belong to.
    pub k: Cx<R>,
    /// Its Landen descendant.
    pub l: Cx<R>,
    pub e1: Cx<R>,
    pub e2: Cx<R>,
    pub e3: Cx<R>,
    pub scale: R,
    pub ctx: EllipticContext<R>,
}

/// `e1 - e3 = s`, `e2 - e3 = k^2 s`, `e1 + e2 + e3 = 0`.
pub fn make_frame<R: Real>(k: Cx<R>, scale: R, tol: f64) -> Result<WeierstrassFrame<R>, WeierstrassError> {
    if !scale.is_finite() || scale <= R::zero() {
        return Err(WeierstrassError::BadScale(scale.to_f64()));
    }
    let ctx = EllipticContext::new(k, tol).map_err(|e| match e {
        EllipticError::DegenerateModulus { re, im } => WeierstrassError::DegenerateModulus { re, im },
        e => e.into(),
    })?;
    let s = creal(scale);
    let k2 = k * k;
    let e3 = -(k2 + R::one()) * s / R::from_f64(3.0);
    Ok(WeierstrassFrame { k, l: landen_modulus(k), e1: e3 + s, e2: e3 + k2 * s, e3, scale, ctx })
}

impl<R: Real> WeierstrassFrame<R> {
    fn sqrt_scale(&self) -> R {
        self.scale.sqrt()
    }

    /// `℘(u) = (e1 - e3) / sn^2((e1 - e3)^(1/2) u) + e3` as a projective value; `∞` on the lattice.
    pub fn wp_projective(&self, u: Cx<R>) -> ProjectiveValue<R> {
        let t = self.ctx.theta_reduced(u.scale(self.sqrt_scale()));
        // sn^2 = H^2 / (k Θ^2)
        let h2 = t.h * t.h;
        let kt2 = self.ctx.k * t.theta * t.theta;
        ProjectiveValue::new(kt2.scale(self.scale) + self.e3 * h2, h2).expect("finite argument")
    }

    pub fn wp(&self, u: Cx<R>) -> Result<Cx<R>, WeierstrassError> {
        self.wp_projective(u).affine().ok_or_else(|| {
            let z = to_c64(u);
            EllipticError::PoleEncountered { function: "wp", re: z.re, im: z.im }.into()
        })
    }

    /// `|e1 + e2 + e3|`, relative to the scale.
    pub fn sum_residual(&self) -> f64 {
        cabs_f64(self.e1 + self.e2 + self.e3) / self.scale.to_f64()
    }
}

/// A modulus `k` together with the ℘ frame of its Landen descendant `l`, which is what the
/// correspondence between cd and ℘ uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassSetting<R: Real> {
    pub jacobi: EllipticContext<R>,
    pub frame: WeierstrassFrame<R>,
}

/// Output of [`jacobi_to_weierstrass`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassState<R: Real> {
    pub f: ProjectiveValue<R>,
    pub g: ProjectiveValue<R>,
    pub b: [Cx<R>; 8],
    pub t: Cx<R>,
}

impl<R: Real> WeierstrassSetting<R> {
    pub fn new(jacobi: EllipticContext<R>, scale: R) -> Result<Self, WeierstrassError> {
        let frame = make_frame(landen_modulus(jacobi.k), scale, jacobi.tol)?;
        Ok(WeierstrassSetting { jacobi, frame })
    }

    fn one_plus_k(&self) -> Cx<R> {
        self.jacobi.k + R::one()
    }

    /// `ω = (1 + k) u / (2 (e1(l) - e3(l))^(1/2))`.
    pub fn omega(&self, u: Cx<R>) -> Cx<R> {
        self.one_plus_k() * u / (R::from_f64(2.0) * self.frame.sqrt_scale())
    }

    pub fn omega_inverse(&self, w: Cx<R>) -> Cx<R> {
        w * (R::from_f64(2.0) * self.frame.sqrt_scale()) / self.one_plus_k()
    }

    /// Coefficients `(α, β, γ)` of `x = (α f + β) / (α f + γ)`.
    fn moebius(&self) -> (Cx<R>, Cx<R>, Cx<R>) {
        let (k, e1, e3) = (self.jacobi.k, self.frame.e1, self.frame.e3);
        let two = R::from_f64(2.0);
        let one_minus_k = Complex::<R>::one() - k;
        (self.one_plus_k(), -e1.scale(two) + one_minus_k * e3, -(k * e1).scale(two) - one_minus_k * e3)
    }

    /// `f ↦ x`.
    pub fn to_jacobi_coordinate(&self, f: &ProjectiveValue<R>) -> Option<ProjectiveValue<R>> {
        let (a, b, c) = self.moebius();
        ProjectiveValue::new(a * f.num() + b * f.den(), a * f.num() + c * f.den())
    }

    /// `x ↦ f`, the inverse of [`Self::to_jacobi_coordinate`].
    pub fn to_weierstrass_coordinate(&self, x: &ProjectiveValue<R>) -> Option<ProjectiveValue<R>> {
        let (a, b, c) = self.moebius();
        ProjectiveValue::new(b * x.den() - c * x.num(), a * (x.num() - x.den()))
    }

    /// cd through ℘ at the descended modulus.
    pub fn cd_via_wp(&self, u: Cx<R>) -> Option<ProjectiveValue<R>> {
        self.to_jacobi_coordinate(&self.frame.wp_projective(self.omega(u)))
    }
}

fn rel<R: Real>(a: Cx<R>, b: Cx<R>) -> f64 {
    (cabs(a - b) / cabs(a).max(R::one())).to_f64()
}

fn pole_guard<R: Real>(function: &'static str, u: Cx<R>, d: Cx<R>) -> Result<(), WeierstrassError> {
    if cabs(d) <= R::from_f64(64.0) * R::epsilon() {
        let z = to_c64(u);
        return Err(EllipticError::PoleEncountered { function, re: z.re, im: z.im }.into());
    }
    Ok(())
}

/// Largest relative residual of the Landen formulas for `cn(u, k)` and `dn(u, k)`.
pub fn landen_residual<R: Real>(u: Cx<R>, setting: &WeierstrassSetting<R>) -> Result<f64, WeierstrassError> {
    let k = setting.jacobi.k;
    let lhs = setting.jacobi.jacobi(u)?;
    let w = (k + R::one()) * u.scale(R::from_f64(0.5));
    let rhs = setting.frame.ctx.jacobi(w)?;
    pole_guard("dn", w, rhs.dn)?;
    let s2 = rhs.sn * rhs.sn;
    let two = R::from_f64(2.0);
    let opk = k + R::one();
    let cn = (Complex::<R>::one() - s2 * creal(two) / opk) / rhs.dn;
    let dn = (Complex::<R>::one() - s2 * k.scale(two) / opk) / rhs.dn;
    Ok(rel(lhs.cn, cn).max(rel(lhs.dn, dn)))
}

/// Chordal residual between `cd(u, k)` and its expression through `℘(ω; l)`.
pub fn cd_wp_residual<R: Real>(u: Cx<R>, setting: &WeierstrassSetting<R>) -> Result<f64, WeierstrassError> {
    let direct = setting.jacobi.cd_projective(u);
    let via = setting.cd_via_wp(u).ok_or(WeierstrassError::MapSingular("cd via wp"))?;
    Ok(direct.chordal(&via))
}

/// `(x, y, c, η) ↦ (f, g, b, t)`.
pub fn jacobi_to_weierstrass<R: Real>(
    st: &SurfaceState<R>,
    setting: &WeierstrassSetting<R>,
) -> Result<WeierstrassState<R>, WeierstrassError> {
    let f = setting.to_weierstrass_coordinate(&st.x).ok_or(WeierstrassError::MapSingular("f"))?;
    let g = setting.to_weierstrass_coordinate(&st.y).ok_or(WeierstrassError::MapSingular("g"))?;
    Ok(WeierstrassState { f, g, b: st.c.map(|c| setting.omega(c)), t: setting.omega(st.eta) })
}

/// Inverse of [`jacobi_to_weierstrass`].
pub fn weierstrass_to_jacobi<R: Real>(
    w: &WeierstrassState<R>,
    setting: &WeierstrassSetting<R>,
) -> Result<SurfaceState<R>, WeierstrassError> {
    let x = setting.to_jacobi_coordinate(&w.f).ok_or(WeierstrassError::MapSingular("x"))?;
    let y = setting.to_jacobi_coordinate(&w.g).ok_or(WeierstrassError::MapSingular("y"))?;
    Ok(SurfaceState::new(w.b.map(|b| setting.omega_inverse(b)), setting.omega_inverse(w.t), x, y, setting.jacobi))
}

/// Largest chordal distance between the image of each base point `(cd(η + c_i), cd(η - c_i))`
/// and `(℘(t + b_i), ℘(t - b_i))`.
pub fn base_point_transport_residual<R: Real>(
    st: &SurfaceState<R>,
    setting: &WeierstrassSetting<R>,
) -> Result<f64, WeierstrassError> {
    let ctx = &setting.jacobi;
    let wst = jacobi_to_weierstrass(st, setting)?;
    let mut worst = 0.0f64;
    for (c, b) in st.c.iter().zip(&wst.b) {
        let px = ctx.cd_projective(st.eta + c);
        let py = ctx.cd_projective(st.eta - c);
        let f = setting.to_weierstrass_coordinate(&px).ok_or(WeierstrassError::MapSingular("base point"))?;
        let g = setting.to_weierstrass_coordinate(&py).ok_or(WeierstrassError::MapSingular("base point"))?;
        let wf = setting.frame.wp_projective(wst.t + b);
        let wg = setting.frame.wp_projective(wst.t - b);
        worst = worst.max(f.chordal(&wf)).max(g.chordal(&wg));
    }
    Ok(worst)
}
