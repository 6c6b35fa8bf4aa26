//! Jacobi theta functions, Jacobian elliptic functions and complete elliptic integrals
//! for complex argument and modulus.
//!
//! Everything is evaluated from the four theta series in the nome `q = exp(-pi K'/K)`,
//! after reducing the argument into the fundamental cell of the period lattice
//! `{4K, 2iK'}`.

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::projective::ProjectiveValue;
use crate::scalar::{cabs, cabs_f64, cexp, creal, csqrt, imag_unit, to_c64, Cx, Precision, Real};

const SERIES_CAP: usize = 64;
const AGM_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error("degenerate modulus k = {re} + {im}i (k must avoid 0 and +-1)")]
    DegenerateModulus { re: f64, im: f64 },
    #[error("arithmetic-geometric mean did not converge within {AGM_CAP} iterations")]
    NonconvergentAgm,
    #[error("theta series diverges: |q| = {0} >= 1")]
    SeriesDivergence(f64),
    #[error("{function} has a pole at u = {re} + {im}i")]
    PoleEncountered { function: &'static str, re: f64, im: f64 },
}

impl EllipticError {
    fn pole<R: Real>(function: &'static str, u: Cx<R>) -> Self {
        let u = to_c64(u);
        EllipticError::PoleEncountered { function, re: u.re, im: u.im }
    }
}

/// Values of the four Jacobi theta functions in the `u`-normalization:
/// `h = H(u)`, `theta = Θ(u)`, `h1 = H1(u) = H(u+K)`, `theta1 = Θ1(u) = Θ(u+K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValues<R: Real> {
    pub h: Cx<R>,
    pub theta: Cx<R>,
    pub h1: Cx<R>,
    pub theta1: Cx<R>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiValues<R: Real> {
    pub sn: Cx<R>,
    pub cn: Cx<R>,
    pub dn: Cx<R>,
    pub cd: Cx<R>,
}

/// Modulus together with its periods and nome. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticContext<R: Real> {
    pub k: Cx<R>,
    pub kprime: Cx<R>,
    pub big_k: Cx<R>,
    pub big_kprime: Cx<R>,
    pub q: Cx<R>,
    /// Relative tolerance used by identity checks.
    pub tol: f64,
    q_quarter: Cx<R>,
    sqrt_k: Cx<R>,
    sqrt_kprime: Cx<R>,
    z_scale: Cx<R>,
}

/// Arithmetic-geometric mean with the "right" choice of square root at every step.
pub fn agm<R: Real>(a: Cx<R>, b: Cx<R>) -> Result<Cx<R>, EllipticError> {
    let half = R::from_f64(0.5);
    let (mut a, mut b) = (a, b);
    for _ in 0..AGM_CAP {
        if cabs(a - b) <= R::epsilon() * R::from_f64(4.0) * cabs(a) {
            return Ok(a);
        }
        let an = (a + b).scale(half);
        let mut bn = csqrt(a * b);
        if cabs(an - bn) > cabs(an + bn) {
            bn = -bn;
        }
        a = an;
        b = bn;
    }
    Err(EllipticError::NonconvergentAgm)
}

/// Complete elliptic integral of the first kind, `K(k) = pi / (2 agm(1, k'))`.
/// `K(0) = pi/2` exactly; `k = +-1` is rejected.
pub fn complete_k<R: Real>(k: Cx<R>) -> Result<Cx<R>, EllipticError> {
    let one = Complex::<R>::one();
    let kp = csqrt(one - k * k);
    if cabs(kp) <= R::epsilon() {
        let k = to_c64(k);
        return Err(EllipticError::DegenerateModulus { re: k.re, im: k.im });
    }
    let m = agm(one, kp)?;
    Ok(creal(R::pi()) / m.scale(R::from_f64(2.0)))
}

/// Builds an elliptic context for modulus `k`.
pub fn make_context<R: Real>(k: Cx<R>, tol: f64) -> Result<EllipticContext<R>, EllipticError> {
    EllipticContext::new(k, tol)
}

impl<R: Real> EllipticContext<R> {
    pub fn new(k: Cx<R>, tol: f64) -> Result<Self, EllipticError> {
        let one = Complex::<R>::one();
        let degenerate = || {
            let k = to_c64(k);
            EllipticError::DegenerateModulus { re: k.re, im: k.im }
        };
        if !crate::scalar::cis_finite(k) || cabs(k) <= R::epsilon() {
            return Err(degenerate());
        }
        let kprime = csqrt(one - k * k);
        if cabs(kprime) <= R::epsilon() {
            return Err(degenerate());
        }
        let big_k = complete_k(k)?;
        let big_kprime = complete_k(kprime)?;
        let pi = creal(R::pi());
        let nome_exp = -(pi * big_kprime / big_k);
        let q = cexp(nome_exp);
        if cabs(q) >= R::one() {
            return Err(EllipticError::SeriesDivergence(cabs_f64(q)));
        }
        let q_quarter = cexp(nome_exp.scale(R::from_f64(0.25)));
        let z_scale = pi / big_k.scale(R::from_f64(2.0));
        let mut ctx =
            EllipticContext { k, kprime, big_k, big_kprime, q, tol, q_quarter, sqrt_k: one, sqrt_kprime: one, z_scale };
        // k^(1/2) and k'^(1/2) from theta constants so that the series are self-consistent
        let t0 = ctx.theta_series(Complex::zero());
        ctx.sqrt_k = t0.h1 / t0.theta1;
        ctx.sqrt_kprime = t0.theta / t0.theta1;
        Ok(ctx)
    }

    pub fn precision(&self) -> Precision {
        R::PRECISION
    }

    /// `kappa = 2K + iK'`.
    pub fn kappa(&self) -> Cx<R> {
        self.big_k.scale(R::from_f64(2.0)) + imag_unit::<R>() * self.big_kprime
    }

    /// The period lattice generators `(4K, 2iK')`.
    pub fn periods(&self) -> (Cx<R>, Cx<R>) {
        (self.big_k.scale(R::from_f64(4.0)), imag_unit::<R>() * self.big_kprime.scale(R::from_f64(2.0)))
    }

    pub fn sqrt_k(&self) -> Cx<R> {
        self.sqrt_k
    }

    pub fn sqrt_kprime(&self) -> Cx<R> {
        self.sqrt_kprime
    }

    /// Same modulus at a different precision.
    pub fn convert<S: Real>(&self) -> Result<EllipticContext<S>, EllipticError> {
        EllipticContext::new(crate::scalar::convert(self.k), self.tol)
    }

    fn theta_series(&self, u: Cx<R>) -> ThetaValues<R> {
        let i = imag_unit::<R>();
        let half = R::from_f64(0.5);
        let eps = R::epsilon();
        let z = u * self.z_scale;
        let w = cexp(i * z);
        let wi = cexp(-(i * z));
        let (w2, wi2) = (w * w, wi * wi);
        let q = self.q;
        let q2 = q * q;

        let (mut h, mut h1) = (Complex::<R>::zero(), Complex::<R>::zero());
        let (mut th, mut th1) = (Complex::<R>::one(), Complex::<R>::one());
        // q^{n(n+1)} and its ratio to the next term
        let (mut qa, mut step_a) = (Complex::<R>::one(), q2);
        // q^{m^2} (m = n + 1) and its ratio to the next term
        let (mut qb, mut step_b) = (q, q2 * q);
        let (mut po, mut mo) = (w, wi);
        let (mut pe, mut me) = (w2, wi2);
        for n in 0..SERIES_CAP {
            let odd = n % 2 == 1;
            let sin = (po - mo) * Complex::new(R::zero(), -half);
            let cos = (po + mo).scale(half);
            let mut t_h = qa * sin;
            if odd {
                t_h = -t_h;
            }
            let t_h1 = qa * cos;
            let t_e = qb * (pe + me);
            h += t_h;
            h1 += t_h1;
            th1 += t_e;
            // Θ carries (-1)^m with m = n + 1
            if odd {
                th += t_e;
            } else {
                th -= t_e;
            }
            let done = |t: Cx<R>, s: Cx<R>| t.is_zero() || cabs(t) <= eps * cabs(s);
            if n > 0 && done(t_h, h) && done(t_h1, h1) && done(t_e, th) && done(t_e, th1) {
                break;
            }
            qa *= step_a;
            step_a *= q2;
            qb *= step_b;
            step_b *= q2;
            po *= w2;
            mo *= wi2;
            pe *= w2;
            me *= wi2;
        }
        let two_q = self.q_quarter.scale(R::from_f64(2.0));
        ThetaValues { h: two_q * h, theta: th, h1: two_q * h1, theta1: th1 }
    }

    /// Theta functions at `u`, evaluated directly from the series (no argument reduction).
    pub fn theta(&self, u: Cx<R>) -> Result<ThetaValues<R>, EllipticError> {
        if cabs(self.q) >= R::one() {
            return Err(EllipticError::SeriesDivergence(cabs_f64(self.q)));
        }
        Ok(self.theta_series(u))
    }

    /// Reduces `u` modulo `{4K, 2iK'}`; returns the reduced value and the multiple of `2iK'` removed.
    pub fn reduce(&self, u: Cx<R>) -> (Cx<R>, i64) {
        let (w1, w2) = self.periods();
        let (a, b) = lattice_coords(u, w1, w2);
        let (na, nb) = (a.round(), b.round());
        let r = u - w1.scale(na) - w2.scale(nb);
        (r, nb.to_f64() as i64)
    }

    fn ratio(&self, function: &'static str, u: Cx<R>, num: Cx<R>, den: Cx<R>) -> Result<Cx<R>, EllipticError> {
        if cabs(den) <= R::from_f64(16.0) * R::epsilon() * cabs(num) {
            return Err(EllipticError::pole(function, u));
        }
        Ok(num / den)
    }

    /// `sn, cn, dn, cd` at `u`. Fails if `u` is a pole of any of the four.
    pub fn jacobi(&self, u: Cx<R>) -> Result<JacobiValues<R>, EllipticError> {
        let (r, shifts) = self.reduce(u);
        let t = self.theta_series(r);
        let sign = if shifts.rem_euclid(2) == 1 { -R::one() } else { R::one() };
        let sk_theta = self.sqrt_k * t.theta;
        let sn = self.ratio("sn", u, t.h, sk_theta)?;
        let cn = self.ratio("cn", u, self.sqrt_kprime * t.h1, sk_theta)?.scale(sign);
        let dn = self.ratio("dn", u, self.sqrt_kprime * t.theta1, t.theta)?.scale(sign);
        let cd = self.ratio("cd", u, t.h1, self.sqrt_k * t.theta1)?;
        Ok(JacobiValues { sn, cn, dn, cd })
    }

    pub fn sn(&self, u: Cx<R>) -> Result<Cx<R>, EllipticError> {
        let (r, _) = self.reduce(u);
        let t = self.theta_series(r);
        self.ratio("sn", u, t.h, self.sqrt_k * t.theta)
    }

    pub fn cn(&self, u: Cx<R>) -> Result<Cx<R>, EllipticError> {
        let (r, shifts) = self.reduce(u);
        let t = self.theta_series(r);
        let v = self.ratio("cn", u, self.sqrt_kprime * t.h1, self.sqrt_k * t.theta)?;
        Ok(if shifts.rem_euclid(2) == 1 { -v } else { v })
    }

    pub fn dn(&self, u: Cx<R>) -> Result<Cx<R>, EllipticError> {
        let (r, shifts) = self.reduce(u);
        let t = self.theta_series(r);
        let v = self.ratio("dn", u, self.sqrt_kprime * t.theta1, t.theta)?;
        Ok(if shifts.rem_euclid(2) == 1 { -v } else { v })
    }

    pub fn cd(&self, u: Cx<R>) -> Result<Cx<R>, EllipticError> {
        let (r, _) = self.reduce(u);
        let t = self.theta_series(r);
        self.ratio("cd", u, t.h1, self.sqrt_k * t.theta1)
    }

    /// Theta values at the representative of `u` in the fundamental cell. Quotients that are
    /// even in the `2iK'` shift (such as `sn^2` or `cn dn`) can be read off directly.
    pub fn theta_reduced(&self, u: Cx<R>) -> ThetaValues<R> {
        self.theta_series(self.reduce(u).0)
    }

    /// `cd(u)` as a point of the projective line; defined everywhere.
    pub fn cd_projective(&self, u: Cx<R>) -> ProjectiveValue<R> {
        let (r, _) = self.reduce(u);
        let t = self.theta_series(r);
        ProjectiveValue::new(t.h1, self.sqrt_k * t.theta1).expect("finite argument")
    }

    /// Residual of the addition formula for `sn(u + v)`, relative to `max(1, |sn(u+v)|)`.
    pub fn sn_addition_check(&self, u: Cx<R>, v: Cx<R>) -> Result<f64, EllipticError> {
        let a = self.jacobi(u)?;
        let b = self.jacobi(v)?;
        let lhs = self.sn(u + v)?;
        let t1 = a.sn * b.cn * b.dn;
        let t2 = b.sn * a.cn * a.dn;
        let den = t1 - t2;
        let scale = cabs(t1) + cabs(t2);
        if cabs(den) <= R::from_f64(1e3) * R::epsilon() * scale {
            return Err(EllipticError::pole("sn addition formula", u + v));
        }
        let rhs = (a.sn * a.sn - b.sn * b.sn) / den;
        Ok((cabs(lhs - rhs) / cabs(lhs).max(R::one())).to_f64())
    }

    /// Residual of `Θ(u)H(v) + H(u)Θ(v) = 2 H(s)Θ(s)H1(d)Θ1(d) / (H1(0)Θ1(0))`
    /// with `s = (u+v)/2`, `d = (u-v)/2`, relative to the magnitude of the summands.
    pub fn theta_addition_check(&self, u: Cx<R>, v: Cx<R>) -> Result<f64, EllipticError> {
        let half = R::from_f64(0.5);
        let tu = self.theta(u)?;
        let tv = self.theta(v)?;
        let ts = self.theta((u + v).scale(half))?;
        let td = self.theta((u - v).scale(half))?;
        let t0 = self.theta(Complex::zero())?;
        let a = tu.theta * tv.h;
        let b = tu.h * tv.theta;
        let rhs = ts.h * ts.theta * td.h1 * td.theta1 * creal(R::from_f64(2.0)) / (t0.h1 * t0.theta1);
        let scale = (cabs(a) + cabs(b)).max(R::epsilon());
        Ok((cabs(a + b - rhs) / scale).to_f64())
    }
}

/// Real coordinates `(a, b)` with `u = a w1 + b w2`.
pub fn lattice_coords<R: Real>(u: Cx<R>, w1: Cx<R>, w2: Cx<R>) -> (R, R) {
    let det = w1.re * w2.im - w2.re * w1.im;
    let a = (u.re * w2.im - w2.re * u.im) / det;
    let b = (w1.re * u.im - u.re * w1.im) / det;
    (a, b)
}

/// Distance from `u` to the nearest point of the lattice `{w1, w2}`, measured in the
/// reduced representative.
pub fn lattice_residue<R: Real>(u: Cx<R>, w1: Cx<R>, w2: Cx<R>) -> Cx<R> {
    let (a, b) = lattice_coords(u, w1, w2);
    u - w1.scale(a.round()) - w2.scale(b.round())
}
