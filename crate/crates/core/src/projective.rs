//! Points of the complex projective line.

use std::ops::{Div, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{cabs, cis_finite, convert, Cx, Real};

/// Homogeneous pair `(num : den)`, scaled by a power of two so the larger modulus lies in
/// `(1/2, 1]`. The scaling is exact, so finite values round-trip bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveValue<R: Real> {
    num: Cx<R>,
    den: Cx<R>,
}

impl<R: Real> ProjectiveValue<R> {
    /// Builds a normalized point. Returns `None` for `(0 : 0)` or non-finite input.
    pub fn new(num: Cx<R>, den: Cx<R>) -> Option<Self> {
        if !cis_finite(num) || !cis_finite(den) {
            return None;
        }
        let s = cabs(num).max(cabs(den));
        if s.is_zero() || !s.is_finite() {
            return None;
        }
        let e = s.to_f64().log2().ceil();
        if !e.is_finite() {
            return None;
        }
        let f = R::from_f64(2f64.powi(-(e as i32)));
        Some(ProjectiveValue { num: num.scale(f), den: den.scale(f) })
    }

    pub fn finite(z: Cx<R>) -> Self {
        Self::new(z, Complex::one()).expect("finite affine value")
    }

    pub fn infinity() -> Self {
        ProjectiveValue { num: Complex::one(), den: Complex::zero() }
    }

    pub fn num(&self) -> Cx<R> {
        self.num
    }

    pub fn den(&self) -> Cx<R> {
        self.den
    }

    /// Affine value, `None` at infinity.
    pub fn affine(&self) -> Option<Cx<R>> {
        if self.den.is_zero() {
            None
        } else {
            Some(self.num / self.den)
        }
    }

    /// True when the point is within `tol` (chordal) of infinity.
    pub fn is_infinite(&self, tol: f64) -> bool {
        self.chordal(&Self::infinity()) <= tol
    }

    /// Chordal distance on the Riemann sphere, in `[0, 1]`.
    pub fn chordal(&self, other: &Self) -> f64 {
        let cross = cabs(self.num * other.den - other.num * self.den);
        let n1 = (self.num.norm_sqr() + self.den.norm_sqr()).sqrt();
        let n2 = (other.num.norm_sqr() + other.den.norm_sqr()).sqrt();
        (cross / (n1 * n2)).to_f64()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.chordal(other) <= tol
    }

    pub fn neg(&self) -> Self {
        ProjectiveValue { num: -self.num, den: self.den }
    }

    pub fn recip(&self) -> Self {
        ProjectiveValue { num: self.den, den: self.num }
    }

    /// `z -> 1 / (k z)`.
    pub fn inv_scaled(&self, k: Cx<R>) -> Self {
        Self::new(self.den, k * self.num).expect("nonzero modulus")
    }

    pub fn convert<S: Real>(&self) -> ProjectiveValue<S> {
        ProjectiveValue::new(convert(self.num), convert(self.den)).expect("normalized point")
    }

    /// Affine value as binary64 pair, `None` at infinity.
    pub fn to_pair(&self) -> Option<[f64; 2]> {
        self.affine().filter(|z| cis_finite(*z)).map(|z| [z.re.to_f64(), z.im.to_f64()])
    }
}

/// A ratio `n / d` kept as a pair so that zeros and poles survive multiplication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio<R: Real> {
    pub n: Cx<R>,
    pub d: Cx<R>,
}

impl<R: Real> Ratio<R> {
    pub fn new(n: Cx<R>, d: Cx<R>) -> Self {
        Ratio { n, d }.rescaled()
    }

    pub fn value(z: Cx<R>) -> Self {
        Ratio { n: z, d: Complex::one() }
    }

    pub fn one() -> Self {
        Ratio { n: Complex::one(), d: Complex::one() }
    }

    fn rescaled(self) -> Self {
        let s = cabs(self.n).max(cabs(self.d));
        if s.is_zero() || !s.is_finite() {
            return self;
        }
        let e = s.to_f64().log2().ceil();
        let f = R::from_f64(2f64.powi(-(e as i32)));
        Ratio { n: self.n.scale(f), d: self.d.scale(f) }
    }

    pub fn inv(self) -> Self {
        Ratio { n: self.d, d: self.n }
    }

    /// Affine value, `None` when the denominator vanishes.
    pub fn get(&self) -> Option<Cx<R>> {
        if self.d.is_zero() {
            None
        } else {
            Some(self.n / self.d)
        }
    }

    /// Both parts vanish to working precision (relative to `scale`).
    pub fn is_indeterminate(&self, scale: R) -> bool {
        let tiny = R::from_f64(1024.0) * R::epsilon() * scale;
        cabs(self.n) <= tiny && cabs(self.d) <= tiny
    }

    pub fn to_projective(self) -> Option<ProjectiveValue<R>> {
        ProjectiveValue::new(self.n, self.d)
    }
}

impl<R: Real> Mul for Ratio<R> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Ratio { n: self.n * o.n, d: self.d * o.d }.rescaled()
    }
}

impl<R: Real> Div for Ratio<R> {
    type Output = Self;

    fn div(self, o: Self) -> Self {
        Ratio { n: self.n * o.d, d: self.d * o.n }.rescaled()
    }
}

impl<R: Real> Sub for Ratio<R> {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Ratio { n: self.n * o.d - o.n * self.d, d: self.d * o.d }.rescaled()
    }
}

/// `(p - a) / (p - b)` for points of the projective line.
pub fn cross_ratio<R: Real>(p: &ProjectiveValue<R>, a: &ProjectiveValue<R>, b: &ProjectiveValue<R>) -> Ratio<R> {
    let pa = p.num * a.den - a.num * p.den;
    let pb = p.num * b.den - b.num * p.den;
    Ratio::new(pa * b.den, pb * a.den)
}

/// Solves `(Y - a) / (Y - b) = r` for `Y`.
pub fn solve_cross_ratio<R: Real>(
    a: &ProjectiveValue<R>,
    b: &ProjectiveValue<R>,
    r: Ratio<R>,
) -> Option<ProjectiveValue<R>> {
    let num = a.num * b.den * r.d - b.num * a.den * r.n;
    let den = a.den * b.den * (r.d - r.n);
    ProjectiveValue::new(num, den)
}

impl<R: Real> Serialize for ProjectiveValue<R> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.to_pair() {
            Some(p) => p.serialize(serializer),
            None => serializer.serialize_str("inf"),
        }
    }
}

impl<'de, R: Real> Deserialize<'de> for ProjectiveValue<R> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Pair([re, im]) => Ok(Self::finite(Complex::new(R::from_f64(re), R::from_f64(im)))),
            Repr::Text(s) if s.eq_ignore_ascii_case("inf") => Ok(Self::infinity()),
            Repr::Text(s) => Err(serde::de::Error::custom(format!("expected [re, im] or \"inf\", got {s}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn normalization_and_distance() {
        let a = ProjectiveValue::<f64>::new(cx(2.0, 0.0), cx(4.0, 0.0)).unwrap();
        let b = ProjectiveValue::finite(cx(0.5, 0.0));
        assert!(a.chordal(&b) < 1e-16);
        assert!(ProjectiveValue::<f64>::new(cx(0.0, 0.0), cx(0.0, 0.0)).is_none());
        let inf = ProjectiveValue::<f64>::infinity();
        assert!(inf.affine().is_none());
        assert!(b.recip().approx_eq(&ProjectiveValue::finite(cx(2.0, 0.0)), 1e-15));
        assert!(ProjectiveValue::finite(cx::<f64>(0.0, 0.0)).recip().is_infinite(1e-15));
    }

    #[test]
    fn serde_roundtrip() {
        let p = ProjectiveValue::<f64>::finite(cx(1.5, -2.0));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.5,-2.0]");
        let back: ProjectiveValue<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back.affine().unwrap(), cx(1.5, -2.0));
        let inf: ProjectiveValue<f64> = serde_json::from_str("\"inf\"").unwrap();
        assert!(inf.affine().is_none());
    }
}
