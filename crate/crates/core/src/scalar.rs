//! Real scalar abstraction over binary64 and double-double arithmetic.
//!
//! Every numerical routine in the crate is generic over [`Real`]; complex values are
//! `num_complex::Complex<R>`. Transcendental helpers for complex arguments live here
//! too since `Complex::exp` and friends require `num_traits::Float`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Num, NumAssign, One, Zero};
use serde::{Deserialize, Serialize};

/// Arithmetic backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE binary64.
    Double,
    /// Unevaluated sum of two binary64 values, about 32 significant digits.
    Extended,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" | "f64" | "binary64" => Ok(Precision::Double),
            "extended" | "dd" | "double-double" => Ok(Precision::Extended),
            other => Err(format!("unknown precision `{other}` (expected double or extended)")),
        }
    }
}

/// Real scalar used by every numerical routine.
pub trait Real:
    NumAssign + Copy + PartialOrd + Neg<Output = Self> + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const PRECISION: Precision;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn floor(self) -> Self;
    fn pi() -> Self;
    /// Unit roundoff.
    fn epsilon() -> Self;
    fn is_finite(self) -> bool;

    fn round(self) -> Self {
        (self + Self::from_f64(0.5)).floor()
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Double;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn round(self) -> Self {
        f64::round(self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn epsilon() -> Self {
        f64::EPSILON / 2.0
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

/// Double-double real: `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
    pub const PI: DoubleDouble = DoubleDouble { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
    pub const FRAC_PI_2: DoubleDouble = DoubleDouble { hi: std::f64::consts::FRAC_PI_2, lo: 6.123233995736766e-17 };
    pub const LN_2: DoubleDouble = DoubleDouble { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn ldexp(self, n: i32) -> Self {
        // split so that each factor stays a normal power of two
        let mut out = self;
        let mut n = n;
        while n != 0 {
            let step = n.clamp(-1000, 1000);
            let f = 2f64.powi(step);
            out = DoubleDouble { hi: out.hi * f, lo: out.lo * f };
            n -= step;
        }
        out
    }

    fn sin_cos_taylor(r: Self) -> (Self, Self) {
        let r2 = r * r;
        let tiny = 1e-34;
        let mut sin = r;
        let mut term = r;
        let mut n = 1.0;
        loop {
            term = -term * r2 / DoubleDouble::from((n + 1.0) * (n + 2.0));
            sin += term;
            n += 2.0;
            if term.hi.abs() < tiny || n > 60.0 {
                break;
            }
        }
        let mut cos = DoubleDouble::ONE;
        let mut term = DoubleDouble::ONE;
        let mut n = 0.0;
        loop {
            term = -term * r2 / DoubleDouble::from((n + 1.0) * (n + 2.0));
            cos += term;
            n += 2.0;
            if term.hi.abs() < tiny || n > 60.0 {
                break;
            }
        }
        (sin, cos)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&(self.hi + self.lo), f)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return DoubleDouble::from(q1);
        }
        let r = self - b * DoubleDouble::from(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DoubleDouble::from(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let t = if q.hi < 0.0 { -((-q).floor()) } else { q.floor() };
        self - b * t
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;

    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(DoubleDouble::from)
    }
}

impl Real for DoubleDouble {
    const PRECISION: Precision = Precision::Extended;

    fn from_f64(x: f64) -> Self {
        DoubleDouble::from(x)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from(self.hi.sqrt());
        }
        let y = DoubleDouble::from(self.hi.sqrt());
        y + (self - y * y) / (y * DoubleDouble::from(2.0))
    }

    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::from(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::ZERO;
        }
        let n = (self.hi / DoubleDouble::LN_2.hi).round();
        let r = (self - DoubleDouble::LN_2 * DoubleDouble::from(n)).ldexp(-10);
        // expm1 on the reduced argument, then square back up
        let mut s = r;
        let mut term = r;
        let mut k = 1.0;
        loop {
            k += 1.0;
            term = term * r / DoubleDouble::from(k);
            s += term;
            if term.hi.abs() < 1e-36 || k > 40.0 {
                break;
            }
        }
        for _ in 0..10 {
            s = s * DoubleDouble::from(2.0) + s * s;
        }
        (s + DoubleDouble::ONE).ldexp(n as i32)
    }

    fn sin_cos(self) -> (Self, Self) {
        let j = (self / DoubleDouble::FRAC_PI_2).round();
        let r = self - DoubleDouble::FRAC_PI_2 * j;
        let (s, c) = DoubleDouble::sin_cos_taylor(r);
        match (j.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn floor(self) -> Self {
        let fh = self.hi.floor();
        if fh == self.hi {
            let (hi, lo) = quick_two_sum(fh, self.lo.floor());
            DoubleDouble { hi, lo }
        } else {
            DoubleDouble::from(fh)
        }
    }

    fn pi() -> Self {
        DoubleDouble::PI
    }

    fn epsilon() -> Self {
        DoubleDouble::from(2f64.powi(-104))
    }

    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

/// Complex scalar over `R`.
pub type Cx<R> = Complex<R>;

pub fn cx<R: Real>(re: f64, im: f64) -> Cx<R> {
    Complex::new(R::from_f64(re), R::from_f64(im))
}

pub fn creal<R: Real>(x: R) -> Cx<R> {
    Complex::new(x, R::zero())
}

pub fn imag_unit<R: Real>() -> Cx<R> {
    Complex::new(R::zero(), R::one())
}

/// Modulus, computed without intermediate overflow.
pub fn cabs<R: Real>(z: Cx<R>) -> R {
    let a = z.re.abs();
    let b = z.im.abs();
    let (big, small) = if a > b { (a, b) } else { (b, a) };
    if big.is_zero() {
        return R::zero();
    }
    let t = small / big;
    big * (R::one() + t * t).sqrt()
}

/// Modulus as binary64, for reporting and thresholds.
pub fn cabs_f64<R: Real>(z: Cx<R>) -> f64 {
    cabs(z).to_f64()
}

pub fn cexp<R: Real>(z: Cx<R>) -> Cx<R> {
    let m = z.re.exp();
    let (s, c) = z.im.sin_cos();
    Complex::new(m * c, m * s)
}

/// Principal square root.
pub fn csqrt<R: Real>(z: Cx<R>) -> Cx<R> {
    let r = cabs(z);
    if r.is_zero() {
        return Complex::zero();
    }
    let two = R::from_f64(2.0);
    let re = ((r + z.re) / two).sqrt();
    let im = ((r - z.re) / two).sqrt();
    if z.im < R::zero() {
        Complex::new(re, -im)
    } else {
        Complex::new(re, im)
    }
}

pub fn cis_finite<R: Real>(z: Cx<R>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn to_c64<R: Real>(z: Cx<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<R: Real>(z: Complex<f64>) -> Cx<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

/// Change the backend of a complex value.
pub fn convert<R: Real, S: Real>(z: Cx<R>) -> Cx<S> {
    Complex::new(convert_real(z.re), convert_real(z.im))
}

pub fn convert_real<R: Real, S: Real>(x: R) -> S {
    // hi part plus the rounding remainder keeps double-double values intact
    let hi = x.to_f64();
    let rest = (x - R::from_f64(hi)).to_f64();
    S::from_f64(hi) + S::from_f64(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = DoubleDouble;

    #[test]
    fn double_double_arithmetic() {
        let third = D::ONE / D::from(3.0);
        let back = third * D::from(3.0);
        assert!((back - D::ONE).abs().hi < 1e-31);
        let two = D::from(2.0);
        let r = two.sqrt();
        assert!((r * r - two).abs().hi < 1e-31);
    }

    #[test]
    fn double_double_exp_and_trig() {
        // e = exp(1) to 32 digits
        let e = D::ONE.exp();
        let expected = D::new(std::f64::consts::E, 1.4456468917292502e-16);
        assert!((e - expected).abs().hi < 1e-30);
        let (s, c) = D::from(0.7).sin_cos();
        assert!((s * s + c * c - D::ONE).abs().hi < 1e-31);
        let (s, _) = D::PI.sin_cos();
        assert!(s.abs().hi < 1e-31);
        let (s, c) = D::from(-5.5).sin_cos();
        assert!((s.to_f64() - (-5.5f64).sin()).abs() < 1e-15);
        assert!((c.to_f64() - (-5.5f64).cos()).abs() < 1e-15);
    }

    #[test]
    fn rounding() {
        assert_eq!(D::from(2.5).floor().to_f64(), 2.0);
        assert_eq!(D::from(-2.5).floor().to_f64(), -3.0);
        assert_eq!(D::new(3.0, -1e-20).floor().to_f64(), 2.0);
        assert_eq!(D::from(1.4).round().to_f64(), 1.0);
    }

    #[test]
    fn complex_helpers() {
        let z = cx::<f64>(-3.0, 4.0);
        assert!((cabs(z) - 5.0).abs() < 1e-15);
        let r = csqrt(z);
        assert!((r * r - z).norm() < 1e-14);
        let w = cexp(cx::<D>(0.0, std::f64::consts::PI));
        assert!((w.re.to_f64() + 1.0).abs() < 1e-15);
    }
}
