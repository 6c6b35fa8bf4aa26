//! Independent reference values: real sn, cn, dn by descending AGM, extended to complex
//! arguments with the imaginary transformation.

use num_complex::Complex64;

/// sn, cn, dn for real argument and modulus by descending AGM.
pub fn scd_real(u: f64, k: f64) -> (f64, f64, f64) {
    let (mut a, mut b, mut c) = (1.0f64, (1.0 - k * k).sqrt(), k);
    let mut cs = vec![c];
    let mut as_ = vec![a];
    while c.abs() > 1e-17 && cs.len() < 40 {
        let an = (a + b) / 2.0;
        c = (a - b) / 2.0;
        b = (a * b).sqrt();
        a = an;
        cs.push(c);
        as_.push(a);
    }
    let n = cs.len() - 1;
    let mut phi = 2f64.powi(n as i32) * as_[n] * u;
    let mut prev = phi;
    for j in (1..=n).rev() {
        prev = phi;
        phi = (phi + (cs[j] / as_[j] * phi.sin()).asin()) / 2.0;
    }
    (phi.sin(), phi.cos(), phi.cos() / (prev - phi).cos())
}

/// Complex argument through the imaginary transformation.
pub fn scd(u: Complex64, k: f64) -> (Complex64, Complex64, Complex64) {
    let kp = (1.0 - k * k).sqrt();
    let (s, c, d) = scd_real(u.re, k);
    let (s1, c1, d1) = scd_real(u.im, kp);
    let den = c1 * c1 + k * k * s * s * s1 * s1;
    (
        Complex64::new(s * d1, c * d * s1 * c1) / den,
        Complex64::new(c * c1, -s * d * s1 * d1) / den,
        Complex64::new(d * c1 * d1, -k * k * s * c * s1) / den,
    )
}

/// Complete integral by the AGM of `1` and `k'`.
#[allow(dead_code)]
pub fn big_k(k: f64) -> f64 {
    let (mut a, mut b) = (1.0f64, (1.0 - k * k).sqrt());
    for _ in 0..40 {
        let an = (a + b) / 2.0;
        b = (a * b).sqrt();
        a = an;
    }
    std::f64::consts::FRAC_PI_2 / a
}
