//! Verification suites shared by the command line and the acceptance tests.

use num_complex::Complex;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::elliptic::EllipticContext;
use crate::picard::{
    classify_translation, enumerate_short_vectors, kac_translation, verify_weyl_relations, word_matrix, DivisorClass,
    NeighbourClass, R_J1_REFERENCE_ROOT_MATRIX,
};
use crate::projective::ProjectiveValue;
use crate::scalar::{cabs, cx, from_c64, Cx, Precision, Real};
use crate::weierstrass::{
    base_point_transport_residual, cd_wp_residual, jacobi_to_weierstrass, landen_residual, weierstrass_to_jacobi,
    WeierstrassSetting,
};
use crate::weyl::{equivalence_deviation, random_state, sample_rng, verify_extended_relations};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Number of sampled arguments or states (1 for exact checks).
    pub samples: usize,
    /// Largest residual seen; absent for exact checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn exact(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        CheckResult {
            name: name.into(),
            passed,
            samples: 1,
            max_residual: None,
            tol: None,
            detail: (!detail.is_empty()).then_some(detail),
        }
    }

    pub fn numeric(name: impl Into<String>, samples: usize, max_residual: f64, tol: f64) -> Self {
        CheckResult {
            name: name.into(),
            passed: max_residual < tol,
            samples,
            max_residual: Some(max_residual),
            tol: Some(tol),
            detail: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    /// Absent for exact integer suites.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<Precision>,
    /// Random draws rejected because they hit a pole.
    pub resampled: usize,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Exact checks on the Picard lattice: the 81 Coxeter relations, the R_J1 root matrix,
/// translation classification, Kac translations and the two short-vector counts.
pub fn lattice_suite() -> SuiteReport {
    let mut checks = Vec::new();
    let rel = verify_weyl_relations();
    let bad: Vec<String> = rel.failures().map(|c| format!("(s{} s{})^{}", c.i, c.j, c.order)).collect();
    checks.push(CheckResult::exact(
        format!("coxeter relations ({} pairs)", rel.checks.len()),
        rel.all_hold(),
        bad.join(", "),
    ));

    let anchor = word_matrix(&Word::r_j1()).root_matrix();
    checks.push(CheckResult::exact("R_J1 root matrix", anchor == Some(R_J1_REFERENCE_ROOT_MATRIX), ""));

    let r1 = classify_translation(&word_matrix(&Word::r_j1()));
    checks.push(CheckResult::exact("R_J1 is not a translation", r1.is_err(), ""));
    for (name, w, len, class) in
        [("T_J1", Word::t_j1(), 4, NeighbourClass::NextNearest), ("T_J2", Word::t_j2(), 2, NeighbourClass::Nearest)]
    {
        let c = classify_translation(&word_matrix(&w));
        let (ok, detail) = match &c {
            Ok(c) => (c.squared_length == len && c.class == class, format!("squared length {}", c.squared_length)),
            Err(e) => (false, e.to_string()),
        };
        checks.push(CheckResult::exact(format!("{name} is a translation of squared length {len}"), ok, detail));
    }

    let h0 = DivisorClass::h0();
    let h1 = DivisorClass::h1();
    let e = DivisorClass::e;
    let a1 = 2 * h0 - e(5) - e(6) - e(7) - e(8);
    let a2 = h0 - h1;
    for (name, alpha, w) in [("T_J1", a1, Word::t_j1()), ("T_J2", a2, Word::t_j2())] {
        let ok = kac_translation(&alpha).map(|k| k == word_matrix(&w)).unwrap_or(false);
        checks.push(CheckResult::exact(format!("Kac translation by {alpha} equals {name}"), ok, ""));
    }

    for (norm, want) in [(2, 240usize), (4, 2160)] {
        let n = enumerate_short_vectors(norm).count();
        checks.push(CheckResult::exact(format!("E8 vectors of norm {norm}"), n == want, format!("{n}")));
    }
    SuiteReport { suite: "lattice".into(), seed: 0, precision: None, resampled: 0, checks }
}

fn rel<R: Real>(r: Cx<R>, scale: R) -> f64 {
    (cabs(r) / scale.max(R::one())).to_f64()
}

/// cd straight from the theta series, without argument reduction.
fn cd_series<R: Real>(ctx: &EllipticContext<R>, u: Cx<R>) -> Option<ProjectiveValue<R>> {
    let t = ctx.theta(u).ok()?;
    ProjectiveValue::new(t.h1, ctx.sqrt_k() * t.theta1)
}

struct Draw<R: Real> {
    ctx: EllipticContext<R>,
    u: Cx<R>,
    v: Cx<R>,
}

fn draw<R: Real, G: Rng>(rng: &mut G, tol: f64) -> Draw<R> {
    let k: f64 = rng.random_range(0.2..0.8);
    let mut z = || from_c64::<R>(Complex::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)));
    let (u, v) = (z(), z());
    Draw { ctx: EllipticContext::new(cx(k, 0.0), tol).expect("regular modulus"), u, v }
}

const ELLIPTIC_CHECKS: [&str; 8] = [
    "sn^2 + cn^2 = 1",
    "k^2 sn^2 + dn^2 = 1",
    "sn addition formula",
    "cd(u + 4K) = cd(u)",
    "cd(u + 2iK') = cd(u)",
    "cd(u + 2K) = -cd(u)",
    "cd(u + iK') = 1/(k cd(u))",
    "theta addition formula",
];

fn elliptic_sample<R: Real>(d: &Draw<R>) -> Option<[f64; 8]> {
    let ctx = &d.ctx;
    let j = ctx.jacobi(d.u).ok()?;
    let one = Complex::<R>::one();
    let s2 = cabs(j.sn * j.sn);
    let k2 = ctx.k * ctx.k;
    let two = R::from_f64(2.0);
    let i = crate::scalar::imag_unit::<R>();
    let base = cd_series(ctx, d.u)?;
    let shifted = |s: Cx<R>| cd_series(ctx, d.u + s);
    Some([
        rel(j.sn * j.sn + j.cn * j.cn - one, s2),
        rel(k2 * j.sn * j.sn + j.dn * j.dn - one, s2),
        ctx.sn_addition_check(d.u, d.v).ok()?,
        shifted(ctx.big_k.scale(two * two))?.chordal(&base),
        shifted(i * ctx.big_kprime.scale(two))?.chordal(&base),
        shifted(ctx.big_k.scale(two))?.chordal(&base.neg()),
        shifted(i * ctx.big_kprime)?.chordal(&base.inv_scaled(ctx.k)),
        ctx.theta_addition_check(d.u, d.v).ok()?,
    ])
}

/// Jacobi and theta identities on `samples` random complex arguments (modulus uniform in
/// `[0.2, 0.8]`). Draws that land on a pole are redrawn.
pub fn elliptic_suite<R: Real>(samples: usize, seed: u64, tol: f64) -> SuiteReport {
    let mut rng = sample_rng(seed, 0);
    let mut worst = [0.0f64; 8];
    let mut resampled = 0;
    let mut taken = 0;
    while taken < samples {
        match elliptic_sample(&draw::<R, _>(&mut rng, tol)) {
            Some(r) => {
                for (w, x) in worst.iter_mut().zip(r) {
                    *w = w.max(x);
                }
                taken += 1;
            }
            None => resampled += 1,
        }
    }
    let checks = ELLIPTIC_CHECKS.iter().zip(worst).map(|(n, w)| CheckResult::numeric(*n, samples, w, tol)).collect();
    SuiteReport { suite: "elliptic".into(), seed, precision: Some(R::PRECISION), resampled, checks }
}

/// Landen formulas and the cd/℘ correspondence on random arguments, plus base-point transport
/// and the coordinate round trip on random states (a tenth as many, at least one).
pub fn landen_suite<R: Real>(samples: usize, seed: u64, tol: f64, transport_tol: f64) -> SuiteReport {
    let mut rng = sample_rng(seed, 0);
    let (mut landen, mut corr) = (0.0f64, 0.0f64);
    let mut resampled = 0;
    let mut taken = 0;
    while taken < samples {
        let d = draw::<R, _>(&mut rng, tol);
        let s = WeierstrassSetting::new(d.ctx, R::one()).expect("regular modulus");
        match (landen_residual(d.u, &s), cd_wp_residual(d.u, &s)) {
            (Ok(a), Ok(b)) => {
                landen = landen.max(a);
                corr = corr.max(b);
                taken += 1;
            }
            _ => resampled += 1,
        }
    }
    let states = (samples / 10).max(1);
    let (mut transport, mut round_trip) = (0.0f64, 0.0f64);
    let mut taken = 0;
    let mut stream = 1;
    while taken < states {
        let st = random_state::<R, _>(&mut sample_rng(seed, stream), tol);
        stream += 1;
        let s = WeierstrassSetting::new(st.ctx, R::one()).expect("regular modulus");
        let res = base_point_transport_residual(&st, &s).and_then(|t| {
            let back = weierstrass_to_jacobi(&jacobi_to_weierstrass(&st, &s)?, &s)?;
            Ok((t, equivalence_deviation(&back, &st).max()))
        });
        match res {
            Ok((t, r)) => {
                transport = transport.max(t);
                round_trip = round_trip.max(r);
                taken += 1;
            }
            Err(_) => resampled += 1,
        }
    }
    let checks = vec![
        CheckResult::numeric("Landen formulas for cn and dn", samples, landen, tol),
        CheckResult::numeric("cd through wp at the descended modulus", samples, corr, tol),
        CheckResult::numeric("base points map to (wp(t + b_i), wp(t - b_i))", states, transport, transport_tol),
        CheckResult::numeric("(x, y) -> (f, g) -> (x, y) round trip", states, round_trip, transport_tol),
    ];
    SuiteReport { suite: "appendixB".into(), seed, precision: Some(R::PRECISION), resampled, checks }
}

/// Every relation of the extended group on `samples` random states.
pub fn extended_suite<R: Real>(samples: usize, seed: u64, tol: f64) -> SuiteReport {
    let r = verify_extended_relations::<R>(samples, seed, tol);
    let checks =
        r.relations.iter().map(|x| CheckResult::numeric(x.name.clone(), r.samples, x.max_deviation, tol)).collect();
    SuiteReport { suite: "extended".into(), seed, precision: Some(R::PRECISION), resampled: r.resampled, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_suite_passes() {
        let r = lattice_suite();
        assert!(r.all_passed(), "{:?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    }

    #[test]
    fn small_numeric_suites() {
        assert!(elliptic_suite::<f64>(10, 1, 1e-10).all_passed());
        assert!(landen_suite::<f64>(10, 1, 1e-9, 1e-8).all_passed());
    }
}
