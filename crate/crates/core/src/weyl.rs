//! Birational action of the extended affine Weyl group on surface data
//! `(c1..c8, η, x, y)`.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::elliptic::{lattice_residue, EllipticContext, EllipticError};
use crate::picard::braid_order;
use crate::projective::{cross_ratio, solve_cross_ratio, ProjectiveValue, Ratio};
use crate::scalar::{cabs, cx, imag_unit, Cx, Precision, Real};
use crate::word::{Generator, Word};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeylError {
    #[error("s2 is degenerate: cd(2η - (c1-c2)/2) and cd(2η + (c1-c2)/2) coincide")]
    MoebiusDegenerate,
    #[error("(x, y) sits on a base point blown up by s2; the image is not determined")]
    Indeterminate,
    #[error("at position {position} ({symbol}): {source}")]
    AtPosition {
        position: usize,
        symbol: Generator,
        #[source]
        source: Box<WeylError>,
    },
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

/// Full surface data: eight parameters, `η`, and the point `(x, y)` of `P1 x P1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceState<R: Real> {
    pub c: [Cx<R>; 8],
    pub eta: Cx<R>,
    pub x: ProjectiveValue<R>,
    pub y: ProjectiveValue<R>,
    pub ctx: EllipticContext<R>,
}

impl<R: Real> SurfaceState<R> {
    pub fn new(
        c: [Cx<R>; 8],
        eta: Cx<R>,
        x: ProjectiveValue<R>,
        y: ProjectiveValue<R>,
        ctx: EllipticContext<R>,
    ) -> Self {
        SurfaceState { c, eta, x, y, ctx }
    }

    pub fn sum_c(&self) -> Cx<R> {
        self.c.iter().fold(Complex::zero(), |a, b| a + b)
    }

    /// `λ = (c1 + ... + c8) / 2`.
    pub fn lambda(&self) -> Cx<R> {
        self.sum_c().scale(R::from_f64(0.5))
    }

    pub fn convert<S: Real>(&self) -> Result<SurfaceState<S>, EllipticError> {
        Ok(SurfaceState {
            c: self.c.map(crate::scalar::convert),
            eta: crate::scalar::convert(self.eta),
            x: self.x.convert(),
            y: self.y.convert(),
            ctx: self.ctx.convert()?,
        })
    }

    fn shift_params(&mut self, dc: Cx<R>, deta: Cx<R>) {
        for c in self.c.iter_mut() {
            *c += dc;
        }
        self.eta += deta;
    }
}

/// `y`-image of `s2`, solved from
/// `(s2(y) - A)/(s2(y) - B) · (x - cd(η+c1))/(x - cd(η+c2)) · (y - cd(η-c2))/(y - cd(η-c1)) = g(0)`
/// with `A = cd(2η - (c1-c2)/2)`, `B = cd(2η + (c1-c2)/2)`.
pub fn solve_s2_y<R: Real>(st: &SurfaceState<R>) -> Result<ProjectiveValue<R>, WeylError> {
    let ctx = &st.ctx;
    let half = R::from_f64(0.5);
    let (c1, c2, eta) = (st.c[0], st.c[1], st.eta);
    let diff = (c1 - c2).scale(half);
    let two_eta = eta.scale(R::from_f64(2.0));
    let a = ctx.cd_projective(two_eta - diff);
    let b = ctx.cd_projective(two_eta + diff);
    if a.chordal(&b) <= 1e3 * R::epsilon().to_f64() {
        return Err(WeylError::MoebiusDegenerate);
    }
    let p1p = ctx.cd_projective(eta + c1);
    let p2p = ctx.cd_projective(eta + c2);
    let p1m = ctx.cd_projective(eta - c1);
    let p2m = ctx.cd_projective(eta - c2);
    let xf = cross_ratio(&st.x, &p1p, &p2p);
    let yf = cross_ratio(&st.y, &p2m, &p1m);
    if xf.is_indeterminate(R::one()) || yf.is_indeterminate(R::one()) {
        return Err(WeylError::Indeterminate);
    }
    let r = s2_invariant(st, Complex::zero()) / (xf * yf);
    solve_cross_ratio(&a, &b, r).ok_or(WeylError::Indeterminate)
}

/// The function `g(z)` whose value at `z = 0` is the constant of the `s2` relation.
/// It does not depend on `z`.
pub fn s2_invariant<R: Real>(st: &SurfaceState<R>, z: Cx<R>) -> Ratio<R> {
    let ctx = &st.ctx;
    let half = R::from_f64(0.5);
    let (c1, c2, eta) = (st.c[0], st.c[1], st.eta);
    let diff = (c1 - c2).scale(half);
    let two_eta = eta.scale(R::from_f64(2.0));
    let a = ctx.cd_projective(two_eta - diff);
    let b = ctx.cd_projective(two_eta + diff);
    let f1 = cross_ratio(&ctx.cd_projective(eta - z), &ctx.cd_projective(eta - c2), &ctx.cd_projective(eta - c1));
    let f2 = cross_ratio(&ctx.cd_projective(eta + z), &ctx.cd_projective(eta + c1), &ctx.cd_projective(eta + c2));
    let f3 = cross_ratio(&ctx.cd_projective(z + (c1 + c2).scale(half)), &a, &b);
    f1 * f2 * f3
}

/// Applies one generator. Acting from the left: the result is `g(state)`.
pub fn apply_generator<R: Real>(g: Generator, st: &SurfaceState<R>) -> Result<SurfaceState<R>, WeylError> {
    let mut out = st.clone();
    let ctx = &st.ctx;
    let i = imag_unit::<R>();
    let half_kp = i * ctx.big_kprime.scale(R::from_f64(0.5));
    let big_k = ctx.big_k;
    match g {
        Generator::S(0) => out.c.swap(6, 7),
        Generator::S(1) => {
            std::mem::swap(&mut out.x, &mut out.y);
            out.eta = -st.eta;
        }
        Generator::S(2) => {
            out.y = solve_s2_y(st)?;
            let t = st.eta.scale(R::from_f64(2.0)) + st.c[0] + st.c[1];
            let quarter = t.scale(R::from_f64(0.25));
            out.eta = st.eta - quarter;
            for (j, c) in out.c.iter_mut().enumerate() {
                if j < 2 {
                    *c -= quarter.scale(R::from_f64(3.0));
                } else {
                    *c += quarter;
                }
            }
        }
        Generator::S(8) => out.c.swap(0, 1),
        Generator::S(k @ 3..=7) => out.c.swap(k as usize - 2, k as usize - 1),
        Generator::S(k) => panic!("reflection index {k} out of range"),
        Generator::Iota(1) => {
            out.shift_params(-half_kp, -half_kp);
            out.x = st.x.inv_scaled(ctx.k);
        }
        Generator::Iota(2) => {
            out.shift_params(-half_kp, half_kp);
            out.y = st.y.inv_scaled(ctx.k);
        }
        Generator::Iota(3) => {
            out.shift_params(-big_k, -big_k);
            out.x = st.x.neg();
        }
        Generator::Iota(4) => {
            out.shift_params(-big_k, big_k);
            out.y = st.y.neg();
        }
        Generator::Iota(k) => panic!("iota index {k} out of range"),
    }
    Ok(out)
}

/// Applies the letters of `w` to the state from left to right.
pub fn apply_word<R: Real>(w: &Word, st: &SurfaceState<R>) -> Result<SurfaceState<R>, WeylError> {
    let mut cur = st.clone();
    for (position, g) in w.symbols().iter().enumerate() {
        cur = apply_generator(*g, &cur).map_err(|e| WeylError::AtPosition {
            position,
            symbol: *g,
            source: Box::new(e),
        })?;
    }
    Ok(cur)
}

/// Reduces every `c_i` and `η` modulo `{4K, 2iK'}`.
pub fn normalize_periods<R: Real>(st: &SurfaceState<R>) -> SurfaceState<R> {
    let mut out = st.clone();
    for c in out.c.iter_mut() {
        *c = st.ctx.reduce(*c).0;
    }
    out.eta = st.ctx.reduce(st.eta).0;
    out
}

/// Deviation between two states up to the shifts that leave all cd-built data unchanged:
/// `Δη` modulo `{2K, iK'}` and each `Δc_i − Δη` modulo `{4K, 2iK'}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateDeviation {
    /// Largest parameter residue, relative to `max(1, |parameters|)`.
    pub parameters: f64,
    /// Largest chordal distance between coordinates.
    pub coordinates: f64,
}

impl StateDeviation {
    pub fn max(&self) -> f64 {
        self.parameters.max(self.coordinates)
    }
}

fn param_scale<R: Real>(a: &SurfaceState<R>, b: &SurfaceState<R>) -> R {
    a.c.iter().chain(b.c.iter()).chain([a.eta, b.eta].iter()).fold(R::one(), |m, z| m.max(cabs(*z)))
}

/// Deviation up to the equivalences described on [`StateDeviation`].
pub fn equivalence_deviation<R: Real>(a: &SurfaceState<R>, b: &SurfaceState<R>) -> StateDeviation {
    let ctx = &a.ctx;
    let two = R::from_f64(2.0);
    let i = imag_unit::<R>();
    let (w1, w2) = ctx.periods();
    let (h1, h2) = (ctx.big_k.scale(two), i * ctx.big_kprime);
    let de = a.eta - b.eta;
    let mut p = cabs(lattice_residue(de, h1, h2));
    for (ca, cb) in a.c.iter().zip(&b.c) {
        p = p.max(cabs(lattice_residue(*ca - *cb - de, w1, w2)));
    }
    StateDeviation {
        parameters: (p / param_scale(a, b)).to_f64(),
        coordinates: a.x.chordal(&b.x).max(a.y.chordal(&b.y)),
    }
}

/// Deviation with each parameter compared modulo `{4K, 2iK'}` separately.
pub fn period_deviation<R: Real>(a: &SurfaceState<R>, b: &SurfaceState<R>) -> StateDeviation {
    let (w1, w2) = a.ctx.periods();
    let mut p = cabs(lattice_residue(a.eta - b.eta, w1, w2));
    for (ca, cb) in a.c.iter().zip(&b.c) {
        p = p.max(cabs(lattice_residue(*ca - *cb, w1, w2)));
    }
    StateDeviation {
        parameters: (p / param_scale(a, b)).to_f64(),
        coordinates: a.x.chordal(&b.x).max(a.y.chordal(&b.y)),
    }
}

/// Plain componentwise deviation (no period identification).
pub fn exact_deviation<R: Real>(a: &SurfaceState<R>, b: &SurfaceState<R>) -> StateDeviation {
    let mut p = cabs(a.eta - b.eta);
    for (ca, cb) in a.c.iter().zip(&b.c) {
        p = p.max(cabs(*ca - *cb));
    }
    StateDeviation {
        parameters: (p / param_scale(a, b)).to_f64(),
        coordinates: a.x.chordal(&b.x).max(a.y.chordal(&b.y)),
    }
}

/// Parameter box used for random states: real part in `[-0.2, 0.2]`, imaginary part in
/// `[0.1, 0.5]`.
pub fn random_parameter<G: Rng>(rng: &mut G) -> Complex<f64> {
    Complex::new(rng.random_range(-0.2..0.2), rng.random_range(0.1..0.5))
}

pub fn random_coordinate<G: Rng>(rng: &mut G) -> Complex<f64> {
    Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random state with modulus uniform in `[0.2, 0.8]`; sampled in binary64 and then
/// widened exactly to `R`.
pub fn random_state<R: Real, G: Rng>(rng: &mut G, tol: f64) -> SurfaceState<R> {
    let k: f64 = rng.random_range(0.2..0.8);
    let c: [Complex<f64>; 8] = std::array::from_fn(|_| random_parameter(rng));
    let eta = random_parameter(rng);
    let x = random_coordinate(rng);
    let y = random_coordinate(rng);
    let ctx = EllipticContext::<R>::new(cx(k, 0.0), tol).expect("k in [0.2, 0.8] is regular");
    let w = crate::scalar::from_c64::<R>;
    SurfaceState { c: c.map(w), eta: w(eta), x: ProjectiveValue::finite(w(x)), y: ProjectiveValue::finite(w(y)), ctx }
}

/// One relation `lhs = rhs` of the extended group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub lhs: Word,
    pub rhs: Word,
}

fn word_of(gs: &[Generator]) -> Word {
    Word::new(gs.to_vec())
}

/// All defining relations of the extended affine Weyl group.
pub fn extended_relations() -> Vec<Relation> {
    use Generator::{Iota, S};
    let mut out = Vec::new();
    for i in 0..9u8 {
        for j in i..9u8 {
            let l = braid_order(i as usize, j as usize) as usize;
            let lhs = if i == j { word_of(&[S(i)]).pow(2) } else { word_of(&[S(i), S(j)]).pow(l) };
            let name = if i == j { format!("s{i}^2 = 1") } else { format!("(s{i} s{j})^{l} = 1") };
            out.push(Relation { name, lhs, rhs: Word::empty() });
        }
    }
    for i in 1..=4u8 {
        for j in i..=4u8 {
            let (lhs, name) = if i == j {
                (word_of(&[Iota(i)]).pow(2), format!("i{i}^2 = 1"))
            } else {
                (word_of(&[Iota(i), Iota(j)]).pow(2), format!("(i{i} i{j})^2 = 1"))
            };
            out.push(Relation { name, lhs, rhs: Word::empty() });
        }
    }
    for i in 1..=4u8 {
        for j in (0..9u8).filter(|j| *j != 1 && *j != 2) {
            out.push(Relation {
                name: format!("i{i} s{j} = s{j} i{i}"),
                lhs: word_of(&[Iota(i), S(j)]),
                rhs: word_of(&[S(j), Iota(i)]),
            });
        }
    }
    for (i, j) in [(1, 2), (2, 1), (3, 4), (4, 3)] {
        out.push(Relation {
            name: format!("i{i} s1 = s1 i{j}"),
            lhs: word_of(&[Iota(i), S(1)]),
            rhs: word_of(&[S(1), Iota(j)]),
        });
    }
    let braids: [(u8, &[Generator]); 4] =
        [(1, &[S(2), Iota(1), Iota(2)]), (2, &[S(2), Iota(2)]), (3, &[S(2), Iota(3), Iota(4)]), (4, &[S(2), Iota(4)])];
    for (i, rhs) in braids {
        let rhs = word_of(rhs);
        out.push(Relation { name: format!("i{i} s2 = {rhs}"), lhs: word_of(&[Iota(i), S(2)]), rhs });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationResult {
    pub name: String,
    pub lhs: Word,
    pub rhs: Word,
    pub max_parameter_deviation: f64,
    pub max_coordinate_deviation: f64,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedRelationReport {
    pub seed: u64,
    pub samples: usize,
    pub precision: Precision,
    pub tol: f64,
    /// Samples redrawn because a pole or degenerate configuration was hit.
    pub resampled: usize,
    pub relations: Vec<RelationResult>,
}

impl ExtendedRelationReport {
    pub fn all_passed(&self) -> bool {
        self.relations.iter().all(|r| r.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.relations.iter().map(|r| r.max_deviation).fold(0.0, f64::max)
    }
}

/// Deterministic per-sample stream derived from the report seed.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn relation_sample<R: Real>(rels: &[Relation], seed: u64, index: u64, tol: f64) -> (Vec<StateDeviation>, usize) {
    let mut rng = sample_rng(seed, index);
    let mut redraws = 0;
    loop {
        let st = random_state::<R, _>(&mut rng, tol);
        let devs: Result<Vec<_>, WeylError> = rels
            .iter()
            .map(|r| {
                let a = apply_word(&r.lhs, &st)?;
                let b = apply_word(&r.rhs, &st)?;
                Ok(equivalence_deviation(&a, &b))
            })
            .collect();
        match devs {
            Ok(d) => return (d, redraws),
            Err(_) if redraws < 100 => redraws += 1,
            Err(e) => panic!("could not draw a regular sample state: {e}"),
        }
    }
}

/// Evaluates every extended relation on `samples` random states (in parallel, one RNG stream
/// per sample) and reports the largest deviations.
pub fn verify_extended_relations<R: Real>(samples: usize, seed: u64, tol: f64) -> ExtendedRelationReport {
    let rels = extended_relations();
    let per_sample: Vec<(Vec<StateDeviation>, usize)> =
        (0..samples.max(1) as u64).into_par_iter().map(|s| relation_sample::<R>(&rels, seed, s, tol)).collect();
    let resampled = per_sample.iter().map(|(_, r)| r).sum();
    let relations = rels
        .into_iter()
        .enumerate()
        .map(|(idx, r)| {
            let p = per_sample.iter().map(|(d, _)| d[idx].parameters).fold(0.0, f64::max);
            let c = per_sample.iter().map(|(d, _)| d[idx].coordinates).fold(0.0, f64::max);
            let m = p.max(c);
            RelationResult {
                name: r.name,
                lhs: r.lhs,
                rhs: r.rhs,
                max_parameter_deviation: p,
                max_coordinate_deviation: c,
                max_deviation: m,
                passed: m < tol,
            }
        })
        .collect();
    ExtendedRelationReport { seed, samples: samples.max(1), precision: R::PRECISION, tol, resampled, relations }
}
