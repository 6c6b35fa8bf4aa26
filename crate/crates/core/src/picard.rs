//! Exact arithmetic on the rank-10 Picard lattice with basis `H0, H1, E1..E8`,
//! its affine E8 root system, reflections, Kac translations and the E8 short vectors.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word::{Generator, Word};

pub const RANK: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PicardError {
    #[error("class {0} is not orthogonal to the anticanonical class")]
    NotOrthogonalToDelta(DivisorClass),
    #[error("map is not a translation: {0}")]
    NotTranslation(String),
}

/// Integer divisor class, coefficients ordered `(H0, H1, E1, ..., E8)`.
/// Arithmetic panics on `i64` overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass(pub [i64; RANK]);

impl DivisorClass {
    pub const ZERO: DivisorClass = DivisorClass([0; RANK]);

    pub fn h0() -> Self {
        Self::unit(0)
    }

    pub fn h1() -> Self {
        Self::unit(1)
    }

    /// Exceptional class `E_i`, `i` in `1..=8`.
    pub fn e(i: usize) -> Self {
        assert!((1..=8).contains(&i), "exceptional index {i} out of range");
        Self::unit(i + 1)
    }

    pub fn unit(idx: usize) -> Self {
        let mut c = [0; RANK];
        c[idx] = 1;
        DivisorClass(c)
    }

    pub fn coeffs(&self) -> &[i64; RANK] {
        &self.0
    }

    /// Anticanonical class `2H0 + 2H1 - E1 - ... - E8`.
    pub fn delta() -> Self {
        let mut c = [-1; RANK];
        c[0] = 2;
        c[1] = 2;
        DivisorClass(c)
    }

    pub fn checked_add(self, o: Self) -> Option<Self> {
        let mut c = [0; RANK];
        for (i, slot) in c.iter_mut().enumerate() {
            *slot = self.0[i].checked_add(o.0[i])?;
        }
        Some(DivisorClass(c))
    }

    pub fn checked_scale(self, n: i64) -> Option<Self> {
        let mut c = [0; RANK];
        for (i, slot) in c.iter_mut().enumerate() {
            *slot = self.0[i].checked_mul(n)?;
        }
        Some(DivisorClass(c))
    }
}

impl Add for DivisorClass {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("divisor coefficient overflow")
    }
}

impl Neg for DivisorClass {
    type Output = Self;
    fn neg(self) -> Self {
        self.checked_scale(-1).expect("divisor coefficient overflow")
    }
}

impl Sub for DivisorClass {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul<DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, v: DivisorClass) -> DivisorClass {
        v.checked_scale(self).expect("divisor coefficient overflow")
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["H0", "H1", "E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8"];
        let mut first = true;
        for (c, name) in self.0.iter().zip(names) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}{name}")?;
            } else {
                write!(f, "{sign}{mag}{name}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn cmul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("lattice arithmetic overflow")
}

fn cadd(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("lattice arithmetic overflow")
}

/// Intersection form: `(H0|H1) = 1`, `(Hi|Hi) = 0`, `(Ei|Ej) = -δij`, `(H|E) = 0`.
pub fn intersection(a: &DivisorClass, b: &DivisorClass) -> i64 {
    let mut s = cadd(cmul(a.0[0], b.0[1]), cmul(a.0[1], b.0[0]));
    for i in 2..RANK {
        s = cadd(s, -cmul(a.0[i], b.0[i]));
    }
    s
}

/// Gram matrix of the intersection form in the `(H0, H1, E1..E8)` basis.
pub fn gram_matrix() -> [[i64; RANK]; RANK] {
    let mut g = [[0; RANK]; RANK];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = intersection(&DivisorClass::unit(i), &DivisorClass::unit(j));
        }
    }
    g
}

/// Simple root `α_i`, `i` in `0..=8`.
pub fn simple_root(i: usize) -> DivisorClass {
    use DivisorClass as D;
    match i {
        0 => D::e(7) - D::e(8),
        1 => D::h1() - D::h0(),
        2 => D::h0() - D::e(1) - D::e(2),
        3..=7 => D::e(i - 1) - D::e(i),
        8 => D::e(1) - D::e(2),
        _ => panic!("simple root index {i} out of range 0..=8"),
    }
}

/// Simple roots `α0..α8` together with the null root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleRootSet {
    pub alphas: [DivisorClass; 9],
    pub delta: DivisorClass,
}

impl SimpleRootSet {
    pub fn new() -> Self {
        SimpleRootSet { alphas: std::array::from_fn(simple_root), delta: DivisorClass::delta() }
    }

    pub fn pairing_matrix(&self) -> [[i64; 9]; 9] {
        let mut m = [[0; 9]; 9];
        for i in 0..9 {
            for j in 0..9 {
                m[i][j] = intersection(&self.alphas[i], &self.alphas[j]);
            }
        }
        m
    }
}

impl Default for SimpleRootSet {
    fn default() -> Self {
        Self::new()
    }
}

/// Coefficients of `δ` on `α0..α8`.
pub const DELTA_MARKS: [i64; 9] = [1, 2, 4, 6, 5, 4, 3, 2, 3];

/// True for the edges of the affine E8 diagram: the chain `1-2-...-7` plus `3-8` and `7-0`.
pub fn adjacent(i: usize, j: usize) -> bool {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    (1..=6).contains(&a) && b == a + 1 || (a, b) == (3, 8) || (a, b) == (0, 7)
}

/// Order of `s_i s_j`: 1 on the diagonal, 3 for adjacent nodes, 2 otherwise.
pub fn braid_order(i: usize, j: usize) -> u32 {
    if i == j {
        1
    } else if adjacent(i, j) {
        3
    } else {
        2
    }
}

pub fn reflect(i: usize, v: &DivisorClass) -> DivisorClass {
    let a = simple_root(i);
    *v + intersection(v, &a) * a
}

/// Integer linear map on Pic, stored as `m[row][col]` (columns are images of basis vectors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeMap {
    pub m: [[i64; RANK]; RANK],
}

impl LatticeMap {
    pub fn identity() -> Self {
        let mut m = [[0; RANK]; RANK];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        LatticeMap { m }
    }

    pub fn from_columns(cols: [DivisorClass; RANK]) -> Self {
        let mut m = [[0; RANK]; RANK];
        for (c, col) in cols.iter().enumerate() {
            for r in 0..RANK {
                m[r][c] = col.0[r];
            }
        }
        LatticeMap { m }
    }

    pub fn reflection(i: usize) -> Self {
        Self::from_columns(std::array::from_fn(|c| reflect(i, &DivisorClass::unit(c))))
    }

    pub fn apply(&self, v: &DivisorClass) -> DivisorClass {
        let mut out = [0; RANK];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut s = 0;
            for c in 0..RANK {
                s = cadd(s, cmul(self.m[r][c], v.0[c]));
            }
            *slot = s;
        }
        DivisorClass(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeMap) -> LatticeMap {
        Self::from_columns(std::array::from_fn(|c| self.apply(&other.apply(&DivisorClass::unit(c)))))
    }

    pub fn pow(&self, n: u32) -> LatticeMap {
        (0..n).fold(LatticeMap::identity(), |acc, _| acc.compose(self))
    }

    pub fn is_identity(&self) -> bool {
        *self == LatticeMap::identity()
    }

    /// `Mᵀ G M = G`.
    pub fn preserves_form(&self) -> bool {
        (0..RANK).all(|a| {
            (0..RANK).all(|b| {
                let u = self.apply(&DivisorClass::unit(a));
                let v = self.apply(&DivisorClass::unit(b));
                intersection(&u, &v) == intersection(&DivisorClass::unit(a), &DivisorClass::unit(b))
            })
        })
    }

    pub fn fixes_delta(&self) -> bool {
        self.apply(&DivisorClass::delta()) == DivisorClass::delta()
    }

    /// Images of `α0..α8` written in the `α` basis (row `j` is the image of `α_j`).
    pub fn root_matrix(&self) -> Option<[[i64; 9]; 9]> {
        let mut out = [[0; 9]; 9];
        for (j, row) in out.iter_mut().enumerate() {
            *row = root_coordinates(&self.apply(&simple_root(j)))?;
        }
        Some(out)
    }
}

/// Root matrix of R_J1: row `i` lists the coefficients of the image of `α_i` on `α0..α8`.
pub const R_J1_REFERENCE_ROOT_MATRIX: [[i64; 9]; 9] = [
    [-1, 0, 0, 0, 0, 0, 0, 0, 0],
    [-1, -1, -4, -6, -5, -4, -3, -2, -3],
    [0, 0, 1, 2, 1, 0, 0, 0, 1],
    [0, 0, 0, -1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, -1, 0, 0, 0, 0],
    [1, 1, 2, 4, 4, 3, 3, 2, 2],
    [0, 0, 0, 0, 0, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, -1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, -1],
];

/// Matrix of a word: `M(g1) M(g2) ... M(gm)`. `iota` symbols act as the identity.
pub fn word_matrix(word: &Word) -> LatticeMap {
    word.symbols().iter().fold(LatticeMap::identity(), |acc, g| match g {
        Generator::S(i) => acc.compose(&LatticeMap::reflection(*i as usize)),
        Generator::Iota(_) => acc,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeRelationCheck {
    pub i: usize,
    pub j: usize,
    pub order: u32,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeRelationReport {
    pub checks: Vec<LatticeRelationCheck>,
}

impl LatticeRelationReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LatticeRelationCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Checks `(s_i s_j)^{l_ij} = 1` for all 81 ordered pairs.
pub fn verify_weyl_relations() -> LatticeRelationReport {
    let mut checks = Vec::with_capacity(81);
    for i in 0..9 {
        for j in 0..9 {
            let order = braid_order(i, j);
            let p = LatticeMap::reflection(i).compose(&LatticeMap::reflection(j));
            checks.push(LatticeRelationCheck { i, j, order, holds: p.pow(order).is_identity() });
        }
    }
    LatticeRelationReport { checks }
}

/// Kac translation `λ ↦ λ + (δ|λ)α − ((α|α)(δ|λ)/2 + (α|λ))δ`.
pub fn kac_translation(alpha: &DivisorClass) -> Result<LatticeMap, PicardError> {
    let delta = DivisorClass::delta();
    if intersection(alpha, &delta) != 0 {
        return Err(PicardError::NotOrthogonalToDelta(*alpha));
    }
    let aa = intersection(alpha, alpha);
    debug_assert!(aa % 2 == 0);
    Ok(LatticeMap::from_columns(std::array::from_fn(|c| {
        let l = DivisorClass::unit(c);
        let dl = intersection(&delta, &l);
        let coef = cadd(cmul(aa / 2, dl), intersection(alpha, &l));
        l + dl * *alpha - coef * delta
    })))
}

/// Inverse of the Gram matrix of `α1..α8` (integral since E8 is unimodular).
fn finite_gram_inverse() -> [[i64; 8]; 8] {
    let mut a = [[0f64; 16]; 8];
    for i in 0..8 {
        for j in 0..8 {
            a[i][j] = intersection(&simple_root(i + 1), &simple_root(j + 1)) as f64;
        }
        a[i][8 + i] = 1.0;
    }
    for col in 0..8 {
        let piv = (col..8).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..8 {
            if r != col {
                let f = a[r][col];
                let pivot_row = a[col];
                for (v, pv) in a[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    let mut inv = [[0i64; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            inv[i][j] = a[i][8 + j].round() as i64;
        }
    }
    // exactness check
    for i in 0..8 {
        for j in 0..8 {
            let s: i64 = (0..8).map(|t| intersection(&simple_root(i + 1), &simple_root(t + 1)) * inv[t][j]).sum();
            assert_eq!(s, i64::from(i == j), "E8 Gram inverse is not integral");
        }
    }
    inv
}

/// Solves for `α = Σ_{i=1..8} a_i α_i` from the pairings `p_j = (α|α_j)`, `j = 1..8`.
fn solve_finite(p: &[i64; 8]) -> [i64; 8] {
    static INV: std::sync::OnceLock<[[i64; 8]; 8]> = std::sync::OnceLock::new();
    let inv = INV.get_or_init(finite_gram_inverse);
    std::array::from_fn(|i| (0..8).map(|j| cmul(inv[i][j], p[j])).fold(0, cadd))
}

/// Coordinates on `α0..α8` of a class in the root lattice, or `None` if it is not in it.
pub fn root_coordinates(v: &DivisorClass) -> Option<[i64; 9]> {
    let p: [i64; 8] = std::array::from_fn(|j| intersection(v, &simple_root(j + 1)));
    let b = solve_finite(&p);
    let mut rest = *v;
    for (i, bi) in b.iter().enumerate() {
        rest = rest - *bi * simple_root(i + 1);
    }
    // what remains must be a multiple of δ
    let delta = DivisorClass::delta();
    let n = rest.0[0] / 2;
    if rest != n * delta {
        return None;
    }
    let mut out = [0; 9];
    out[0] = n;
    for i in 1..9 {
        out[i] = cadd(b[i - 1], cmul(n, DELTA_MARKS[i]));
    }
    Some(out)
}

pub fn from_root_coordinates(a: &[i64; 9]) -> DivisorClass {
    (0..9).fold(DivisorClass::ZERO, |acc, i| acc + a[i] * simple_root(i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NeighbourClass {
    Identity,
    /// Squared length 2.
    Nearest,
    /// Squared length 4.
    NextNearest,
    Other,
}

impl NeighbourClass {
    pub fn from_length(l: i64) -> Self {
        match l {
            0 => NeighbourClass::Identity,
            2 => NeighbourClass::Nearest,
            4 => NeighbourClass::NextNearest,
            _ => NeighbourClass::Other,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NeighbourClass::Identity => "identity",
            NeighbourClass::Nearest => "NV",
            NeighbourClass::NextNearest => "NNV",
            NeighbourClass::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslationClass {
    pub is_translation: bool,
    /// `(α|α_j)` for `j = 0..8`.
    pub alpha_pairings: [i64; 9],
    /// `-(α|α)`.
    pub squared_length: i64,
    /// Translation vector in the span of `α1..α8` (representative modulo `δ`).
    pub alpha: DivisorClass,
    /// `α` in doubled standard E8 coordinates.
    pub e8_doubled: [i64; 8],
    pub class: NeighbourClass,
    /// True when the map equals the Kac translation by `alpha` on all of Pic.
    pub matches_kac: bool,
}

/// Recognizes `α_j ↦ α_j − (α|α_j)δ` and recovers `α` and its squared length.
pub fn classify_translation(map: &LatticeMap) -> Result<TranslationClass, PicardError> {
    let delta = DivisorClass::delta();
    let mut pairings = [0; 9];
    for (j, slot) in pairings.iter_mut().enumerate() {
        let a = simple_root(j);
        let d = map.apply(&a) - a;
        let n = d.0[0] / 2;
        if d != n * delta {
            return Err(PicardError::NotTranslation(format!(
                "image of α{j} differs from α{j} by {d}, not a multiple of δ"
            )));
        }
        *slot = -n;
    }
    let p: [i64; 8] = std::array::from_fn(|j| pairings[j + 1]);
    let coeffs = solve_finite(&p);
    let alpha = (0..8).fold(DivisorClass::ZERO, |acc, i| acc + coeffs[i] * simple_root(i + 1));
    if intersection(&alpha, &simple_root(0)) != pairings[0] {
        return Err(PicardError::NotTranslation("pairings are inconsistent with a vector orthogonal to δ".into()));
    }
    let squared_length = -intersection(&alpha, &alpha);
    let matches_kac = kac_translation(&alpha).map(|k| k == *map).unwrap_or(false);
    Ok(TranslationClass {
        is_translation: true,
        alpha_pairings: pairings,
        squared_length,
        alpha,
        e8_doubled: e8_coordinates(&coeffs),
        class: NeighbourClass::from_length(squared_length),
        matches_kac,
    })
}

/// Standard E8 simple roots in doubled coordinates, indexed to match `α1..α8`.
/// The intersection form on the `α` span is carried to minus the Euclidean form.
pub const E8_SIMPLE_DOUBLED: [[i64; 8]; 8] = [
    [1, -1, -1, -1, -1, -1, -1, 1],
    [-2, 2, 0, 0, 0, 0, 0, 0],
    [0, -2, 2, 0, 0, 0, 0, 0],
    [0, 0, -2, 2, 0, 0, 0, 0],
    [0, 0, 0, -2, 2, 0, 0, 0],
    [0, 0, 0, 0, -2, 2, 0, 0],
    [0, 0, 0, 0, 0, -2, 2, 0],
    [2, 2, 0, 0, 0, 0, 0, 0],
];

/// Maps `Σ a_i α_i` (`i = 1..8`) to doubled standard E8 coordinates.
pub fn e8_coordinates(a: &[i64; 8]) -> [i64; 8] {
    let mut out = [0; 8];
    for (i, ai) in a.iter().enumerate() {
        for (slot, r) in out.iter_mut().zip(E8_SIMPLE_DOUBLED[i]) {
            *slot = cadd(*slot, cmul(*ai, r));
        }
    }
    out
}

/// Squared Euclidean length of a doubled-coordinate vector.
pub fn e8_norm(doubled: &[i64; 8]) -> i64 {
    doubled.iter().map(|x| x * x).sum::<i64>() / 4
}

/// An E8 lattice vector stored with doubled coordinates (all even or all odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct E8Vector(pub [i64; 8]);

impl E8Vector {
    pub fn coordinates(&self) -> [f64; 8] {
        self.0.map(|x| x as f64 / 2.0)
    }

    pub fn norm(&self) -> i64 {
        e8_norm(&self.0)
    }
}

impl fmt::Display for E8Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|&x| if x % 2 == 0 { format!("{}", x / 2) } else { format!("{x}/2") }).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Lazy enumeration of E8 vectors of a given squared length in the standard model:
/// integer or all-half-integer 8-tuples with even coordinate sum.
#[derive(Debug, Clone)]
pub struct ShortVectors {
    target: i64,
    phase: usize,
    candidates: [Vec<i64>; 2],
    pos: Vec<usize>,
    start: usize,
}

pub fn enumerate_short_vectors(norm: i64) -> ShortVectors {
    let target = 4 * norm.max(0);
    let bound = (target as f64).sqrt().floor() as i64;
    let candidates = [0i64, 1].map(|p| (-bound..=bound).filter(|c| c.rem_euclid(2) == p).collect());
    ShortVectors {
        target: if norm < 0 { -1 } else { target },
        phase: if norm < 0 { 2 } else { 0 },
        candidates,
        pos: Vec::with_capacity(8),
        start: 0,
    }
}

impl Iterator for ShortVectors {
    type Item = E8Vector;

    fn next(&mut self) -> Option<E8Vector> {
        loop {
            if self.phase >= 2 {
                return None;
            }
            let cand = &self.candidates[self.phase];
            let level = self.pos.len();
            let used: i64 = self.pos.iter().map(|&j| cand[j] * cand[j]).sum();
            if level == 8 {
                let v: [i64; 8] = std::array::from_fn(|i| cand[self.pos[i]]);
                let ok = used == self.target && v.iter().sum::<i64>().rem_euclid(4) == 0;
                let last = self.pos.pop().expect("nonempty");
                self.start = last + 1;
                if ok {
                    return Some(E8Vector(v));
                }
                continue;
            }
            let min_sq = self.phase as i64;
            let remaining = self.target - used - min_sq * (7 - level as i64);
            let found = (self.start..cand.len()).find(|&j| {
                let c2 = cand[j] * cand[j];
                if level == 7 {
                    c2 == self.target - used
                } else {
                    c2 <= remaining
                }
            });
            match found {
                Some(j) => {
                    self.pos.push(j);
                    self.start = 0;
                }
                None => match self.pos.pop() {
                    Some(last) => self.start = last + 1,
                    None => {
                        self.phase += 1;
                        self.start = 0;
                    }
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_values() {
        assert_eq!(intersection(&DivisorClass::h0(), &DivisorClass::h1()), 1);
        assert_eq!(intersection(&DivisorClass::e(3), &DivisorClass::e(3)), -1);
        let d = DivisorClass::delta();
        assert_eq!(intersection(&d, &d), 0);
    }

    #[test]
    fn delta_in_root_coordinates() {
        assert_eq!(root_coordinates(&DivisorClass::delta()), Some(DELTA_MARKS));
        assert_eq!(root_coordinates(&DivisorClass::h0()), None);
    }

    #[test]
    fn reflection_examples() {
        assert_eq!(reflect(1, &DivisorClass::h0()), DivisorClass::h1());
        let expect = DivisorClass::h0() + DivisorClass::h1() - DivisorClass::e(1) - DivisorClass::e(2);
        assert_eq!(reflect(2, &DivisorClass::h1()), expect);
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_short_vectors(0).count(), 1);
        assert_eq!(enumerate_short_vectors(2).count(), 240);
        assert_eq!(enumerate_short_vectors(1).count(), 0);
        assert_eq!(enumerate_short_vectors(-2).count(), 0);
    }

    #[test]
    fn display() {
        let v = DivisorClass::h0() - 2 * DivisorClass::e(5);
        assert_eq!(v.to_string(), "H0-2E5");
        assert_eq!(DivisorClass::ZERO.to_string(), "0");
    }
}
