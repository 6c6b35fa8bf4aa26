//! Generator symbols and words of the extended affine Weyl group.
//!
//! A word `g1 g2 ... gm` denotes the composition `g1 ∘ g2 ∘ ... ∘ gm` on the lattice,
//! so its matrix is `M(g1) M(g2) ... M(gm)`. Acting on surface data, generators act on
//! the arguments from the left: `g1` is applied to the state first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `s0..s8` (simple reflections) or `i1..i4` (diagram automorphisms acting as identities
/// on the lattice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    S(u8),
    Iota(u8),
}

impl Generator {
    pub fn s(i: u8) -> Self {
        assert!(i <= 8, "reflection index {i} out of range 0..=8");
        Generator::S(i)
    }

    pub fn iota(i: u8) -> Self {
        assert!((1..=4).contains(&i), "iota index {i} out of range 1..=4");
        Generator::Iota(i)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::S(i) => write!(f, "s{i}"),
            Generator::Iota(i) => write!(f, "i{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordParseError {
    #[error("unrecognized token `{0}` (expected s0..s8, i1..i4 or a digit string)")]
    BadToken(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Generator>);

/// Half-translation whose square is the next-nearest-neighbour translation.
pub const R_J1_DIGITS: &str = "5645348370675645234832156453483706756452348321706734830468";
/// Half-translation whose square is the nearest-neighbour translation.
pub const R_J2_DIGITS: &str = "23483256457067348356452348321";

impl Word {
    pub fn new(symbols: Vec<Generator>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s`-letters from a digit string such as `"2348"`.
    pub fn from_digits(digits: &str) -> Result<Self, WordParseError> {
        digits
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d <= 8 => Ok(Generator::S(d as u8)),
                _ => Err(WordParseError::BadToken(c.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.iter().copied().cycle().take(self.0.len() * n).collect())
    }

    /// Every generator is an involution, so the inverse is the reversed word.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn push(&mut self, g: Generator) {
        self.0.push(g);
    }

    /// True when no `iota` symbol occurs.
    pub fn is_pure_reflection(&self) -> bool {
        self.0.iter().all(|g| matches!(g, Generator::S(_)))
    }

    /// `R_J1`: the 58-letter reflection string followed by `i4 i3 i2 i1`.
    pub fn r_j1() -> Word {
        let mut w = Word::from_digits(R_J1_DIGITS).expect("valid digits");
        for i in [4, 3, 2, 1] {
            w.push(Generator::Iota(i));
        }
        w
    }

    pub fn t_j1() -> Word {
        Word::r_j1().pow(2)
    }

    pub fn r_j2() -> Word {
        Word::from_digits(R_J2_DIGITS).expect("valid digits")
    }

    pub fn t_j2() -> Word {
        Word::r_j2().pow(2)
    }

    /// Looks up `rj1`, `tj1`, `rj2`, `tj2` (case-insensitive, `_` ignored).
    pub fn named(name: &str) -> Option<Word> {
        match name.to_ascii_lowercase().replace('_', "").as_str() {
            "rj1" => Some(Word::r_j1()),
            "tj1" => Some(Word::t_j1()),
            "rj2" => Some(Word::r_j2()),
            "tj2" => Some(Word::t_j2()),
            _ => None,
        }
    }
}

impl FromStr for Word {
    type Err = WordParseError;

    /// Whitespace- or comma-separated tokens: `s0`..`s8`, `i1`..`i4` (also `ι1`..`ι4`),
    /// or bare digit strings where each digit is a reflection index.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            if tok.chars().all(|c| c.is_ascii_digit()) {
                out.extend(Word::from_digits(tok)?.0);
                continue;
            }
            let bad = || WordParseError::BadToken(tok.to_string());
            let (head, idx) = if let Some(rest) = tok.strip_prefix('ι') {
                ('i', rest)
            } else {
                let mut chars = tok.chars();
                let head = chars.next().ok_or_else(bad)?.to_ascii_lowercase();
                (head, chars.as_str())
            };
            let n: u8 = idx.parse().map_err(|_| bad())?;
            match head {
                's' if n <= 8 => out.push(Generator::S(n)),
                'i' if (1..=4).contains(&n) => out.push(Generator::Iota(n)),
                _ => return Err(bad()),
            }
        }
        Ok(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
