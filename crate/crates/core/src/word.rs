//! Words over a signed generator alphabet.
//!
//! Generator `i` (0-based) is the letter `i + 1`; its inverse is `-(i + 1)`.
//! Letters are ordered `a < a⁻¹ < b < b⁻¹ < …`, which drives every shortlex
//! tie-break in the crate.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidSpec("alphabet is empty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(|c| c.is_whitespace() || c == '^') {
                return Err(Error::InvalidSpec(alloc::format!("bad generator name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidSpec(alloc::format!("duplicate generator name {n}")));
            }
        }
        Ok(Self { names })
    }

    /// `a, b, c, …` for small ranks, `x0, x1, …` otherwise.
    pub fn standard(rank: usize) -> Self {
        let names = (0..rank)
            .map(|i| {
                if rank <= 26 {
                    String::from(char::from(b'a' + i as u8))
                } else {
                    alloc::format!("x{i}")
                }
            })
            .collect();
        Self { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// All letters in shortlex order: `1, -1, 2, -2, …`.
    pub fn letters(&self) -> impl Iterator<Item = i32> + '_ {
        (1..=self.names.len() as i32).flat_map(|g| [g, -g])
    }

    /// Parses `"a b^-1 a^3"`; `"1"` and the empty string denote the identity.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::InvalidSpec(alloc::format!("bad exponent in {tok:?}")))?;
                    (n, e)
                }
                None => (tok, 1),
            };
            let g = self
                .index_of(name)
                .ok_or_else(|| Error::InvalidSpec(alloc::format!("unknown generator {name:?}")))?
                as i32
                + 1;
            let letter = if exp < 0 { -g } else { g };
            for _ in 0..exp.unsigned_abs() {
                letters.push(letter);
            }
        }
        Ok(Word(letters))
    }

    /// Renders a word with run-length exponents, `"1"` for the identity.
    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return String::from("1");
        }
        let mut out = String::new();
        let mut i = 0;
        let l = w.letters();
        while i < l.len() {
            let mut j = i;
            while j < l.len() && l[j] == l[i] {
                j += 1;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            let name = &self.names[(l[i].unsigned_abs() - 1) as usize];
            let run = (j - i) as i64 * if l[i] < 0 { -1 } else { 1 };
            if run == 1 {
                out.push_str(name);
            } else {
                let _ = write!(out, "{name}^{run}");
            }
            i = j;
        }
        out
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        let n = self.names.len() as i32;
        match w.0.iter().find(|&&l| l == 0 || l.abs() > n) {
            Some(&l) => Err(Error::InvalidLetter(l)),
            None => Ok(()),
        }
    }
}

/// A sequence of signed generator indices. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: &[i32]) -> Self {
        Self(letters.to_vec())
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Self(v)
    }

    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != -p[1])
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_freely_reduced()
            && (self.len() < 2 || self.0[0] != -self.0[self.len() - 1])
    }

    /// Splits a freely reduced word as `u r u⁻¹` with `r` cyclically reduced.
    pub fn cyclic_split(&self) -> (Word, Word) {
        let w = &self.0;
        let mut i = 0;
        while i + 1 < w.len() - i && w[i] == -w[w.len() - 1 - i] {
            i += 1;
        }
        (Word(w[..i].to_vec()), Word(w[i..w.len() - i].to_vec()))
    }

    pub fn rotate(&self, k: usize) -> Self {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let k = k % n;
        let mut v = Vec::with_capacity(n);
        v.extend_from_slice(&self.0[k..]);
        v.extend_from_slice(&self.0[..k]);
        Self(v)
    }
}

/// Position of a letter in the order `a < a⁻¹ < b < b⁻¹ < …`.
pub fn letter_rank(l: i32) -> u32 {
    2 * (l.unsigned_abs() - 1) + u32::from(l < 0)
}

/// Shortlex comparison: shorter first, then lexicographic by [`letter_rank`].
pub fn shortlex_cmp(a: &Word, b: &Word) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.0.iter()
            .map(|&l| letter_rank(l))
            .cmp(b.0.iter().map(|&l| letter_rank(l)))
    })
}
