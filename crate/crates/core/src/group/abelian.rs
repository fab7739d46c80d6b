use alloc::vec;
use alloc::vec::Vec;

use crate::word::{shortlex_cmp, Word};

pub(super) fn exponents(rank: usize, w: &Word) -> Vec<i64> {
    let mut e = vec![0i64; rank];
    for &l in w.letters() {
        e[(l.unsigned_abs() - 1) as usize] += i64::from(l.signum());
    }
    e
}

pub(super) fn word_of(e: &[i64]) -> Word {
    let mut letters = Vec::new();
    for (i, &x) in e.iter().enumerate() {
        let g = i as i32 + 1;
        let l = if x < 0 { -g } else { g };
        letters.extend(core::iter::repeat_n(l, x.unsigned_abs() as usize));
    }
    Word(letters)
}

pub(super) fn canonical(rank: usize, w: &Word) -> Word {
    word_of(&exponents(rank, w))
}

pub(super) fn membership(rank: usize, h: &Word, g: &Word) -> Option<i64> {
    let h = exponents(rank, h);
    let g = exponents(rank, g);
    let pivot = h.iter().position(|&x| x != 0)?;
    if g[pivot] % h[pivot] != 0 {
        return None;
    }
    let k = g[pivot] / h[pivot];
    h.iter().zip(&g).all(|(&a, &b)| a * k == b).then_some(k)
}

/// Shortlex-least member of `g⟨h⟩`; `|g + jh|₁ ≥ |j|·|h|₁ − |g|₁` bounds the window.
pub(super) fn coset_split(rank: usize, h: &Word, g: &Word) -> (Word, i64) {
    let he = exponents(rank, h);
    let ge = exponents(rank, g);
    let norm: i64 = ge.iter().map(|x| x.abs()).sum();
    let bound = 2 * norm + 1;
    let mut best: Option<(Word, i64)> = None;
    for j in -bound..=bound {
        let e: Vec<i64> = ge.iter().zip(&he).map(|(a, b)| a + j * b).collect();
        let w = word_of(&e);
        if best.as_ref().is_none_or(|(b, _)| shortlex_cmp(&w, b).is_lt()) {
            best = Some((w, j));
        }
    }
    let (w, j) = best.expect("window is nonempty");
    (w, -j)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub(super) fn is_primitive(rank: usize, h: &Word) -> bool {
    exponents(rank, h).into_iter().fold(0, gcd) == 1
}
