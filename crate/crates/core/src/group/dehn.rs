//! Dehn's algorithm for C'(1/6) presentations.

use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{letter_rank, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SmallCancellation {
    relators: Vec<Word>,
    /// Every cyclic permutation of every relator and its inverse.
    #[serde(skip)]
    symmetrized: Vec<Word>,
}

impl SmallCancellation {
    pub(super) fn new(relators: Vec<Word>) -> Result<Self> {
        for (i, r) in relators.iter().enumerate() {
            if r.is_empty() || !r.is_cyclically_reduced() {
                return Err(Error::InvalidSpec(alloc::format!(
                    "relator {i} is not cyclically reduced"
                )));
            }
        }
        let mut symmetrized = Vec::new();
        let mut owner = Vec::new();
        for (i, r) in relators.iter().enumerate() {
            for base in [r.clone(), r.inverse()] {
                for k in 0..base.len() {
                    symmetrized.push(base.rotate(k));
                    owner.push(i);
                }
            }
        }
        // Pieces are common prefixes of two different entries of the
        // symmetrized set; C'(1/6) needs 6·|piece| < |relator|.
        for p in 0..symmetrized.len() {
            for q in 0..symmetrized.len() {
                if p == q {
                    continue;
                }
                let (x, y) = (&symmetrized[p], &symmetrized[q]);
                let piece = x.0.iter().zip(&y.0).take_while(|(a, b)| a == b).count();
                if 6 * piece >= x.len() {
                    return Err(Error::RelatorViolation { index: owner[p], piece, len: x.len() });
                }
            }
        }
        Ok(Self { relators, symmetrized })
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Repeatedly replaces a subword covering more than half of a relator by
    /// the inverse of the remaining part, freely reducing after each step.
    pub fn dehn_reduce(&self, w: &Word) -> Word {
        let mut cur = w.free_reduce();
        'outer: loop {
            for i in 0..cur.len() {
                for r in &self.symmetrized {
                    if r.0[0] != cur.0[i] {
                        continue;
                    }
                    let l = cur.0[i..].iter().zip(&r.0).take_while(|(a, b)| a == b).count();
                    if 2 * l > r.len() {
                        let mut next = Vec::with_capacity(cur.len());
                        next.extend_from_slice(&cur.0[..i]);
                        next.extend(r.0[l..].iter().rev().map(|x| -x));
                        next.extend_from_slice(&cur.0[i + l..]);
                        cur = Word(next).free_reduce();
                        continue 'outer;
                    }
                }
            }
            return cur;
        }
    }

    pub fn is_identity(&self, w: &Word) -> bool {
        self.dehn_reduce(w).is_empty()
    }

    /// Shortlex-least word equal to `w`. The Dehn-reduced form bounds the
    /// geodesic length; candidates are enumerated in shortlex order.
    pub(super) fn canonical(&self, rank: usize, w: &Word) -> Word {
        let reduced = self.dehn_reduce(w);
        let target_inv = reduced.inverse();
        let mut letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
        letters.sort_by_key(|&l| letter_rank(l));
        let mut buf = Vec::new();
        for len in 0..=reduced.len() {
            if self.search(&letters, len, &mut buf, &target_inv) {
                return Word(buf);
            }
        }
        reduced
    }

    fn search(&self, letters: &[i32], len: usize, buf: &mut Vec<i32>, target_inv: &Word) -> bool {
        if buf.len() == len {
            let cand = Word(buf.clone()).concat(target_inv);
            return self.is_identity(&cand);
        }
        for &l in letters {
            if buf.last() == Some(&-l) {
                continue;
            }
            buf.push(l);
            if self.search(letters, len, buf, target_inv) {
                return true;
            }
            buf.pop();
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::word::Alphabet;

    fn genus2() -> GroupSpec {
        let ab = Alphabet::standard(4);
        let r = ab.parse("a b a^-1 b^-1 c d c^-1 d^-1").unwrap();
        GroupSpec::small_cancellation(ab, alloc::vec![r]).unwrap()
    }

    #[test]
    fn relator_is_identity() {
        let g = genus2();
        assert!(g.element("a b a^-1 b^-1 c d c^-1 d^-1").unwrap().word.is_empty());
    }

    #[test]
    fn every_cyclic_permutation_is_identity() {
        let g = genus2();
        let ab = g.alphabet().clone();
        let r = ab.parse("a b a^-1 b^-1 c d c^-1 d^-1").unwrap();
        for base in [r.clone(), r.inverse()] {
            for k in 0..base.len() {
                assert!(g.canonicalize(&base.rotate(k)).unwrap().word.is_empty());
            }
        }
    }

    #[test]
    fn half_relator_is_rewritten() {
        let g = genus2();
        // five letters of the relator equal the inverse of the other three
        let w = g.element("a b a^-1 b^-1 c").unwrap();
        assert_eq!(w, g.element("d c d^-1").unwrap());
        assert_eq!(w.word.len(), 3);
    }

    #[test]
    fn c16_rejects_short_relators() {
        let ab = Alphabet::standard(2);
        let r = ab.parse("a b a^-1 b^-1").unwrap();
        assert!(matches!(
            GroupSpec::small_cancellation(ab.clone(), alloc::vec![r]),
            Err(Error::RelatorViolation { .. })
        ));
        let p = ab.parse("a b a b a b").unwrap();
        assert!(GroupSpec::small_cancellation(ab, alloc::vec![p]).is_err());
    }
}
