use crate::word::{shortlex_cmp, Word};

pub(super) fn membership(h: &Word, g: &Word) -> Option<i64> {
    let h = h.free_reduce();
    let (u, r) = h.cyclic_split();
    let conj = u.inverse().concat(g).concat(&u).free_reduce();
    if conj.is_empty() {
        return Some(0);
    }
    if conj.len() % r.len() != 0 {
        return None;
    }
    let k = (conj.len() / r.len()) as i64;
    if conj == r.pow(k) {
        Some(k)
    } else if conj == r.pow(-k) {
        Some(-k)
    } else {
        None
    }
}

/// `g = rep · hᵏ`, `rep` shortlex-least in `g⟨h⟩`.
///
/// With `h = u r u⁻¹`, `|g hʲ| ≥ |j|·|r| − |g| − 2|u|`, so beyond
/// `|j| > 2|g| + 2|u|` every member is longer than `g` itself.
pub(super) fn coset_split(h: &Word, g: &Word) -> (Word, i64) {
    let h = h.free_reduce();
    let g = g.free_reduce();
    let (u, _) = h.cyclic_split();
    let bound = (2 * g.len() + 2 * u.len() + 1) as i64;
    let mut cur = g.concat(&h.pow(-bound)).free_reduce();
    let mut best = (cur.clone(), -bound);
    for j in -bound + 1..=bound {
        cur = cur.concat(&h).free_reduce();
        if shortlex_cmp(&cur, &best.0).is_lt() {
            best = (cur.clone(), j);
        }
    }
    (best.0, -best.1)
}

/// Nontrivial `w` is not a proper power.
pub(super) fn is_primitive_root(w: &Word) -> bool {
    if w.is_empty() {
        return false;
    }
    let (_, r) = w.cyclic_split();
    let n = r.len();
    !(1..n).any(|d| n % d == 0 && (0..n).all(|i| r.0[i] == r.0[i % d]))
}
