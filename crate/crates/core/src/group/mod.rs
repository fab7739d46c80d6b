//! Canonical forms and cyclic cosets for the supported group classes.
//!
//! Four classes are supported, each with an exact word problem:
//!
//! * free groups (free reduction),
//! * free abelian groups (sorted exponent vectors),
//! * C'(1/6) small cancellation groups (Dehn's algorithm, shortlex-least
//!   representative),
//! * graphs of groups with free or free abelian vertex groups and cyclic or
//!   trivial edge groups (reduced path normal form over a fixed spanning tree).
//!
//! Elements are stored as canonical words; two elements are equal iff their
//! canonical words are identical.

mod abelian;
mod dehn;
mod free;
mod gog;

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{shortlex_cmp, Alphabet, Word};

pub use dehn::SmallCancellation;
pub use gog::{EdgeKind, EdgeSpec, GraphOfGroups};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum GroupClass {
    Free,
    FreeAbelian,
    SmallCancellation(SmallCancellation),
    GraphOfGroups(Box<GraphOfGroups>),
}

/// A group description together with its canonical-form engine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupSpec {
    alphabet: Alphabet,
    class: GroupClass,
    id: u64,
}

/// Group element in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Element {
    pub spec_id: u64,
    pub word: Word,
}

/// Result of a cyclic membership query `g ∈ ⟨h⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub exponent: Option<i64>,
    /// `false` when absence was only established within a bounded exponent search.
    pub exact: bool,
}

/// Identifier of a left coset `g⟨h⟩`: its shortlex-least canonical member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetId(pub Vec<i32>);

impl CosetId {
    pub fn word(&self) -> Word {
        Word(self.0.clone())
    }
}

struct Fnv(u64);

impl Hasher for Fnv {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

impl GroupSpec {
    fn with_class(alphabet: Alphabet, class: GroupClass) -> Self {
        let mut h = Fnv(0xcbf2_9ce4_8422_2325);
        alphabet.hash(&mut h);
        class.hash(&mut h);
        Self { alphabet, class, id: h.finish() }
    }

    pub fn free(alphabet: Alphabet) -> Self {
        Self::with_class(alphabet, GroupClass::Free)
    }

    pub fn free_abelian(alphabet: Alphabet) -> Self {
        Self::with_class(alphabet, GroupClass::FreeAbelian)
    }

    /// Validates that every relator is cyclically reduced and that the
    /// symmetrized relator set satisfies C'(1/6).
    pub fn small_cancellation(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            alphabet.check(r)?;
        }
        let sc = SmallCancellation::new(relators)?;
        Ok(Self::with_class(alphabet, GroupClass::SmallCancellation(sc)))
    }

    /// Builds a graph of groups. Vertex groups must be free or free abelian
    /// and the underlying graph connected; stable letters for edges outside
    /// the spanning tree are named `t<edge>` unless names are supplied.
    pub fn graph_of_groups(
        vertices: Vec<GroupSpec>,
        edges: Vec<EdgeSpec>,
        stable_names: Option<Vec<alloc::string::String>>,
    ) -> Result<Self> {
        let (gog, alphabet) = GraphOfGroups::new(vertices, edges, stable_names)?;
        Ok(Self::with_class(alphabet, GroupClass::GraphOfGroups(Box::new(gog))))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn class(&self) -> &GroupClass {
        &self.class
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn class_name(&self) -> &'static str {
        match self.class {
            GroupClass::Free => "free",
            GroupClass::FreeAbelian => "free_abelian",
            GroupClass::SmallCancellation(_) => "small_cancellation",
            GroupClass::GraphOfGroups(_) => "graph_of_groups",
        }
    }

    pub fn as_graph_of_groups(&self) -> Option<&GraphOfGroups> {
        match &self.class {
            GroupClass::GraphOfGroups(g) => Some(g),
            _ => None,
        }
    }

    /// Membership in free and free abelian groups is decided exactly; other
    /// classes fall back to a bounded exponent search.
    pub fn has_exact_membership(&self) -> bool {
        matches!(self.class, GroupClass::Free | GroupClass::FreeAbelian)
    }

    pub fn identity(&self) -> Element {
        Element { spec_id: self.id, word: Word::identity() }
    }

    pub fn canonicalize(&self, w: &Word) -> Result<Element> {
        self.alphabet.check(w)?;
        Ok(Element { spec_id: self.id, word: self.canonical_word(w) })
    }

    /// Canonical word of an already validated word.
    pub(crate) fn canonical_word(&self, w: &Word) -> Word {
        match &self.class {
            GroupClass::Free => w.free_reduce(),
            GroupClass::FreeAbelian => abelian::canonical(self.rank(), w),
            GroupClass::SmallCancellation(sc) => sc.canonical(self.rank(), w),
            GroupClass::GraphOfGroups(g) => g.canonical(w),
        }
    }

    pub fn element(&self, text: &str) -> Result<Element> {
        let w = self.alphabet.parse(text)?;
        self.canonicalize(&w)
    }

    fn check_owned(&self, g: &Element) -> Result<()> {
        if g.spec_id == self.id {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check_owned(g)?;
        self.check_owned(h)?;
        Ok(Element { spec_id: self.id, word: self.canonical_word(&g.word.concat(&h.word)) })
    }

    pub fn inverse(&self, g: &Element) -> Result<Element> {
        self.check_owned(g)?;
        Ok(Element { spec_id: self.id, word: self.canonical_word(&g.word.inverse()) })
    }

    pub fn pow(&self, g: &Element, k: i64) -> Element {
        Element { spec_id: self.id, word: self.canonical_word(&g.word.pow(k)) }
    }

    pub fn equal_words(&self, a: &Word, b: &Word) -> bool {
        match &self.class {
            GroupClass::SmallCancellation(sc) => sc.is_identity(&a.concat(&b.inverse())),
            _ => self.canonical_word(a) == self.canonical_word(b),
        }
    }

    /// Exponent `k` with `g = hᵏ`. Exact for free and free abelian groups;
    /// otherwise searched over `|k| ≤ bound`.
    pub fn cyclic_membership(&self, h: &Element, g: &Element, bound: i64) -> Membership {
        debug_assert!(!h.word.is_empty(), "membership in the trivial subgroup");
        match &self.class {
            GroupClass::Free => Membership { exponent: free::membership(&h.word, &g.word), exact: true },
            GroupClass::FreeAbelian => Membership {
                exponent: abelian::membership(self.rank(), &h.word, &g.word),
                exact: true,
            },
            _ => {
                let exponent = (0..=bound).flat_map(|k| [k, -k]).find(|&k| {
                    self.equal_words(&h.word.pow(k), &g.word)
                });
                Membership { exponent, exact: exponent.is_some() }
            }
        }
    }

    /// Splits `g = rep · hᵏ` with `rep` the shortlex-least member of `g⟨h⟩`.
    ///
    /// Exact for free and free abelian groups. Other classes scan
    /// `|k| ≤ bound` and fail with [`Error::BoundedSearchExhausted`] when the
    /// minimum sits on the edge of the window.
    pub fn coset_split(&self, h: &Word, g: &Word, bound: i64) -> Result<(Word, i64)> {
        match &self.class {
            GroupClass::Free => Ok(free::coset_split(h, g)),
            GroupClass::FreeAbelian => Ok(abelian::coset_split(self.rank(), h, g)),
            _ => {
                let mut best: Option<(Word, i64)> = None;
                for j in -bound..=bound {
                    let cand = self.canonical_word(&g.concat(&h.pow(j)));
                    if best.as_ref().is_none_or(|(b, _)| shortlex_cmp(&cand, b).is_lt()) {
                        best = Some((cand, j));
                    }
                }
                let (rep, j) = best.expect("window is nonempty");
                if j.abs() == bound && bound > 0 {
                    return Err(Error::BoundedSearchExhausted { bound });
                }
                Ok((rep, -j))
            }
        }
    }

    pub fn coset_id(&self, h: &Element, g: &Element, bound: i64) -> Result<CosetId> {
        self.check_owned(h)?;
        self.check_owned(g)?;
        let (rep, _) = self.coset_split(&h.word, &g.word, bound)?;
        Ok(CosetId(rep.0))
    }

    /// Default exponent window for bounded coset searches.
    pub fn default_exponent_bound(radius: u32, h: &Word) -> i64 {
        2 * i64::from(radius) * h.len() as i64 + 8
    }

    /// `⟨h⟩` is maximal cyclic: `h` is not a proper power. Decided for free and
    /// free abelian groups only.
    pub fn is_maximal_cyclic(&self, h: &Word) -> Option<bool> {
        match &self.class {
            GroupClass::Free => Some(free::is_primitive_root(&h.free_reduce())),
            GroupClass::FreeAbelian => Some(abelian::is_primitive(self.rank(), h)),
            _ => None,
        }
    }
}
