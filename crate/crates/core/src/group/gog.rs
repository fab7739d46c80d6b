//! Fundamental groups of finite graphs of groups.
//!
//! Elements are handled as loops in the graph of groups based at vertex 0:
//! alternating vertex-group elements and oriented edges. A generator of vertex
//! group `v` becomes `(tree path to v) · x · (tree path back)`, a stable letter
//! becomes the tree path to its edge, the edge, and the tree path home.
//!
//! The normal form is computed left to right with a stack. Crossing edge `e`
//! with current element `g` first splits `g = s · α_e(c)` with `s` the
//! shortlex-least member of `g·α_e(C_e)`, then carries `c` across as
//! `ω_e(c)`. Crossing back over the edge on top of the stack while the
//! carried element lies in `ω(C)` cancels the pair instead.

use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use super::GroupSpec;
use crate::error::{Error, Result};
use crate::word::{Alphabet, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeKind {
    Cyclic,
    Trivial,
}

/// Edge of a graph of groups. Words are in the local alphabets of the
/// endpoint groups; the edge group is generated by `source_word` in the
/// source group and identified with `target_word` in the target group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeSpec {
    pub source: usize,
    pub target: usize,
    pub source_word: Word,
    pub target_word: Word,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GraphOfGroups {
    vertices: Vec<GroupSpec>,
    edges: Vec<EdgeSpec>,
    offsets: Vec<usize>,
    tree: Vec<bool>,
    stable: Vec<Option<i32>>,
    tree_path: Vec<Vec<(usize, bool)>>,
}

#[derive(Debug, Clone, Copy)]
enum Item {
    Letter(usize, i32),
    Edge(usize, bool),
}

impl GraphOfGroups {
    pub(super) fn new(
        vertices: Vec<GroupSpec>,
        edges: Vec<EdgeSpec>,
        stable_names: Option<Vec<String>>,
    ) -> Result<(Self, Alphabet)> {
        if vertices.is_empty() {
            return Err(Error::InvalidSpec("graph of groups has no vertices".into()));
        }
        for v in &vertices {
            if !v.has_exact_membership() {
                return Err(Error::InvalidSpec(
                    "vertex groups must be free or free abelian".into(),
                ));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if e.source >= vertices.len() || e.target >= vertices.len() {
                return Err(Error::InvalidSpec(alloc::format!("edge {i} has a bad endpoint")));
            }
            vertices[e.source].alphabet().check(&e.source_word)?;
            vertices[e.target].alphabet().check(&e.target_word)?;
            let s = vertices[e.source].canonical_word(&e.source_word);
            let t = vertices[e.target].canonical_word(&e.target_word);
            match e.kind {
                EdgeKind::Cyclic if s.is_empty() || t.is_empty() => {
                    return Err(Error::InvalidSpec(alloc::format!(
                        "cyclic edge {i} has a trivial generator"
                    )))
                }
                EdgeKind::Trivial if !s.is_empty() || !t.is_empty() => {
                    return Err(Error::InvalidSpec(alloc::format!(
                        "trivial edge {i} carries a nontrivial word"
                    )))
                }
                _ => {}
            }
        }
        let edges: Vec<EdgeSpec> = edges
            .into_iter()
            .map(|e| EdgeSpec {
                source_word: vertices[e.source].canonical_word(&e.source_word),
                target_word: vertices[e.target].canonical_word(&e.target_word),
                ..e
            })
            .collect();

        // spanning tree by BFS from vertex 0, edges in index order
        let n = vertices.len();
        let mut tree = alloc::vec![false; edges.len()];
        let mut tree_path: Vec<Option<Vec<(usize, bool)>>> = alloc::vec![None; n];
        tree_path[0] = Some(Vec::new());
        let mut queue = alloc::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for (i, e) in edges.iter().enumerate() {
                let step = if e.source == v {
                    Some((e.target, true))
                } else if e.target == v {
                    Some((e.source, false))
                } else {
                    None
                };
                if let Some((w, fwd)) = step {
                    if tree_path[w].is_none() {
                        let mut p = tree_path[v].clone().unwrap();
                        p.push((i, fwd));
                        tree_path[w] = Some(p);
                        tree[i] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let tree_path: Vec<Vec<(usize, bool)>> = tree_path
            .into_iter()
            .map(|p| p.ok_or_else(|| Error::InvalidSpec("graph of groups is not connected".into())))
            .collect::<Result<_>>()?;

        let mut names = Vec::new();
        let mut offsets = Vec::with_capacity(n);
        for v in &vertices {
            offsets.push(names.len());
            names.extend(v.alphabet().names().iter().cloned());
        }
        let mut stable = alloc::vec![None; edges.len()];
        let non_tree: Vec<usize> = (0..edges.len()).filter(|&i| !tree[i]).collect();
        if let Some(s) = &stable_names {
            if s.len() != non_tree.len() {
                return Err(Error::InvalidSpec(alloc::format!(
                    "expected {} stable letter names, got {}",
                    non_tree.len(),
                    s.len()
                )));
            }
        }
        for (k, &i) in non_tree.iter().enumerate() {
            let name = match &stable_names {
                Some(s) => s[k].clone(),
                None => alloc::format!("t{i}"),
            };
            names.push(name);
            stable[i] = Some(names.len() as i32);
        }
        let alphabet = Alphabet::new(names)?;
        Ok((Self { vertices, edges, offsets, tree, stable, tree_path }, alphabet))
    }

    pub fn vertices(&self) -> &[GroupSpec] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeSpec] {
        &self.edges
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.tree[e]
    }

    /// Global letter of local letter `l` of vertex group `v`.
    pub fn globalize_letter(&self, v: usize, l: i32) -> i32 {
        let g = self.offsets[v] as i32 + l.abs();
        if l < 0 {
            -g
        } else {
            g
        }
    }

    /// Word of vertex group `v` rewritten in the global alphabet.
    pub fn globalize(&self, v: usize, w: &Word) -> Word {
        Word(w.0.iter().map(|&l| self.globalize_letter(v, l)).collect())
    }

    /// Tree path from the base vertex to `v`, as (edge, forward) pairs.
    pub fn tree_path(&self, v: usize) -> &[(usize, bool)] {
        &self.tree_path[v]
    }

    /// Global stable letter of an edge outside the spanning tree.
    pub fn stable_letter(&self, e: usize) -> Option<i32> {
        self.stable[e]
    }

    fn endpoints(&self, e: usize, fwd: bool) -> (usize, usize) {
        let s = &self.edges[e];
        if fwd {
            (s.source, s.target)
        } else {
            (s.target, s.source)
        }
    }

    /// (α, ω): edge group generator on the departure and arrival sides.
    fn sides(&self, e: usize, fwd: bool) -> (&Word, &Word) {
        let s = &self.edges[e];
        if fwd {
            (&s.source_word, &s.target_word)
        } else {
            (&s.target_word, &s.source_word)
        }
    }

    fn items(&self, w: &Word) -> Vec<Item> {
        let total_vertex_gens = self.offsets.last().copied().unwrap_or(0)
            + self.vertices.last().map_or(0, |v| v.rank());
        let mut out = Vec::new();
        let go = |out: &mut Vec<Item>, v: usize| {
            out.extend(self.tree_path[v].iter().map(|&(e, f)| Item::Edge(e, f)));
        };
        let back = |out: &mut Vec<Item>, v: usize| {
            out.extend(self.tree_path[v].iter().rev().map(|&(e, f)| Item::Edge(e, !f)));
        };
        for &l in w.letters() {
            let idx = (l.unsigned_abs() - 1) as usize;
            if idx < total_vertex_gens {
                let v = self.offsets.iter().rposition(|&o| o <= idx).expect("offset 0 exists");
                let local = (idx - self.offsets[v]) as i32 + 1;
                go(&mut out, v);
                out.push(Item::Letter(v, if l < 0 { -local } else { local }));
                back(&mut out, v);
            } else {
                let e = self
                    .stable
                    .iter()
                    .position(|&s| s == Some(idx as i32 + 1))
                    .expect("letter validated against alphabet");
                let fwd = l > 0;
                let (o, t) = self.endpoints(e, fwd);
                go(&mut out, o);
                out.push(Item::Edge(e, fwd));
                back(&mut out, t);
            }
        }
        out
    }

    /// Exponent `k` with `g = genᵏ` in vertex group `v` (trivial edge groups
    /// contain only the identity).
    fn edge_membership(&self, e: usize, v: usize, gen: &Word, g: &Word) -> Option<i64> {
        match self.edges[e].kind {
            EdgeKind::Trivial => g.is_empty().then_some(0),
            EdgeKind::Cyclic => {
                let spec = &self.vertices[v];
                let h = spec.identity_with(gen);
                spec.cyclic_membership(&h, &spec.identity_with(g), 0).exponent
            }
        }
    }

    pub(super) fn canonical(&self, w: &Word) -> Word {
        let mut stack: Vec<(Word, usize, bool)> = Vec::new();
        let mut cur = 0usize;
        let mut g = Word::identity();
        for item in self.items(w) {
            match item {
                Item::Letter(v, l) => {
                    debug_assert_eq!(v, cur);
                    let mut next = g.0.clone();
                    next.push(l);
                    g = self.vertices[v].canonical_word(&Word(next));
                }
                Item::Edge(e, fwd) => {
                    let (o, t) = self.endpoints(e, fwd);
                    debug_assert_eq!(o, cur);
                    let (alpha, omega) = self.sides(e, fwd);
                    if let Some(&(ref s, te, tf)) = stack.last() {
                        if te == e && tf != fwd {
                            if let Some(k) = self.edge_membership(e, cur, alpha, &g) {
                                let s = s.clone();
                                stack.pop();
                                cur = t;
                                g = self.vertices[t].canonical_word(&s.concat(&omega.pow(k)));
                                continue;
                            }
                        }
                    }
                    let (s, k) = match self.edges[e].kind {
                        EdgeKind::Trivial => (g.clone(), 0),
                        EdgeKind::Cyclic => self.vertices[cur]
                            .coset_split(alpha, &g, 0)
                            .expect("exact for free and abelian vertex groups"),
                    };
                    stack.push((s, e, fwd));
                    cur = t;
                    g = self.vertices[t].canonical_word(&omega.pow(k));
                }
            }
        }
        debug_assert_eq!(cur, 0);
        let mut out = Vec::new();
        for (s, e, fwd) in &stack {
            let (o, _) = self.endpoints(*e, *fwd);
            out.extend(self.globalize(o, s).0);
            if let Some(t) = self.stable[*e] {
                out.push(if *fwd { t } else { -t });
            }
        }
        out.extend(self.globalize(0, &g).0);
        Word(out)
    }
}

impl GroupSpec {
    fn identity_with(&self, w: &Word) -> super::Element {
        super::Element { spec_id: self.id(), word: w.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;
    use alloc::vec;

    fn named(names: &[&str]) -> Alphabet {
        Alphabet::new(names.iter().map(|s| String::from(*s)).collect()).unwrap()
    }

    pub(crate) fn genus2_amalgam() -> GroupSpec {
        let a = GroupSpec::free(named(&["a", "b"]));
        let b = GroupSpec::free(named(&["c", "d"]));
        let sw = a.alphabet().parse("a b a^-1 b^-1").unwrap();
        let tw = b.alphabet().parse("d c d^-1 c^-1").unwrap();
        GroupSpec::graph_of_groups(
            vec![a, b],
            vec![EdgeSpec { source: 0, target: 1, source_word: sw, target_word: tw, kind: EdgeKind::Cyclic }],
            None,
        )
        .unwrap()
    }

    #[test]
    fn amalgam_identifies_edge_words() {
        let g = genus2_amalgam();
        let lhs = g.element("a b a^-1 b^-1").unwrap();
        let rhs = g.element("d c d^-1 c^-1").unwrap();
        assert_eq!(lhs, rhs);
        assert!(g.element("a b a^-1 b^-1 c d c^-1 d^-1").unwrap().word.is_empty());
    }

    #[test]
    fn amalgam_keeps_distinct_elements_apart() {
        let g = genus2_amalgam();
        assert_ne!(g.element("a c").unwrap(), g.element("c a").unwrap());
        assert_ne!(g.element("a").unwrap(), g.identity());
    }

    #[test]
    fn hnn_extension_with_stable_letter() {
        // HNN extension of <a> over the identity map: Z^2
        let a = GroupSpec::free(named(&["a"]));
        let w = a.alphabet().parse("a").unwrap();
        let g = GroupSpec::graph_of_groups(
            vec![a],
            vec![EdgeSpec { source: 0, target: 0, source_word: w.clone(), target_word: w, kind: EdgeKind::Cyclic }],
            Some(vec!["t".into()]),
        )
        .unwrap();
        assert_eq!(g.element("t a t^-1").unwrap(), g.element("a").unwrap());
        assert_ne!(g.element("t a").unwrap(), g.element("a").unwrap());
        assert!(g.element("t a t^-1 a^-1").unwrap().word.is_empty());
    }

    #[test]
    fn disconnected_or_bad_vertex_rejected() {
        let a = GroupSpec::free(named(&["a"]));
        let b = GroupSpec::free(named(&["b"]));
        assert!(GroupSpec::graph_of_groups(vec![a.clone(), b], vec![], None).is_err());
        let sc = GroupSpec::small_cancellation(
            Alphabet::standard(2),
            vec![Alphabet::standard(2).parse("a^7").unwrap()],
        );
        if let Ok(sc) = sc {
            assert!(GroupSpec::graph_of_groups(vec![sc], vec![], None).is_err());
        }
    }
}
