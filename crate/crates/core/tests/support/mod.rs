//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use thincomb_core::complex::{coned_complex, rips_two_skeleton, CellComplex};
use thincomb_core::cone::{cone_off, ConeFamily, ConedGraph};
use thincomb_core::graph::{build_ball, BallGraph, DistanceMatrix, Graph};
use thincomb_core::group::{EdgeKind, EdgeSpec, GroupSpec};
use thincomb_core::word::Alphabet;

pub fn f2() -> GroupSpec {
    GroupSpec::free(Alphabet::standard(2))
}

pub fn z2() -> GroupSpec {
    GroupSpec::free_abelian(Alphabet::standard(2))
}

pub fn ball(spec: &GroupSpec, r: u32) -> BallGraph {
    build_ball(spec, r, 200_000).unwrap()
}

pub fn cone_a(spec: &GroupSpec, r: u32) -> ConedGraph {
    let b = ball(spec, r);
    let h = spec.element("a").unwrap().word;
    cone_off(&b, &[ConeFamily { tag: "H".into(), generator: h }]).unwrap()
}

pub fn rips(g: &Graph, d: u32) -> (DistanceMatrix, CellComplex) {
    let m = DistanceMatrix::new(g);
    let cx = rips_two_skeleton(g, &m, d);
    (m, cx)
}

/// Rips complex of the base graph plus cone triangles.
pub fn coned_rips(coned: &ConedGraph, d: u32) -> CellComplex {
    let m = DistanceMatrix::new(&coned.base_graph);
    coned_complex(&rips_two_skeleton(&coned.base_graph, &m, d), coned).unwrap()
}

/// F₂ = ⟨a, b⟩ amalgamated with F₂ = ⟨c, d⟩ over `left = right`.
pub fn amalgam(left: &str, right: &str) -> GroupSpec {
    let f = f2();
    let g = GroupSpec::free(Alphabet::new(vec!["c".into(), "d".into()]).unwrap());
    let a = f.element(left).unwrap().word;
    let c = g.element(right).unwrap().word;
    GroupSpec::graph_of_groups(
        vec![f, g],
        vec![EdgeSpec { source: 0, target: 1, source_word: a, target_word: c, kind: EdgeKind::Cyclic }],
        None,
    )
    .unwrap()
}

/// Minimal disc-diagram area by recursion on the first edge of the loop:
/// either that edge lies on a 2-cell (peel the cell, cost 1) or the loop runs
/// back along it later (split into two loops). No limit on intermediate
/// lengths; the search is bounded by the total area only.
pub struct DiscOracle<'a> {
    cells: Vec<Vec<usize>>,
    on_edge: HashMap<(usize, usize), Vec<usize>>,
    memo: HashMap<Vec<usize>, (u32, Option<u32>)>,
    _cx: &'a CellComplex,
}

impl<'a> DiscOracle<'a> {
    pub fn new(cx: &'a CellComplex) -> Self {
        let cells: Vec<Vec<usize>> = cx.cells().map(|c| c.to_vec()).collect();
        let mut on_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            for j in 0..c.len() {
                let (u, v) = (c[j], c[(j + 1) % c.len()]);
                on_edge.entry((u.min(v), u.max(v))).or_default().push(i);
            }
        }
        Self { cells, on_edge, memo: HashMap::new(), _cx: cx }
    }

    fn reduce(loop_: &[usize]) -> Vec<usize> {
        let mut w: Vec<usize> = Vec::new();
        for &x in loop_ {
            if w.last() == Some(&x) {
                continue;
            }
            if w.len() >= 2 && w[w.len() - 2] == x {
                w.pop();
            } else {
                w.push(x);
            }
        }
        // cyclic cancellation
        loop {
            let n = w.len();
            if n < 3 {
                return Vec::new();
            }
            if w[n - 1] == w[0] || w[n - 2] == w[0] {
                w.pop();
            } else if w[1] == w[n - 1] {
                w.remove(0);
            } else {
                return w;
            }
        }
    }

    /// Minimal area if it is at most `budget`.
    pub fn area(&mut self, loop_: &[usize], budget: u32) -> Option<u32> {
        let p = Self::reduce(loop_);
        if p.is_empty() {
            return Some(0);
        }
        if budget == 0 {
            return None;
        }
        if let Some(&(b, r)) = self.memo.get(&p) {
            match r {
                Some(a) if a <= budget => return Some(a),
                Some(_) => return None,
                None if b >= budget => return None,
                None => {}
            }
        }
        let n = p.len();
        let mut best: Option<u32> = None;
        // split where the first edge comes back reversed
        for j in 1..n {
            if p[j] == p[1] && p[(j + 1) % n] == p[0] {
                let alpha: Vec<usize> = p[1..j].to_vec();
                let beta: Vec<usize> = p[j + 1..].to_vec();
                let cap = best.map_or(budget, |b| b.saturating_sub(1)).min(budget);
                if let Some(a1) = self.area(&alpha, cap) {
                    if let Some(a2) = self.area(&beta, cap - a1) {
                        best = Some(best.map_or(a1 + a2, |b| b.min(a1 + a2)));
                    }
                }
            }
        }
        // peel a cell through the first edge
        let (u, v) = (p[0], p[1]);
        let cells = self.on_edge.get(&(u.min(v), u.max(v))).cloned().unwrap_or_default();
        for c in cells {
            let cyc = self.cells[c].clone();
            let m = cyc.len();
            let i = cyc.iter().position(|&x| x == u).unwrap();
            let fwd = cyc[(i + 1) % m] == v;
            let mut arc = vec![u];
            for t in 1..m - 1 {
                let k = if fwd { (i + m - t) % m } else { (i + t) % m };
                arc.push(cyc[k]);
            }
            let mut next = arc;
            next.extend_from_slice(&p[1..]);
            let cap = best.map_or(budget, |b| b.saturating_sub(1)).min(budget);
            if cap == 0 {
                continue;
            }
            if let Some(a) = self.area(&next, cap - 1) {
                best = Some(best.map_or(a + 1, |b| b.min(a + 1)));
            }
        }
        let prev = self.memo.get(&p).map_or(0, |e| e.0);
        self.memo.insert(p, (budget.max(prev), best));
        best
    }
}
