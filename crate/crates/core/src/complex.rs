//! 2-complexes over a graph: Rips 2-skeletons, coned complexes and polygonal
//! relation cells.

use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::Serialize;

use crate::cone::ConedGraph;
use crate::error::{Error, Result};
use crate::graph::{BallGraph, DistanceMatrix, EdgeLabel, Graph, Metric};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CellKind {
    Rips,
    Cone,
    Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComplexSummary {
    pub vertices: usize,
    pub edges: usize,
    pub extra_edges: usize,
    pub rips_cells: usize,
    pub cone_cells: usize,
    pub relation_cells: usize,
    pub d: u32,
}

/// A 2-complex whose cells are polygons on the 1-skeleton. Triangles are
/// stored with ascending vertices; other polygons in their boundary order.
#[derive(Debug, Clone)]
pub struct CellComplex {
    pub skeleton: Graph,
    pub d: u32,
    extra_edges: usize,
    cells: Vec<Vec<usize>>,
    kinds: Vec<CellKind>,
    by_edge: HashMap<(usize, usize), Vec<usize>>,
    by_key: HashMap<Vec<usize>, usize>,
}

fn edge_key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Rotation and reflection invariant key of a cyclic vertex sequence.
pub fn cyclic_key(cycle: &[usize]) -> Vec<usize> {
    let n = cycle.len();
    let mut best: Option<Vec<usize>> = None;
    for dir in [false, true] {
        for s in 0..n {
            let cand: Vec<usize> = (0..n)
                .map(|i| if dir { cycle[(s + n - i) % n] } else { cycle[(s + i) % n] })
                .collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

impl CellComplex {
    pub fn new(skeleton: Graph, d: u32) -> Self {
        Self {
            skeleton,
            d,
            extra_edges: 0,
            cells: Vec::new(),
            kinds: Vec::new(),
            by_edge: HashMap::new(),
            by_key: HashMap::new(),
        }
    }

    /// Adds a cell bounded by the closed vertex cycle (first vertex not
    /// repeated). Returns the index of the cell, existing or new.
    pub fn add_cell(&mut self, cycle: &[usize], kind: CellKind) -> Result<usize> {
        let n = cycle.len();
        for i in 0..n {
            let (u, v) = (cycle[i], cycle[(i + 1) % n]);
            if u == v || !self.skeleton.has_edge(u, v) {
                return Err(Error::NotInComplex(u, v));
            }
        }
        let key = cyclic_key(cycle);
        if let Some(&i) = self.by_key.get(&key) {
            return Ok(i);
        }
        let stored = if n == 3 {
            let mut t = cycle.to_vec();
            t.sort_unstable();
            t
        } else {
            cycle.to_vec()
        };
        let idx = self.cells.len();
        for i in 0..n {
            self.by_edge.entry(edge_key(stored[i], stored[(i + 1) % n])).or_default().push(idx);
        }
        self.cells.push(stored);
        self.kinds.push(kind);
        self.by_key.insert(key, idx);
        Ok(idx)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, i: usize) -> &[usize] {
        &self.cells[i]
    }

    pub fn kind(&self, i: usize) -> CellKind {
        self.kinds[i]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> {
        self.cells.iter().map(|c| c.as_slice())
    }

    /// Cells having `{u, v}` on their boundary.
    pub fn cells_on_edge(&self, u: usize, v: usize) -> &[usize] {
        self.by_edge.get(&edge_key(u, v)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn find_cell(&self, cycle: &[usize]) -> Option<usize> {
        self.by_key.get(&cyclic_key(cycle)).copied()
    }

    /// Boundary of cell `i` as edges oriented `(min, max)` with the sign of
    /// the traversal.
    pub fn boundary(&self, i: usize) -> Vec<((usize, usize), i8)> {
        let c = &self.cells[i];
        let n = c.len();
        (0..n)
            .map(|k| {
                let (u, v) = (c[k], c[(k + 1) % n]);
                (edge_key(u, v), if u < v { 1 } else { -1 })
            })
            .collect()
    }

    pub fn summary(&self) -> ComplexSummary {
        let count = |k| self.kinds.iter().filter(|&&x| x == k).count();
        ComplexSummary {
            vertices: self.skeleton.vertex_count(),
            edges: self.skeleton.edge_count(),
            extra_edges: self.extra_edges,
            rips_cells: count(CellKind::Rips),
            cone_cells: count(CellKind::Cone),
            relation_cells: count(CellKind::Relation),
            d: self.d,
        }
    }

    /// Adds one polygon per vertex `g` and word `r` whose loop `g, g r₁, …`
    /// stays in the ball and closes up.
    pub fn add_word_cells(&mut self, ball: &BallGraph, words: &[Word]) -> Result<usize> {
        let spec = ball
            .spec
            .as_ref()
            .ok_or_else(|| Error::InvalidSpec("relation cells need a Cayley ball".into()))?;
        let before = self.cells.len();
        for g in 0..ball.vertex_count() {
            if ball.graph.is_cone(g) {
                continue;
            }
            'word: for r in words {
                let mut cycle = Vec::with_capacity(r.len());
                let mut cur = ball.word(g).clone();
                for &l in r.letters() {
                    match ball.index_of(&cur) {
                        Some(v) => cycle.push(v),
                        None => continue 'word,
                    }
                    cur = spec.canonical_word(&cur.concat(&Word(alloc::vec![l])));
                }
                if ball.index_of(&cur) != Some(g) || cycle.len() < 3 {
                    continue;
                }
                let mut seen = cycle.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() == cycle.len() {
                    self.add_cell(&cycle, CellKind::Relation)?;
                }
            }
        }
        Ok(self.cells.len() - before)
    }
}

/// Plain Rips 2-skeleton at parameter `d` over `graph` with metric `metric`:
/// extra edges join vertices at distance `2..=d`, triangles are triples with
/// all pairwise distances ≤ `d`. Vertices unreachable in `metric` get no
/// extra edges or triangles.
pub fn rips_two_skeleton(graph: &Graph, metric: &DistanceMatrix, d: u32) -> CellComplex {
    let mut skeleton = graph.clone();
    let n = graph.vertex_count();
    let mut extra = 0;
    if d >= 2 {
        for u in 0..n {
            for v in u + 1..n {
                let duv = metric.dist(u, v);
                if duv >= 2 && duv <= d && skeleton.add_edge(u, v, EdgeLabel::Rips) {
                    extra += 1;
                }
            }
        }
    }
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut l: Vec<usize> = skeleton.neighbors(v).collect();
            l.sort_unstable();
            l
        })
        .collect();
    let mut cx = CellComplex::new(skeleton, d);
    cx.extra_edges = extra;
    for u in 0..n {
        for &v in nbrs[u].iter().filter(|&&v| v > u) {
            for &w in nbrs[v].iter().filter(|&&w| w > v) {
                if nbrs[u].binary_search(&w).is_ok() {
                    cx.add_cell(&[u, v, w], CellKind::Rips).expect("edges exist");
                }
            }
        }
    }
    cx
}

/// `P̂`: the complex `P` (built over `coned.base_graph`) plus the cone edges
/// and a cone triangle `(ṽ, x, y)` for every 1-skeleton edge `{x, y}` of `P`
/// with both ends adjacent to `ṽ`.
pub fn coned_complex(rips: &CellComplex, coned: &ConedGraph) -> Result<CellComplex> {
    let mut cx = rips.clone();
    if cx.skeleton.vertex_count() != coned.vertex_count() {
        return Err(Error::VertexOutOfRange(cx.skeleton.vertex_count()));
    }
    for c in coned.cones() {
        for &(w, label) in coned.graph().adjacency(c.vertex) {
            cx.skeleton.add_edge(c.vertex, w, label);
        }
    }
    for c in coned.cones() {
        let members: Vec<usize> = coned.graph().neighbors(c.vertex).collect();
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                if rips.skeleton.has_edge(x, y) {
                    cx.add_cell(&[c.vertex, x, y], CellKind::Cone)?;
                }
            }
        }
    }
    Ok(cx)
}
