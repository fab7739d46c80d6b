//! Finite graphs with a base vertex: Cayley balls, BFS geodesics, fineness
//! and hyperbolicity scans.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::path::{Combing, Path};
use crate::word::{letter_rank, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VertexKind {
    Element,
    Cone,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct VertexLabel {
    pub kind: VertexKind,
    /// Canonical word of the element, or the coset id of a cone vertex.
    pub word: Word,
    /// Subgroup family tag of a cone vertex.
    pub tag: Option<String>,
    /// Tree-of-spaces piece holding the vertex, if any.
    pub piece: Option<usize>,
}

impl VertexLabel {
    pub fn element(word: Word) -> Self {
        Self { kind: VertexKind::Element, word, tag: None, piece: None }
    }

    pub fn cone(tag: String, coset: Word) -> Self {
        Self { kind: VertexKind::Cone, word: coset, tag: Some(tag), piece: None }
    }

    pub fn is_cone(&self) -> bool {
        self.kind == VertexKind::Cone
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeLabel {
    /// Generator letter read from the owning vertex to its neighbour.
    Gen(i32),
    /// Cone edge of the given family.
    Cone(usize),
    /// Extra edge of a Rips complex joining vertices at distance ≥ 2.
    Rips,
}

impl EdgeLabel {
    fn key(&self) -> (u32, u32) {
        match *self {
            EdgeLabel::Gen(l) => (0, letter_rank(l)),
            EdgeLabel::Cone(f) => (1, f as u32),
            EdgeLabel::Rips => (2, 0),
        }
    }

    fn reverse(&self) -> Self {
        match *self {
            EdgeLabel::Gen(l) => EdgeLabel::Gen(-l),
            c => c,
        }
    }
}

/// Undirected labelled graph. Adjacency lists are kept sorted by edge label
/// (generator letters in shortlex order, then cone edges), then by neighbour.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    labels: Vec<VertexLabel>,
    adj: Vec<Vec<(usize, EdgeLabel)>>,
    edges: HashSet<(usize, usize)>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: VertexLabel) -> usize {
        self.labels.push(label);
        self.adj.push(Vec::new());
        self.labels.len() - 1
    }

    /// Adds `{u, v}` with `label` read from `u` to `v`. Returns `false` when
    /// the edge already exists or `u == v`.
    pub fn add_edge(&mut self, u: usize, v: usize, label: EdgeLabel) -> bool {
        if u == v || !self.edges.insert((u.min(v), u.max(v))) {
            return false;
        }
        Self::insert_sorted(&mut self.adj[u], v, label);
        Self::insert_sorted(&mut self.adj[v], u, label.reverse());
        true
    }

    fn insert_sorted(list: &mut Vec<(usize, EdgeLabel)>, v: usize, label: EdgeLabel) {
        let key = (label.key(), v);
        let pos = list.partition_point(|(w, l)| (l.key(), *w) < key);
        list.insert(pos, (v, label));
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: usize) -> &VertexLabel {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn set_piece(&mut self, v: usize, piece: usize) {
        self.labels[v].piece = Some(piece);
    }

    pub fn is_cone(&self, v: usize) -> bool {
        self.labels[v].is_cone()
    }

    pub fn adjacency(&self, v: usize) -> &[(usize, EdgeLabel)] {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(w, _)| w)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn edge_label(&self, u: usize, v: usize) -> Option<EdgeLabel> {
        self.adj[u].iter().find(|(w, _)| *w == v).map(|&(_, l)| l)
    }

    /// All edges as `(min, max)` pairs in increasing order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.edges.iter().copied().collect();
        e.sort_unstable();
        e
    }

    /// BFS distances (`u32::MAX` when unreachable) and parents. Parents are
    /// the first discoverer in FIFO order over sorted adjacency, so tree paths
    /// are the label-lexicographically first geodesics.
    pub fn bfs(&self, src: usize) -> (Vec<u32>, Vec<usize>) {
        let n = self.vertex_count();
        let mut dist = vec![u32::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        parent[src] = src;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &self.adj[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.bfs(0).0.iter().all(|&d| d != u32::MAX)
    }
}

/// Graph distance oracle; unreachable pairs report a huge distance.
pub trait Metric {
    fn dist(&self, u: usize, v: usize) -> u32;
}

/// All-pairs BFS distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u16>,
}

impl DistanceMatrix {
    pub const UNREACHABLE: u32 = u16::MAX as u32;

    pub fn new(graph: &Graph) -> Self {
        let n = graph.vertex_count();
        let rows = crate::par::map_range(n, |s| {
            graph.bfs(s).0.into_iter().map(|x| x.min(Self::UNREACHABLE) as u16).collect::<Vec<_>>()
        });
        Self { n, d: rows.concat() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn diameter(&self) -> u32 {
        self.d.iter().filter(|&&x| x != u16::MAX).map(|&x| u32::from(x)).max().unwrap_or(0)
    }

    /// Geodesic from `x` to `y`, stepping to the first neighbour (in
    /// adjacency order) that is one closer to `y`.
    pub fn geodesic(&self, graph: &Graph, x: usize, y: usize) -> Path {
        let mut p = vec![x];
        let mut cur = x;
        while cur != y {
            let d = self.dist(cur, y);
            cur = graph
                .neighbors(cur)
                .find(|&w| self.dist(w, y) + 1 == d)
                .expect("connected graph");
            p.push(cur);
        }
        Path(p)
    }
}

impl Metric for DistanceMatrix {
    fn dist(&self, u: usize, v: usize) -> u32 {
        u32::from(self.d[u * self.n + v])
    }
}

/// A finite graph with base vertex; for Cayley balls the vertices are
/// canonical group elements.
#[derive(Debug, Clone)]
pub struct BallGraph {
    pub spec: Option<GroupSpec>,
    pub graph: Graph,
    pub base: usize,
    pub radius: u32,
    pub dist: Vec<u32>,
    index: HashMap<Word, usize>,
}

impl BallGraph {
    /// Wraps an arbitrary connected graph; the radius is the eccentricity of
    /// `base`.
    pub fn from_graph(graph: Graph, base: usize) -> Result<Self> {
        if base >= graph.vertex_count() {
            return Err(Error::VertexOutOfRange(base));
        }
        let (dist, _) = graph.bfs(base);
        if dist.contains(&u32::MAX) {
            return Err(Error::InvalidSpec("graph is not connected".into()));
        }
        let radius = dist.iter().copied().max().unwrap_or(0);
        let mut index = HashMap::new();
        for (v, l) in graph.labels().iter().enumerate() {
            if !l.is_cone() {
                index.entry(l.word.clone()).or_insert(v);
            }
        }
        Ok(Self { spec: None, graph, base, radius, dist, index })
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Vertex of the element written as `text`, in canonical form for the group.
    pub fn index_of_text(&self, text: &str) -> Option<usize> {
        let spec = self.spec.as_ref()?;
        let e = spec.element(text).ok()?;
        self.index_of(&e.word)
    }

    pub fn word(&self, v: usize) -> &Word {
        &self.graph.label(v).word
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Vertices at distance `r` from the base.
    pub fn sphere(&self, r: u32) -> impl Iterator<Item = usize> + '_ {
        self.dist.iter().enumerate().filter(move |(_, &d)| d == r).map(|(v, _)| v)
    }
}

/// All elements of word length ≤ `radius`, with an edge for every generator.
pub fn build_ball(spec: &GroupSpec, radius: u32, cap: usize) -> Result<BallGraph> {
    let letters: Vec<i32> = spec.alphabet().letters().collect();
    let mut graph = Graph::new();
    let mut index: HashMap<Word, usize> = HashMap::new();
    let mut dist = vec![0u32];
    let e = graph.add_vertex(VertexLabel::element(Word::identity()));
    index.insert(Word::identity(), e);
    let mut queue = VecDeque::from([e]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == radius {
            continue;
        }
        for &l in &letters {
            let w = spec.canonical_word(&graph.label(u).word.concat(&Word(vec![l])));
            if !index.contains_key(&w) {
                if graph.vertex_count() >= cap {
                    return Err(Error::SizeLimitExceeded { cap });
                }
                let v = graph.add_vertex(VertexLabel::element(w.clone()));
                index.insert(w, v);
                dist.push(dist[u] + 1);
                queue.push_back(v);
            }
        }
    }
    for u in 0..graph.vertex_count() {
        for &l in letters.iter().filter(|&&l| l > 0) {
            let w = spec.canonical_word(&graph.label(u).word.concat(&Word(vec![l])));
            if let Some(&v) = index.get(&w) {
                graph.add_edge(u, v, EdgeLabel::Gen(l));
            }
        }
    }
    Ok(BallGraph { spec: Some(spec.clone()), graph, base: e, radius, dist, index })
}

/// `ρ(v)` is the BFS-tree path from the base to `v`.
pub fn geodesic_tree_combing(graph: &Graph, base: usize) -> Combing {
    let (_, parent) = graph.bfs(base);
    let paths = (0..graph.vertex_count())
        .map(|v| {
            let mut p = vec![v];
            let mut cur = v;
            while cur != base {
                cur = parent[cur];
                p.push(cur);
            }
            p.reverse();
            Path(p)
        })
        .collect();
    Combing { base, paths }
}

/// Number of simple loops of length ≤ `max_len` through the edge `{u, v}`,
/// counted as simple paths from `v` back to `u` avoiding that edge. `cap`
/// bounds the number of DFS steps.
pub fn fineness_scan(graph: &Graph, u: usize, v: usize, max_len: usize, cap: usize) -> Result<u64> {
    if !graph.has_edge(u, v) {
        return Err(Error::NotAdjacent(v));
    }
    let mut on_path = vec![false; graph.vertex_count()];
    on_path[v] = true;
    let mut steps = 0usize;
    let mut count = 0u64;
    // path currently has `depth` edges and ends at `x`
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        g: &Graph,
        x: usize,
        depth: usize,
        target: usize,
        max_len: usize,
        on_path: &mut [bool],
        steps: &mut usize,
        cap: usize,
        count: &mut u64,
    ) -> Result<()> {
        *steps += 1;
        if *steps > cap {
            return Err(Error::SizeLimitExceeded { cap });
        }
        for w in g.neighbors(x) {
            if w == target {
                if depth >= 1 && depth + 2 <= max_len {
                    *count += 1;
                }
                continue;
            }
            if on_path[w] || depth + 2 >= max_len {
                continue;
            }
            on_path[w] = true;
            dfs(g, w, depth + 1, target, max_len, on_path, steps, cap, count)?;
            on_path[w] = false;
        }
        Ok(())
    }
    dfs(graph, v, 0, u, max_len, &mut on_path, &mut steps, cap, &mut count)?;
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HyperbolicityEstimate {
    pub delta: u32,
    pub triangles: u64,
    /// Every vertex triple was examined.
    pub exact: bool,
}

/// Largest thinness defect over geodesic triangles: the distance from a point
/// of one side to the union of the other two. Exhaustive when the number of
/// triples is at most `max_triangles`, otherwise a seeded sample of that size.
pub fn hyperbolicity_estimate(
    graph: &Graph,
    metric: &DistanceMatrix,
    max_triangles: u64,
    seed: u64,
) -> HyperbolicityEstimate {
    let n = graph.vertex_count();
    let total = if n < 3 { 0 } else { (n as u64) * (n as u64 - 1) * (n as u64 - 2) / 6 };
    let triples: Vec<[usize; 3]> = if total <= max_triangles {
        let mut t = Vec::with_capacity(total as usize);
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    t.push([x, y, z]);
                }
            }
        }
        t
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..max_triangles)
            .map(|_| {
                let s = sample(&mut rng, n, 3);
                [s.index(0), s.index(1), s.index(2)]
            })
            .collect()
    };
    let defects = crate::par::map_slice(&triples, |&[x, y, z]| {
        let sides = [
            metric.geodesic(graph, x, y),
            metric.geodesic(graph, y, z),
            metric.geodesic(graph, z, x),
        ];
        let mut worst = 0;
        for i in 0..3 {
            for &p in sides[i].vertices() {
                let near = sides
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .flat_map(|(_, s)| s.vertices().iter())
                    .map(|&q| metric.dist(p, q))
                    .min()
                    .unwrap_or(0);
                worst = worst.max(near);
            }
        }
        worst
    });
    HyperbolicityEstimate {
        delta: defects.into_iter().max().unwrap_or(0),
        triangles: triples.len() as u64,
        exact: total <= max_triangles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    fn f2() -> GroupSpec {
        GroupSpec::free(Alphabet::standard(2))
    }

    fn z2() -> GroupSpec {
        GroupSpec::free_abelian(Alphabet::standard(2))
    }

    #[test]
    fn ball_sizes() {
        let b1 = build_ball(&f2(), 1, 100).unwrap();
        assert_eq!((b1.vertex_count(), b1.graph.edge_count()), (5, 4));
        assert_eq!(build_ball(&f2(), 2, 100).unwrap().vertex_count(), 17);
        assert_eq!(build_ball(&z2(), 2, 100).unwrap().vertex_count(), 13);
        assert_eq!(build_ball(&f2(), 3, 20).unwrap_err(), Error::SizeLimitExceeded { cap: 20 });
    }

    #[test]
    fn tree_combing_tie_break() {
        let b = build_ball(&z2(), 2, 100).unwrap();
        let c = geodesic_tree_combing(&b.graph, b.base);
        let ix = |s: &str| b.index_of_text(s).unwrap();
        assert_eq!(c.path(ix("a b")).0, vec![ix("1"), ix("a"), ix("a b")]);
        assert_eq!(c.path(b.base).0, vec![b.base]);
        for v in 0..b.vertex_count() {
            assert_eq!(c.path(v).len() as u32, b.dist[v]);
        }
        let f = build_ball(&f2(), 2, 100).unwrap();
        let cf = geodesic_tree_combing(&f.graph, f.base);
        let ixf = |s: &str| f.index_of_text(s).unwrap();
        assert_eq!(cf.path(ixf("a b")).0, vec![ixf("1"), ixf("a"), ixf("a b")]);
    }

    #[test]
    fn tree_has_no_loops_and_zero_delta() {
        let b = build_ball(&f2(), 3, 1000).unwrap();
        let a = b.index_of_text("a").unwrap();
        assert_eq!(fineness_scan(&b.graph, b.base, a, 8, 1 << 20).unwrap(), 0);
        let m = DistanceMatrix::new(&b.graph);
        assert_eq!(hyperbolicity_estimate(&b.graph, &m, 2000, 1).delta, 0);
    }

    #[test]
    fn square_loops_in_z2() {
        let b = build_ball(&z2(), 2, 100).unwrap();
        let a = b.index_of_text("a").unwrap();
        // two unit squares through the edge (e, a)
        assert_eq!(fineness_scan(&b.graph, b.base, a, 4, 1 << 20).unwrap(), 2);
    }

    #[test]
    fn flat_ball_is_fat() {
        let b = build_ball(&z2(), 4, 1000).unwrap();
        let m = DistanceMatrix::new(&b.graph);
        assert!(hyperbolicity_estimate(&b.graph, &m, 1 << 20, 1).delta >= 2);
    }
}
