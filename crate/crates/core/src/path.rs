//! Simplicial vertex paths, combings, and quasi-geodesy.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Graph, Metric};

/// Integer-parameterized path: `vertices[t]` is the position at time `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn point(v: usize) -> Self {
        Self(alloc::vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn start(&self) -> usize {
        self.0[0]
    }

    pub fn end(&self) -> usize {
        *self.0.last().expect("paths are nonempty")
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.0.iter().position(|&x| x == v)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    /// `c|[start, v]` for the first occurrence of `v`.
    pub fn prefix_to(&self, v: usize) -> Option<Path> {
        self.position(v).map(|i| Path(self.0[..=i].to_vec()))
    }

    /// `c|[v, end]` for the first occurrence of `v`.
    pub fn suffix_from(&self, v: usize) -> Option<Path> {
        self.position(v).map(|i| Path(self.0[i..].to_vec()))
    }

    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn join(&self, other: &Path) -> Path {
        debug_assert_eq!(self.end(), other.start());
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0[1..]);
        Path(v)
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = self.0.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn check_in(&self, graph: &Graph) -> Result<()> {
        for &v in &self.0 {
            if v >= graph.vertex_count() {
                return Err(Error::VertexOutOfRange(v));
            }
        }
        for w in self.0.windows(2) {
            if !graph.has_edge(w[0], w[1]) {
                return Err(Error::NotAPath(w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// Quasi-geodesy constant λ ≥ 1, or unbounded when a path revisits a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lambda {
    Finite(Ratio<u64>),
    Unbounded,
}

impl Lambda {
    pub const ONE: Lambda = Lambda::Finite(Ratio::new_raw(1, 1));

    pub fn from_integer(n: u64) -> Self {
        Lambda::Finite(Ratio::from_integer(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Lambda::Finite(_))
    }

    pub fn ratio(&self) -> Option<Ratio<u64>> {
        match self {
            Lambda::Finite(r) => Some(*r),
            Lambda::Unbounded => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Lambda::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Lambda::Unbounded => f64::INFINITY,
        }
    }

    /// Smallest integer ≥ λ.
    pub fn ceil(&self) -> Option<u64> {
        self.ratio().map(|r| r.ceil().to_integer())
    }

    pub fn scale(&self, k: u64) -> Lambda {
        match self {
            Lambda::Finite(r) => Lambda::Finite(r * k),
            Lambda::Unbounded => Lambda::Unbounded,
        }
    }
}

impl Ord for Lambda {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Lambda::Finite(a), Lambda::Finite(b)) => a.cmp(b),
            (Lambda::Finite(_), Lambda::Unbounded) => Ordering::Less,
            (Lambda::Unbounded, Lambda::Finite(_)) => Ordering::Greater,
            (Lambda::Unbounded, Lambda::Unbounded) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Lambda {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Lambda::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Lambda::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        use core::fmt::Write;
        let mut buf = String::new();
        let _ = write!(buf, "{self}");
        s.serialize_str(&buf)
    }
}

/// Minimal λ ≥ 1 with `|t − t'| ≤ λ·d(c(t), c(t'))` over all parameter pairs.
pub fn quasigeodesy_constant(path: &Path, metric: &impl Metric) -> Lambda {
    let v = path.vertices();
    let mut best = Ratio::from_integer(1u64);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = metric.dist(v[i], v[j]);
            if d == 0 {
                return Lambda::Unbounded;
            }
            let r = Ratio::new((j - i) as u64, u64::from(d));
            if r > best {
                best = r;
            }
        }
    }
    Lambda::Finite(best)
}

/// Like [`quasigeodesy_constant`], but fails with [`Error::OutOfBall`] when
/// some pair could be joined by a shorter path leaving the ball of radius
/// `radius`, i.e. when `|x| + |y| + d(x, y) > 2·radius + 2`.
pub fn quasigeodesy_constant_certified(
    path: &Path,
    metric: &impl Metric,
    depth: &[u32],
    radius: u32,
) -> Result<Lambda> {
    let v = path.vertices();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = metric.dist(v[i], v[j]);
            if depth[v[i]] + depth[v[j]] + d > 2 * radius + 2 {
                return Err(Error::OutOfBall(alloc::format!("pair ({}, {})", v[i], v[j])));
            }
        }
    }
    Ok(quasigeodesy_constant(path, metric))
}

/// Appends the edge `(path.end(), next)`; `next` must be off the path.
pub fn concat_edge(path: &Path, next: usize, graph: &Graph) -> Result<Path> {
    let end = path.end();
    if !graph.has_edge(end, next) {
        return Err(Error::NotAPath(end, next));
    }
    if path.contains(next) {
        return Err(Error::EndpointOnPath(next));
    }
    let mut v = path.0.clone();
    v.push(next);
    Ok(Path(v))
}

/// Total map from vertex index to a path starting at `base` and ending at
/// that vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Combing {
    pub base: usize,
    pub paths: Vec<Path>,
}

impl Combing {
    pub fn path(&self, v: usize) -> &Path {
        &self.paths[v]
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Checks totality, endpoints, and adjacency of every path.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        if self.paths.len() != graph.vertex_count() {
            return Err(Error::VertexOutOfRange(self.paths.len()));
        }
        for (v, p) in self.paths.iter().enumerate() {
            if p.start() != self.base || p.end() != v {
                return Err(Error::NotAPath(p.start(), p.end()));
            }
            p.check_in(graph)?;
        }
        Ok(())
    }
}
