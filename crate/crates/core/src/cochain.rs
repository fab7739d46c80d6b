//! Bounded cochains on a cell complex and the coboundary solver driven by a
//! thin combing.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_rational::Ratio;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::area::{Area, AreaSolver, FillOutcome, Loop};
use crate::complex::{CellComplex, CellKind};
use crate::error::{Error, Result};
use crate::path::Combing;

/// Coefficients: integers or exact rationals, normed by absolute value.
pub trait CochainValue: Signed + Copy + Ord + Debug + Send + Sync {
    fn from_i64(k: i64) -> Self;
}

impl CochainValue for i64 {
    fn from_i64(k: i64) -> Self {
        k
    }
}

impl CochainValue for Ratio<i64> {
    fn from_i64(k: i64) -> Self {
        Ratio::from_integer(k)
    }
}

/// Values on edges oriented `(min, max)`; the reverse orientation reads the
/// negated value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneCochain<V> {
    values: BTreeMap<(usize, usize), V>,
}

impl<V: CochainValue> Default for OneCochain<V> {
    fn default() -> Self {
        Self { values: BTreeMap::new() }
    }
}

impl<V: CochainValue> OneCochain<V> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the value of the edge traversed from `u` to `v`.
    pub fn set(&mut self, u: usize, v: usize, x: V) {
        if u < v {
            self.values.insert((u, v), x);
        } else {
            self.values.insert((v, u), -x);
        }
    }

    /// Value of the edge traversed from `u` to `v`.
    pub fn get(&self, u: usize, v: usize) -> Option<V> {
        if u < v {
            self.values.get(&(u, v)).copied()
        } else {
            self.values.get(&(v, u)).map(|&x| -x)
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), V)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> V {
        self.values.values().map(|x| x.abs()).max().unwrap_or_else(V::zero)
    }
}

/// Values on cells in their stored orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCochain<V> {
    pub values: Vec<V>,
}

impl<V: CochainValue> TwoCochain<V> {
    pub fn zero(complex: &CellComplex) -> Self {
        Self { values: alloc::vec![V::zero(); complex.cell_count()] }
    }

    pub fn sup_norm(&self) -> V {
        self.values.iter().map(|x| x.abs()).max().unwrap_or_else(V::zero)
    }

    /// Pairing with an integral 2-chain.
    pub fn eval(&self, chain: &[(usize, i64)]) -> V {
        chain.iter().fold(V::zero(), |acc, &(c, k)| acc + self.values[c] * V::from_i64(k))
    }
}

/// `(δu)(x, y) = u(y) − u(x)` on every edge of the skeleton.
pub fn coboundary0<V: CochainValue>(u: &[V], complex: &CellComplex) -> OneCochain<V> {
    let mut c = OneCochain::new();
    for (x, y) in complex.skeleton.edges() {
        c.set(x, y, u[y] - u[x]);
    }
    c
}

/// `(∂c₁)(f)`: signed sum of `c₁` along the boundary of `f`.
pub fn coboundary<V: CochainValue>(c1: &OneCochain<V>, complex: &CellComplex) -> Result<TwoCochain<V>> {
    let mut values = Vec::with_capacity(complex.cell_count());
    for i in 0..complex.cell_count() {
        let mut acc = V::zero();
        for ((u, v), s) in complex.boundary(i) {
            let x = c1.get(u, v).ok_or(Error::MissingEdgeValue(u, v))?;
            acc = if s > 0 { acc + x } else { acc - x };
        }
        values.push(acc);
    }
    Ok(TwoCochain { values })
}

/// Number of Rips tetrahedra (four vertices, all four faces present as
/// triangles) on whose boundary `c` does not sum to zero.
pub fn cocycle_defects<V: CochainValue>(c: &TwoCochain<V>, complex: &CellComplex) -> usize {
    let mut bad = 0;
    for i in 0..complex.cell_count() {
        if complex.kind(i) == CellKind::Relation || complex.cell(i).len() != 3 {
            continue;
        }
        let t = complex.cell(i);
        let (a, b, d) = (t[0], t[1], t[2]);
        // each tetrahedron is visited from its face opposite the largest vertex
        for w in complex.skeleton.neighbors(d).filter(|&w| w > d) {
            let faces = [[b, d, w], [a, d, w], [a, b, w]];
            let ids: Option<Vec<usize>> = faces.iter().map(|f| complex.find_cell(f)).collect();
            let Some(ids) = ids else { continue };
            let sum = c.values[ids[0]] - c.values[ids[1]] + c.values[ids[2]] - c.values[i];
            if !sum.is_zero() {
                bad += 1;
            }
        }
    }
    bad
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DomainReport {
    pub edges: usize,
    pub solved_edges: usize,
    /// Edges whose combing triangle could not be filled within budget.
    pub unsolved_edges: Vec<(usize, usize)>,
    /// Cells whose boundary edges were all solved.
    pub domain_cells: usize,
    pub excluded_cells: Vec<usize>,
    /// Domain cells where `∂c′ ≠ c`.
    pub violations: usize,
    /// Largest filling area over the solved edges.
    pub m_thin_skeleton: Area,
    pub norm_bound_holds: bool,
}

#[derive(Debug, Clone)]
pub struct Solution<V> {
    pub c1: OneCochain<V>,
    pub report: DomainReport,
}

/// Minimal fillings of the combing triangles `(ρ(u), (u, v), ρ(v))` of every
/// 1-skeleton edge; reusable across cochains.
#[derive(Debug, Clone)]
pub struct EdgeFillings {
    pub edges: Vec<(usize, usize)>,
    pub fills: Vec<FillOutcome>,
    /// Largest filling area.
    pub m_thin: Area,
}

pub fn edge_fillings(rho: &Combing, complex: &CellComplex, budget: u32) -> Result<EdgeFillings> {
    let edges = complex.skeleton.edges();
    let chunks: Vec<&[(usize, usize)]> = edges.chunks(64).collect();
    let per_chunk = crate::par::map_slice(&chunks, |chunk| -> Result<Vec<FillOutcome>> {
        let mut solver = AreaSolver::new(complex).with_budget(budget);
        chunk.iter().map(|&(u, v)| solver.fill(&Loop::triangle(&rho.paths[u], &rho.paths[v]))).collect()
    });
    let mut fills = Vec::with_capacity(edges.len());
    for chunk in per_chunk {
        fills.extend(chunk?);
    }
    let m_thin = fills.iter().fold(Area::Exact(0), |m, f| m.join(f.area()));
    Ok(EdgeFillings { edges, fills, m_thin })
}

/// `c′(u, v)`: `c` summed with signs over a minimal filling of the triangle
/// `(ρ(u), (u, v), ρ(v))`, for every 1-skeleton edge. Then `∂c′ = c` is
/// checked on every cell whose edges were all solved, and
/// `sup|c′| ≤ m_thin · sup|c|` with `m_thin` the largest filling area.
pub fn solve_coboundary<V: CochainValue>(
    rho: &Combing,
    complex: &CellComplex,
    c: &TwoCochain<V>,
    budget: u32,
) -> Result<Solution<V>> {
    Ok(solve_with(&edge_fillings(rho, complex, budget)?, complex, c))
}

/// [`solve_coboundary`] over precomputed fillings.
pub fn solve_with<V: CochainValue>(fillings: &EdgeFillings, complex: &CellComplex, c: &TwoCochain<V>) -> Solution<V> {
    let mut c1 = OneCochain::new();
    let mut unsolved = Vec::new();
    for (&(u, v), outcome) in fillings.edges.iter().zip(&fillings.fills) {
        match outcome.filling() {
            Some(f) => c1.set(u, v, c.eval(&f.chain)),
            None => unsolved.push((u, v)),
        }
    }
    let mut excluded = Vec::new();
    let mut violations = 0;
    for i in 0..complex.cell_count() {
        let mut acc = V::zero();
        let mut complete = true;
        for ((u, v), s) in complex.boundary(i) {
            match c1.get(u, v) {
                Some(x) => acc = if s > 0 { acc + x } else { acc - x },
                None => complete = false,
            }
        }
        if !complete {
            excluded.push(i);
        } else if acc != c.values[i] {
            violations += 1;
        }
    }
    let m_thin = fillings.m_thin;
    let bound = V::from_i64(i64::from(m_thin.value())) * c.sup_norm();
    let edges = fillings.edges.len();
    let report = DomainReport {
        edges,
        solved_edges: edges - unsolved.len(),
        unsolved_edges: unsolved,
        domain_cells: complex.cell_count() - excluded.len(),
        excluded_cells: excluded,
        violations,
        m_thin_skeleton: m_thin,
        norm_bound_holds: c1.sup_norm() <= bound,
    };
    Solution { c1, report }
}

/// A 1-cochain with independent uniform values in `-max_abs..=max_abs`.
pub fn random_one_cochain<V: CochainValue>(complex: &CellComplex, max_abs: i64, seed: u64) -> OneCochain<V> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = OneCochain::new();
    for (x, y) in complex.skeleton.edges() {
        u.set(x, y, V::from_i64(rng.random_range(-max_abs..=max_abs)));
    }
    u
}
