//! Combinatorial area of loops in a 2-complex.
//!
//! A move replaces a run of consecutive loop edges lying along the boundary
//! of a cell by the complementary boundary arc (cost 1); backtracks cancel for
//! free. Loops are kept cyclically reduced and canonical under rotation and
//! reflection, and the minimal number of moves is found breadth first.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::path::Path;

/// An area, or a lower bound when the search budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Area {
    Exact(u32),
    AtLeast(u32),
}

impl Area {
    pub fn value(&self) -> u32 {
        match *self {
            Area::Exact(a) | Area::AtLeast(a) => a,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Area::Exact(_))
    }

    /// Maximum of two measurements; inexact if either is.
    pub fn join(self, other: Area) -> Area {
        let v = self.value().max(other.value());
        if self.is_exact() && other.is_exact() {
            Area::Exact(v)
        } else {
            Area::AtLeast(v)
        }
    }
}

impl fmt::Display for Area {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Area::Exact(a) => write!(f, "{a}"),
            Area::AtLeast(a) => write!(f, ">={a}"),
        }
    }
}

impl Serialize for Area {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            Area::Exact(a) => s.serialize_u32(*a),
            Area::AtLeast(_) => {
                use core::fmt::Write;
                let mut buf = String::new();
                let _ = write!(buf, "{self}");
                s.serialize_str(&buf)
            }
        }
    }
}

/// One cell move of a filling: the cell, whether the replaced arc ran along
/// the cell's stored orientation, and the canonical loop afterwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FillStep {
    pub cell: usize,
    pub sign: i8,
    pub loop_after: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Filling {
    pub area: u32,
    /// Integral 2-chain whose boundary is the input loop, sorted by cell.
    pub chain: Vec<(usize, i64)>,
    /// Canonical reduced form of the input loop; `moves` start here.
    pub start: Vec<usize>,
    pub moves: Vec<FillStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FillOutcome {
    Filled(Filling),
    Exhausted { lower_bound: u32 },
}

impl FillOutcome {
    pub fn area(&self) -> Area {
        match self {
            FillOutcome::Filled(f) => Area::Exact(f.area),
            FillOutcome::Exhausted { lower_bound } => Area::AtLeast(*lower_bound),
        }
    }

    pub fn filling(&self) -> Option<&Filling> {
        match self {
            FillOutcome::Filled(f) => Some(f),
            FillOutcome::Exhausted { .. } => None,
        }
    }
}

/// Closed vertex loop, stored without repeating the first vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Loop(pub Vec<usize>);

impl Loop {
    /// From a closed vertex sequence whose first and last entries agree.
    pub fn from_closed(v: &[usize]) -> Result<Self> {
        match (v.first(), v.last()) {
            (Some(a), Some(b)) if a == b => Ok(Self(v[..v.len() - 1].to_vec())),
            (Some(&a), Some(&b)) => Err(Error::NotAPath(b, a)),
            _ => Ok(Self(Vec::new())),
        }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        if self.0.len() < 2 {
            0
        } else {
            self.0.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `p · (p.end, q.end) · q⁻¹`; a trivial connector when the ends agree.
    pub fn triangle(p: &Path, q: &Path) -> Self {
        let mut v = p.0.clone();
        v.extend(q.0.iter().rev().skip(usize::from(p.end() == q.end())));
        v.pop();
        Self(v)
    }

    /// `p · q⁻¹` for paths with common endpoints.
    pub fn digone(p: &Path, q: &Path) -> Self {
        debug_assert_eq!(p.end(), q.end());
        Self::triangle(p, q)
    }

    pub fn check_in(&self, skeleton: &Graph) -> Result<()> {
        let n = self.0.len();
        if n < 2 {
            return Ok(());
        }
        for i in 0..n {
            let (u, v) = (self.0[i], self.0[(i + 1) % n]);
            if u >= skeleton.vertex_count() || v >= skeleton.vertex_count() {
                return Err(Error::VertexOutOfRange(u.max(v)));
            }
            if u != v && !skeleton.has_edge(u, v) {
                return Err(Error::NotInComplex(u, v));
            }
        }
        Ok(())
    }

    /// The loop as an integral 1-cycle on edges oriented `(min, max)`.
    pub fn cycle(&self) -> Vec<((usize, usize), i64)> {
        let n = self.0.len();
        let mut m: HashMap<(usize, usize), i64> = HashMap::new();
        if n >= 2 {
            for i in 0..n {
                let (u, v) = (self.0[i], self.0[(i + 1) % n]);
                if u != v {
                    *m.entry((u.min(v), u.max(v))).or_default() += if u < v { 1 } else { -1 };
                }
            }
        }
        let mut out: Vec<_> = m.into_iter().filter(|&(_, c)| c != 0).collect();
        out.sort_unstable();
        out
    }
}

/// Removes repeated vertices and backtracks, cyclically. Trivial loops
/// become empty.
fn reduce(cyc: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(cyc.len());
    for &x in cyc {
        if out.last() == Some(&x) {
            continue;
        }
        if out.len() >= 2 && out[out.len() - 2] == x {
            out.pop();
            continue;
        }
        out.push(x);
    }
    loop {
        let n = out.len();
        if n <= 2 {
            out.clear();
            return out;
        }
        if out[0] == out[n - 1] || out[n - 2] == out[0] {
            out.pop();
        } else if out[1] == out[n - 1] {
            out.remove(0);
        } else {
            return out;
        }
    }
}

/// Rotation/reflection minimal form and whether it is reflected.
fn canonical(cyc: &[u32]) -> (Vec<u32>, bool) {
    let n = cyc.len();
    let mut best: Vec<u32> = cyc.to_vec();
    let mut reflected = false;
    let mut cand = Vec::with_capacity(n);
    for dir in [false, true] {
        for s in 0..n {
            cand.clear();
            cand.extend((0..n).map(|i| if dir { cyc[(s + n - i) % n] } else { cyc[(s + i) % n] }));
            if cand < best {
                best.clone_from(&cand);
                reflected = dir;
            }
        }
    }
    (best, reflected)
}

/// Calls `f(cell, sign, next)` for every single-move successor of `p`
/// (unreduced).
fn successors(cx: &CellComplex, p: &[u32], mut f: impl FnMut(usize, i8, Vec<u32>)) {
    let n = p.len();
    for i in 0..n {
        let (u, v) = (p[i] as usize, p[(i + 1) % n] as usize);
        for &c in cx.cells_on_edge(u, v) {
            let cyc = cx.cell(c);
            let m = cyc.len();
            let Some(j) = cyc.iter().position(|&x| x == u) else { continue };
            let dir: isize = if cyc[(j + 1) % m] == v {
                1
            } else if cyc[(j + m - 1) % m] == v {
                -1
            } else {
                continue;
            };
            let at = |t: isize| cyc[(j as isize + dir * t).rem_euclid(m as isize) as usize];
            let mut kmax = 1;
            while kmax < n.min(m) && p[(i + kmax + 1) % n] as usize == at(kmax as isize + 1) {
                kmax += 1;
            }
            for k in 1..=kmax {
                let mut next = Vec::with_capacity(n + m);
                for t in 0..=(n - k) {
                    next.push(p[(i + k + t) % n]);
                }
                for t in 1..(m - k) as isize {
                    next.push(at(-t) as u32);
                }
                f(c, dir as i8, next);
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Node {
    parent: u32,
    cell: u32,
    sign: i8,
    reflected: bool,
    g: u32,
}

/// Best-first (A*) minimal-area solver with a memo cache.
#[derive(Debug, Clone)]
pub struct AreaSolver<'a> {
    complex: &'a CellComplex,
    budget: u32,
    slack: usize,
    longest: usize,
    state_cap: usize,
    cache: HashMap<Vec<u32>, FillOutcome>,
}

impl<'a> AreaSolver<'a> {
    pub const DEFAULT_BUDGET: u32 = 64;
    pub const DEFAULT_STATE_CAP: usize = 400_000;

    pub fn new(complex: &'a CellComplex) -> Self {
        let longest = complex.cells().map(|c| c.len()).max().unwrap_or(3);
        Self {
            complex,
            budget: Self::DEFAULT_BUDGET,
            slack: 2 * longest.saturating_sub(2),
            longest,
            state_cap: Self::DEFAULT_STATE_CAP,
            cache: HashMap::new(),
        }
    }

    pub fn with_budget(mut self, budget: u32) -> Self {
        self.budget = budget;
        self
    }

    /// Intermediate loops may be at most `slack` edges longer than the input.
    pub fn with_slack(mut self, slack: usize) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_state_cap(mut self, cap: usize) -> Self {
        self.state_cap = cap;
        self
    }

    pub fn complex(&self) -> &CellComplex {
        self.complex
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    pub fn area(&mut self, l: &Loop) -> Result<Area> {
        Ok(self.fill(l)?.area())
    }

    pub fn triangle_area(&mut self, p: &Path, q: &Path) -> Result<Area> {
        self.area(&Loop::triangle(p, q))
    }

    pub fn digone_area(&mut self, p: &Path, q: &Path) -> Result<Area> {
        self.area(&Loop::digone(p, q))
    }

    pub fn fill(&mut self, l: &Loop) -> Result<FillOutcome> {
        l.check_in(&self.complex.skeleton)?;
        let raw: Vec<u32> = l.0.iter().map(|&v| v as u32).collect();
        let reduced = reduce(&raw);
        let (start, r0) = canonical(&reduced);
        let out = match self.cache.get(&start) {
            Some(o) => o.clone(),
            None => {
                let o = self.search(&start, l.len());
                self.cache.insert(start, o.clone());
                o
            }
        };
        Ok(match out {
            FillOutcome::Filled(mut f) if r0 => {
                for e in &mut f.chain {
                    e.1 = -e.1;
                }
                FillOutcome::Filled(f)
            }
            o => o,
        })
    }

    fn search(&self, start: &[u32], input_len: usize) -> FillOutcome {
        let to_usize = |v: &[u32]| v.iter().map(|&x| x as usize).collect::<Vec<_>>();
        if start.is_empty() {
            return FillOutcome::Filled(Filling { area: 0, chain: vec![], start: vec![], moves: vec![] });
        }
        let max_len = input_len.max(start.len()) + self.slack;
        // a disc diagram of area A has at most A * longest boundary edges,
        // and one move shortens a loop by at most `longest`
        let h = |len: usize| len.div_ceil(self.longest) as u32;
        let mut states: Vec<Box<[u32]>> = vec![start.into()];
        let mut nodes = vec![Node { parent: 0, cell: 0, sign: 0, reflected: false, g: 0 }];
        let mut index: HashMap<Box<[u32]>, u32> = HashMap::new();
        index.insert(start.into(), 0);
        let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.budget as usize + 2];
        let f0 = h(start.len());
        if f0 > self.budget {
            return FillOutcome::Exhausted { lower_bound: f0 };
        }
        buckets[f0 as usize].push((0, 0));
        let mut f = f0;
        let goal = 'search: loop {
            let Some((id, g)) = buckets[f as usize].pop() else {
                f += 1;
                if f > self.budget {
                    return FillOutcome::Exhausted { lower_bound: self.budget + 1 };
                }
                if buckets[f as usize..].iter().all(|b| b.is_empty()) {
                    // no further loops reachable under the length limit
                    return FillOutcome::Exhausted { lower_bound: f };
                }
                continue;
            };
            if nodes[id as usize].g != g {
                continue;
            }
            let cur = states[id as usize].clone();
            let mut found = None;
            successors(self.complex, &cur, |cell, sign, next| {
                if found.is_some() {
                    return;
                }
                let red = reduce(&next);
                if red.len() > max_len {
                    return;
                }
                let (canon, reflected) = canonical(&red);
                let node = Node { parent: id, cell: cell as u32, sign, reflected, g: g + 1 };
                if canon.is_empty() {
                    found = Some(node);
                    return;
                }
                let fx = g + 1 + h(canon.len());
                if fx > self.budget {
                    return;
                }
                let b: Box<[u32]> = canon.into();
                match index.get(&b) {
                    Some(&old) if nodes[old as usize].g <= g + 1 => {}
                    Some(&old) => {
                        nodes[old as usize] = node;
                        buckets[fx as usize].push((old, g + 1));
                    }
                    None => {
                        states.push(b.clone());
                        nodes.push(node);
                        let nid = (states.len() - 1) as u32;
                        index.insert(b, nid);
                        buckets[fx as usize].push((nid, g + 1));
                    }
                }
            });
            if let Some(node) = found {
                states.push(Box::new([]));
                nodes.push(node);
                break 'search states.len() - 1;
            }
            if states.len() > self.state_cap {
                return FillOutcome::Exhausted { lower_bound: f };
            }
        };
        let mut chain: HashMap<usize, i64> = HashMap::new();
        let mut moves = Vec::new();
        let mut at = goal;
        while at != 0 {
            let nd = nodes[at];
            if nd.reflected {
                for c in chain.values_mut() {
                    *c = -*c;
                }
            }
            *chain.entry(nd.cell as usize).or_default() += i64::from(nd.sign);
            moves.push(FillStep { cell: nd.cell as usize, sign: nd.sign, loop_after: to_usize(&states[at]) });
            at = nd.parent as usize;
        }
        moves.reverse();
        let mut chain: Vec<_> = chain.into_iter().filter(|&(_, c)| c != 0).collect();
        chain.sort_unstable();
        FillOutcome::Filled(Filling { area: nodes[goal].g, chain, start: to_usize(start), moves })
    }
}

/// `min_area_fill` with default limits and the given move budget.
pub fn min_area_fill(complex: &CellComplex, l: &Loop, budget: u32) -> Result<FillOutcome> {
    AreaSolver::new(complex).with_budget(budget).fill(l)
}

/// Boundary of an integral 2-chain on edges oriented `(min, max)`.
pub fn chain_boundary(complex: &CellComplex, chain: &[(usize, i64)]) -> Vec<((usize, usize), i64)> {
    let mut m: HashMap<(usize, usize), i64> = HashMap::new();
    for &(c, k) in chain {
        for (e, s) in complex.boundary(c) {
            *m.entry(e).or_default() += k * i64::from(s);
        }
    }
    let mut out: Vec<_> = m.into_iter().filter(|&(_, c)| c != 0).collect();
    out.sort_unstable();
    out
}

/// Replays a filling: every step is a single move from the previous loop,
/// the trace ends at a point, the area equals the number of moves, and the
/// boundary of the chain is the loop.
pub fn verify_filling(complex: &CellComplex, l: &Loop, f: &Filling) -> bool {
    let raw: Vec<u32> = l.0.iter().map(|&v| v as u32).collect();
    let (start, _) = canonical(&reduce(&raw));
    if start.iter().map(|&x| x as usize).ne(f.start.iter().copied()) {
        return false;
    }
    let mut cur = start;
    for step in &f.moves {
        let target: Vec<u32> = step.loop_after.iter().map(|&x| x as u32).collect();
        let mut ok = false;
        successors(complex, &cur, |cell, sign, next| {
            if !ok && cell == step.cell && sign == step.sign && canonical(&reduce(&next)).0 == target {
                ok = true;
            }
        });
        if !ok {
            return false;
        }
        cur = target;
    }
    cur.is_empty() && f.area as usize == f.moves.len() && chain_boundary(complex, &f.chain) == l.cycle()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub length: usize,
    pub loops: usize,
    /// Largest area among the examined simple loops of this length.
    pub max_area: Area,
    /// Running maximum over all lengths up to this one.
    pub envelope: Area,
    /// All simple loops of this length were examined.
    pub exact: bool,
}

/// Isoperimetric table over simple cycles of `graph` of length `3..=max_len`.
/// Lengths with more than `sample_size` cycles are sampled with `seed`;
/// `dfs_cap` bounds the cycle enumeration.
pub fn isoperimetric_profile(
    solver: &mut AreaSolver<'_>,
    graph: &Graph,
    max_len: usize,
    sample_size: usize,
    dfs_cap: usize,
    seed: u64,
) -> Result<Vec<ProfileRow>> {
    let (cycles, complete) = simple_cycles(graph, max_len, dfs_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut envelope = Area::Exact(0);
    for len in 3..=max_len {
        let of_len: Vec<&Vec<usize>> = cycles.iter().filter(|c| c.len() == len).collect();
        let chosen: Vec<&Vec<usize>> = if of_len.len() > sample_size {
            let mut idx: Vec<usize> = sample(&mut rng, of_len.len(), sample_size).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| of_len[i]).collect()
        } else {
            of_len.clone()
        };
        let mut max_area = Area::Exact(0);
        for c in &chosen {
            max_area = max_area.join(solver.area(&Loop((*c).clone()))?);
        }
        envelope = envelope.join(max_area);
        rows.push(ProfileRow {
            length: len,
            loops: chosen.len(),
            max_area,
            envelope,
            exact: complete && chosen.len() == of_len.len(),
        });
    }
    Ok(rows)
}

/// Simple cycles of length ≥ 3 and ≤ `max_len`, each listed once starting at
/// its least vertex. The flag is false when `cap` DFS steps were not enough.
pub fn simple_cycles(graph: &Graph, max_len: usize, cap: usize) -> (Vec<Vec<usize>>, bool) {
    struct Dfs<'g> {
        g: &'g Graph,
        max_len: usize,
        cap: usize,
        steps: usize,
        out: Vec<Vec<usize>>,
        path: Vec<usize>,
        on: Vec<bool>,
    }
    impl Dfs<'_> {
        fn go(&mut self, s: usize) -> bool {
            self.steps += 1;
            if self.steps > self.cap {
                return false;
            }
            let x = *self.path.last().expect("nonempty");
            let nbrs: Vec<usize> = self.g.neighbors(x).collect();
            for w in nbrs {
                if w == s && self.path.len() >= 3 && self.path[1] < x {
                    self.out.push(self.path.clone());
                }
                if w <= s || self.on[w] || self.path.len() >= self.max_len {
                    continue;
                }
                self.on[w] = true;
                self.path.push(w);
                let ok = self.go(s);
                self.path.pop();
                self.on[w] = false;
                if !ok {
                    return false;
                }
            }
            true
        }
    }
    let n = graph.vertex_count();
    let mut d = Dfs { g: graph, max_len, cap, steps: 0, out: Vec::new(), path: Vec::new(), on: vec![false; n] };
    for s in 0..n {
        d.path = vec![s];
        d.on[s] = true;
        let ok = d.go(s);
        d.on[s] = false;
        if !ok {
            return (d.out, false);
        }
    }
    (d.out, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::rips_two_skeleton;
    use crate::graph::{build_ball, BallGraph, DistanceMatrix};
    use crate::group::GroupSpec;
    use crate::word::Alphabet;

    fn z2(r: u32, d: u32) -> (BallGraph, CellComplex) {
        let b = build_ball(&GroupSpec::free_abelian(Alphabet::standard(2)), r, 1000).unwrap();
        let m = DistanceMatrix::new(&b.graph);
        let cx = rips_two_skeleton(&b.graph, &m, d);
        (b, cx)
    }

    #[test]
    fn reduce_cases() {
        assert!(reduce(&[1, 2, 1]).is_empty());
        assert!(reduce(&[1, 2]).is_empty());
        assert_eq!(reduce(&[1, 2, 3, 2, 4]), vec![1, 2, 4]);
        assert_eq!(reduce(&[5, 1, 2, 3, 1]), vec![1, 2, 3]);
    }

    #[test]
    fn backtrack_and_triangle() {
        let (b, cx) = z2(2, 2);
        let ix = |s: &str| b.index_of_text(s).unwrap();
        let back = Loop(vec![ix("1"), ix("a")]);
        assert_eq!(min_area_fill(&cx, &back, 64).unwrap().area(), Area::Exact(0));
        let tri = Loop(vec![ix("1"), ix("a"), ix("a b")]);
        let f = min_area_fill(&cx, &tri, 64).unwrap();
        assert_eq!(f.area(), Area::Exact(1));
        assert!(verify_filling(&cx, &tri, f.filling().unwrap()));
    }

    #[test]
    fn unit_square_has_area_two() {
        let (b, cx) = z2(2, 2);
        let ix = |s: &str| b.index_of_text(s).unwrap();
        let sq = Loop(vec![ix("1"), ix("a"), ix("a b"), ix("b")]);
        let f = min_area_fill(&cx, &sq, 64).unwrap();
        assert_eq!(f.area(), Area::Exact(2));
        assert!(verify_filling(&cx, &sq, f.filling().unwrap()));
        let rev = Loop(sq.0.iter().rev().copied().collect());
        let g = min_area_fill(&cx, &rev, 64).unwrap();
        assert!(verify_filling(&cx, &rev, g.filling().unwrap()));
    }

    #[test]
    fn exhausted_is_soft() {
        let (b, cx) = z2(2, 2);
        let ix = |s: &str| b.index_of_text(s).unwrap();
        let sq = Loop(vec![ix("1"), ix("a"), ix("a b"), ix("b")]);
        assert_eq!(min_area_fill(&cx, &sq, 1).unwrap(), FillOutcome::Exhausted { lower_bound: 2 });
    }

    #[test]
    fn not_in_complex() {
        let (b, cx) = z2(2, 1);
        let ix = |s: &str| b.index_of_text(s).unwrap();
        let bad = Loop(vec![ix("1"), ix("a b"), ix("a")]);
        assert!(matches!(min_area_fill(&cx, &bad, 8), Err(Error::NotInComplex(..))));
    }

    #[test]
    fn z2_profile() {
        let (b, cx) = z2(2, 2);
        let mut s = AreaSolver::new(&cx);
        let rows = isoperimetric_profile(&mut s, &b.graph, 4, 1000, 1 << 20, 0).unwrap();
        assert_eq!(rows[1].length, 4);
        assert_eq!(rows[1].max_area, Area::Exact(2));
        assert!(rows[1].exact);
    }

    #[test]
    fn tree_profile_is_zero() {
        let b = build_ball(&GroupSpec::free(Alphabet::standard(2)), 3, 1000).unwrap();
        let m = DistanceMatrix::new(&b.graph);
        let cx = rips_two_skeleton(&b.graph, &m, 1);
        let mut s = AreaSolver::new(&cx);
        let rows = isoperimetric_profile(&mut s, &b.graph, 6, 10, 1 << 20, 0).unwrap();
        assert!(rows.iter().all(|r| r.max_area == Area::Exact(0) && r.loops == 0));
    }
}
