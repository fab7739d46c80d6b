//! Measured straightness constants, bounded coset penetration and stability
//! sweeps over radii.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use num_rational::Ratio;
use serde::Serialize;

use crate::area::{Area, AreaSolver, Loop};
use crate::complex::CellComplex;
use crate::cone::ConedGraph;
use crate::error::Result;
use crate::graph::{DistanceMatrix, Graph, Metric};
use crate::path::{quasigeodesy_constant, Combing, Lambda, Path};

/// Where a combing is measured: its paths lie in `graph`, quasi-geodesy uses
/// `metric`, areas are taken in `complex`.
#[derive(Clone, Copy)]
pub struct Space<'a> {
    pub graph: &'a Graph,
    pub metric: &'a DistanceMatrix,
    pub complex: &'a CellComplex,
    /// Distance of each vertex from the base, for radius margins.
    pub dist: &'a [u32],
    pub radius: u32,
    pub budget: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StraightnessConstants {
    pub lambda: Lambda,
    pub m_thin: Area,
    pub m_prefix: Area,
    /// `max(m_thin, m_prefix)`.
    pub m: Area,
    pub radius: u32,
    /// Radius minus the distance of the worst witness, per constant.
    pub lambda_margin: u32,
    pub thin_margin: u32,
    pub prefix_margin: u32,
    /// Some witness sits within distance 2 of the ball boundary.
    pub unreliable: bool,
    pub triangles: usize,
    pub digones: usize,
    /// Triangles and digones whose area search ran out of budget.
    pub exhausted: usize,
}

fn margin(radius: u32, d: u32) -> u32 {
    radius.saturating_sub(d)
}

/// Largest area over `loops`, with the index of a worst loop and the number
/// of exhausted searches.
fn max_area(complex: &CellComplex, budget: u32, loops: &[Loop]) -> Result<(Area, usize, usize)> {
    let chunks: Vec<&[Loop]> = loops.chunks(64).collect();
    let per_chunk = crate::par::map_slice(&chunks, |chunk| -> Result<Vec<Area>> {
        let mut solver = AreaSolver::new(complex).with_budget(budget);
        chunk.iter().map(|l| solver.area(l)).collect()
    });
    let mut best = Area::Exact(0);
    let mut arg = 0;
    let mut exhausted = 0;
    let mut i = 0;
    for chunk in per_chunk {
        for a in chunk? {
            if !a.is_exact() {
                exhausted += 1;
            }
            if a.value() > best.value() || (a.value() == best.value() && !a.is_exact()) {
                arg = i;
            }
            best = best.join(a);
            i += 1;
        }
    }
    Ok((best, arg, exhausted))
}

/// Largest quasi-geodesy constant over the paths, with a worst index.
pub fn max_lambda<'p>(paths: impl IntoIterator<Item = &'p Path>, metric: &DistanceMatrix) -> (Lambda, usize) {
    let mut best = Lambda::ONE;
    let mut arg = 0;
    for (i, p) in paths.into_iter().enumerate() {
        let l = quasigeodesy_constant(p, metric);
        if l > best {
            best = l;
            arg = i;
        }
    }
    (best, arg)
}

/// `λ` over all paths, `m_thin` over the triangles `(ρ(u), ρ(v), (u, v))` for
/// the edges of `space.graph`, `m_prefix` over the digones
/// `(ρ(v)|[v₀, w], ρ(w))` for `w` on `ρ(v)`.
pub fn measure_straightness(rho: &Combing, space: &Space<'_>) -> Result<StraightnessConstants> {
    rho.validate(space.graph)?;
    let (lambda, worst_path) = max_lambda(&rho.paths, space.metric);
    let edges = space.graph.edges();
    let tri: Vec<Loop> = edges.iter().map(|&(u, v)| Loop::triangle(&rho.paths[u], &rho.paths[v])).collect();
    let (m_thin, worst_edge, ex1) = max_area(space.complex, space.budget, &tri)?;
    let mut dig_ends = Vec::new();
    let mut dig = Vec::new();
    for p in &rho.paths {
        for (i, &w) in p.vertices().iter().enumerate() {
            let pre = Path(p.0[..=i].to_vec());
            if pre != rho.paths[w] {
                dig.push(Loop::digone(&pre, &rho.paths[w]));
                dig_ends.push(w);
            }
        }
    }
    let (m_prefix, worst_dig, ex2) = max_area(space.complex, space.budget, &dig)?;
    let lambda_margin = margin(space.radius, space.dist[rho.paths[worst_path].end()]);
    let thin_margin = edges
        .get(worst_edge)
        .map_or(space.radius, |&(u, v)| margin(space.radius, space.dist[u].max(space.dist[v])));
    let prefix_margin = dig_ends.get(worst_dig).map_or(space.radius, |&w| margin(space.radius, space.dist[w]));
    let unreliable = (lambda > Lambda::ONE && lambda_margin < 2)
        || (m_thin.value() > 0 && thin_margin < 2)
        || (m_prefix.value() > 0 && prefix_margin < 2);
    Ok(StraightnessConstants {
        lambda,
        m: m_thin.join(m_prefix),
        m_thin,
        m_prefix,
        radius: space.radius,
        lambda_margin,
        thin_margin,
        prefix_margin,
        unreliable,
        triangles: tri.len(),
        digones: dig.len(),
        exhausted: ex1 + ex2,
    })
}

/// Largest triangle area over every 1-skeleton edge of the complex.
pub fn thin_over_skeleton(rho: &Combing, complex: &CellComplex, budget: u32) -> Result<Area> {
    let tri: Vec<Loop> = complex
        .skeleton
        .edges()
        .into_iter()
        .map(|(u, v)| Loop::triangle(&rho.paths[u], &rho.paths[v]))
        .collect();
    Ok(max_area(complex, budget, &tri)?.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BcpWitness {
    pub paths: [Path; 2],
    pub cone: usize,
    pub entering: [usize; 2],
    pub distance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BcpEstimate {
    pub lambda: Lambda,
    pub r: u32,
    /// Enumeration finished below the threshold, which covers every simple
    /// λ-quasi-geodesic from the base.
    pub exact: bool,
    pub threshold: usize,
    pub paths: u64,
    pub witness: Option<BcpWitness>,
}

/// Largest `K`-distance between the vertices from which two λ-quasi-geodesics
/// of `K̂` with the same endpoints enter a common cone vertex. Paths start at
/// the base; the other endpoint ranges over the ball.
pub fn bcp_estimate(
    coned: &ConedGraph,
    hat_metric: &DistanceMatrix,
    base_metric: &DistanceMatrix,
    lambda: Lambda,
    threshold: Option<usize>,
    cap: u64,
) -> BcpEstimate {
    let Some(lr) = lambda.ratio() else {
        return BcpEstimate { lambda, r: 0, exact: false, threshold: 0, paths: 0, witness: None };
    };
    let diam = hat_metric.diameter() as u64;
    let threshold =
        threshold.unwrap_or_else(|| (lr * Ratio::from_integer(2 * diam)).ceil().to_integer() as usize);
    if coned.cones().is_empty() {
        return BcpEstimate { lambda, r: 0, exact: true, threshold, paths: 0, witness: None };
    }
    struct State<'a> {
        g: &'a Graph,
        coned: &'a ConedGraph,
        metric: &'a DistanceMatrix,
        lr: Ratio<u64>,
        threshold: usize,
        cap: u64,
        steps: u64,
        path: Vec<usize>,
        on: Vec<bool>,
        entries: HashMap<(usize, usize), Vec<(usize, Path)>>,
    }
    impl State<'_> {
        fn record(&mut self) {
            let end = *self.path.last().expect("nonempty");
            if self.coned.is_cone(end) {
                return;
            }
            for i in 1..self.path.len() - 1 {
                let c = self.path[i];
                if self.coned.is_cone(c) {
                    let e = self.path[i - 1];
                    let list = self.entries.entry((end, c)).or_default();
                    if !list.iter().any(|(x, _)| *x == e) {
                        list.push((e, Path(self.path.clone())));
                    }
                }
            }
        }
        fn go(&mut self) -> bool {
            self.steps += 1;
            if self.steps > self.cap {
                return false;
            }
            self.record();
            if self.path.len() > self.threshold {
                return true;
            }
            let x = *self.path.last().expect("nonempty");
            let nbrs: Vec<usize> = self.g.neighbors(x).collect();
            let t = self.path.len();
            for w in nbrs {
                if self.on[w] {
                    continue;
                }
                let ok = self.path.iter().enumerate().all(|(i, &p)| {
                    Ratio::from_integer((t - i) as u64) <= self.lr * u64::from(self.metric.dist(p, w))
                });
                if !ok {
                    continue;
                }
                self.on[w] = true;
                self.path.push(w);
                let fine = self.go();
                self.path.pop();
                self.on[w] = false;
                if !fine {
                    return false;
                }
            }
            true
        }
    }
    let base = coned.base();
    let mut st = State {
        g: coned.graph(),
        coned,
        metric: hat_metric,
        lr,
        threshold,
        cap,
        steps: 0,
        path: vec![base],
        on: vec![false; coned.vertex_count()],
        entries: HashMap::new(),
    };
    st.on[base] = true;
    let complete = st.go();
    let mut r = 0;
    let mut witness = None;
    let mut keys: Vec<_> = st.entries.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let list = &st.entries[&key];
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let d = base_metric.dist(list[i].0, list[j].0);
                if d > r {
                    r = d;
                    witness = Some(BcpWitness {
                        paths: [list[i].1.clone(), list[j].1.clone()],
                        cone: key.1,
                        entering: [list[i].0, list[j].0],
                        distance: d,
                    });
                }
            }
        }
    }
    BcpEstimate { lambda, r, exact: complete, threshold, paths: st.steps, witness }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StabilityVerdict {
    Stable,
    Growing,
    Inconclusive,
}

/// Needs at least three radii; stable when every value is finite and the
/// value at the largest radius does not exceed the one before it.
pub fn stability_verdict<T: Ord>(values: &[Option<T>]) -> StabilityVerdict {
    if values.len() < 3 {
        return StabilityVerdict::Inconclusive;
    }
    if values.iter().any(Option::is_none) {
        return StabilityVerdict::Growing;
    }
    let k = values.len();
    if values[k - 1] <= values[k - 2] {
        StabilityVerdict::Stable
    } else {
        StabilityVerdict::Growing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepKind {
    Reduction,
    Extension,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub radii: Vec<u32>,
    pub values: Vec<Lambda>,
    pub verdict: StabilityVerdict,
}

/// Runs `measure` at every radius and judges the growth of the constant.
pub fn sweep_lemma_qg(
    kind: SweepKind,
    radii: &[u32],
    mut measure: impl FnMut(u32) -> Result<Lambda>,
) -> Result<SweepReport> {
    let values = radii.iter().map(|&r| measure(r)).collect::<Result<Vec<_>>>()?;
    let finite: Vec<Option<Ratio<u64>>> = values.iter().map(Lambda::ratio).collect();
    Ok(SweepReport { kind, radii: radii.to_vec(), values, verdict: stability_verdict(&finite) })
}

/// `μ`: largest constant of the Farb reductions of `paths`, measured in `K̂`.
pub fn reduction_lambda(paths: &[Path], coned: &ConedGraph, hat_metric: &DistanceMatrix) -> Lambda {
    let reduced: Vec<Path> = paths.iter().map(|p| crate::combing::farb_reduce(p, coned)).collect();
    max_lambda(&reduced, hat_metric).0
}

/// `ν`: largest constant of the extensions of `paths` (simple paths of `K̂`
/// between ball vertices), measured in `K`.
pub fn extension_lambda(paths: &[Path], coned: &ConedGraph, base_metric: &DistanceMatrix) -> Result<Lambda> {
    let ext = paths.iter().map(|p| crate::combing::extend_path(p, coned)).collect::<Result<Vec<_>>>()?;
    Ok(max_lambda(&ext, base_metric).0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinenessSummary {
    pub radius: u32,
    pub edge: (String, String),
    pub max_len: usize,
    pub count: u64,
}

/// Everything measured in one run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub constants: Vec<StraightnessConstants>,
    pub bcp: Vec<BcpEstimate>,
    pub fineness: Vec<FinenessSummary>,
    /// Counts grow with the radius: the coned graph is not fine.
    pub fineness_failure: Option<bool>,
    pub sweeps: Vec<SweepReport>,
    pub exhausted_flags: Vec<String>,
    pub radii: Vec<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::rips_two_skeleton;
    use crate::cone::{cone_off, ConeFamily};
    use crate::graph::{build_ball, geodesic_tree_combing};
    use crate::group::GroupSpec;
    use crate::word::Alphabet;

    #[test]
    fn tree_combing_is_straight() {
        let b = build_ball(&GroupSpec::free(Alphabet::standard(2)), 3, 1000).unwrap();
        let m = DistanceMatrix::new(&b.graph);
        let cx = rips_two_skeleton(&b.graph, &m, 1);
        let rho = geodesic_tree_combing(&b.graph, b.base);
        let sp = Space { graph: &b.graph, metric: &m, complex: &cx, dist: &b.dist, radius: 3, budget: 16 };
        let c = measure_straightness(&rho, &sp).unwrap();
        assert_eq!((c.lambda, c.m_thin, c.m_prefix), (Lambda::ONE, Area::Exact(0), Area::Exact(0)));
    }

    #[test]
    fn z2_shortlex_combing() {
        let b = build_ball(&GroupSpec::free_abelian(Alphabet::standard(2)), 3, 1000).unwrap();
        let m = DistanceMatrix::new(&b.graph);
        let cx = rips_two_skeleton(&b.graph, &m, 2);
        let rho = geodesic_tree_combing(&b.graph, b.base);
        let sp = Space { graph: &b.graph, metric: &m, complex: &cx, dist: &b.dist, radius: 3, budget: 16 };
        let c = measure_straightness(&rho, &sp).unwrap();
        // worst triangle: the 1×2 rectangle between ρ(a b²) and ρ(b²)
        assert_eq!((c.lambda, c.m_thin, c.m_prefix), (Lambda::ONE, Area::Exact(4), Area::Exact(0)));
    }

    #[test]
    fn bcp_without_cones_is_zero() {
        let s = GroupSpec::free(Alphabet::standard(2));
        let b = build_ball(&s, 2, 1000).unwrap();
        let c = cone_off(&b, &[]).unwrap();
        let m = DistanceMatrix::new(c.graph());
        let e = bcp_estimate(&c, &m, &m, Lambda::from_integer(2), None, 1 << 20);
        assert_eq!((e.r, e.exact), (0, true));
    }

    #[test]
    fn bcp_f2_cone_is_finite() {
        let s = GroupSpec::free(Alphabet::standard(2));
        let b = build_ball(&s, 3, 1000).unwrap();
        let fam = ConeFamily { tag: "A".into(), generator: s.element("a").unwrap().word };
        let c = cone_off(&b, &[fam]).unwrap();
        let hm = DistanceMatrix::new(c.graph());
        let bm = DistanceMatrix::new(&c.base_graph);
        let e = bcp_estimate(&c, &hm, &bm, Lambda::from_integer(2), None, 1 << 24);
        assert!(e.exact);
        assert!(e.r >= 1);
    }

    #[test]
    fn verdicts() {
        assert_eq!(stability_verdict(&[Some(1), Some(1)]), StabilityVerdict::Inconclusive);
        assert_eq!(stability_verdict(&[Some(1), Some(2), Some(2)]), StabilityVerdict::Stable);
        assert_eq!(stability_verdict(&[Some(1), Some(2), Some(3)]), StabilityVerdict::Growing);
        assert_eq!(stability_verdict::<u32>(&[Some(1), None, Some(1)]), StabilityVerdict::Growing);
    }

    #[test]
    fn identity_reduction() {
        let s = GroupSpec::free(Alphabet::standard(2));
        let b = build_ball(&s, 3, 1000).unwrap();
        let fam = ConeFamily { tag: "A".into(), generator: s.element("a").unwrap().word };
        let c = cone_off(&b, &[fam]).unwrap();
        let hm = DistanceMatrix::new(c.graph());
        let ix = |t: &str| b.index_of_text(t).unwrap();
        let p = Path(vec![ix("1"), ix("b"), ix("b^2")]);
        assert_eq!(reduction_lambda(&[p], &c, &hm), Lambda::ONE);
    }
}
