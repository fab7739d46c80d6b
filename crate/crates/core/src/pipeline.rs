//! The cone / glue / extend pipeline for graphs of groups with cyclic edge
//! groups: cone each vertex group along its edge groups, glue the coned
//! pieces into a tree of spaces, push the free-construction combing to the
//! coned Cayley ball of the whole group and extend it over the cones.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::combing::extend_path;
use crate::complex::{rips_two_skeleton, CellComplex, ComplexSummary};
use crate::cone::{cone_off, ConeFamily};
use crate::error::{Error, Result};
use crate::graph::{build_ball, geodesic_tree_combing, BallGraph, DistanceMatrix, EdgeLabel, Graph};
use crate::group::{EdgeKind, GroupClass, GroupSpec};
use crate::path::{Combing, Path};
use crate::tree::{
    coned_pieces, free_construction_combing, reduced_piece_combings, tree_of_spaces_within, TreeOptions,
};
use crate::verify::{measure_straightness, Space, StraightnessConstants};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PipelineOptions {
    pub radius: u32,
    /// Rips parameter of the measuring complexes.
    pub d: u32,
    pub budget: u32,
    /// Vertex cap for every ball and for the glued tree of spaces.
    pub cap: usize,
    /// The working ball has radius `radius + margin`.
    pub margin: u32,
    /// The vertex-group balls have radius `radius + piece_margin`.
    pub piece_margin: u32,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { radius: 3, d: 2, budget: 32, cap: 200_000, margin: 1, piece_margin: 2 }
    }
}

/// Relators of the whole group coming from the presentation: commutators of
/// free abelian vertex groups, small cancellation relators, and one relator
/// per cyclic edge identifying its two generators.
pub fn presentation_relators(spec: &GroupSpec) -> Vec<Word> {
    let commutators = |rank: usize, lift: &dyn Fn(i32) -> i32| {
        let mut out = Vec::new();
        for i in 1..=rank as i32 {
            for j in i + 1..=rank as i32 {
                let (x, y) = (lift(i), lift(j));
                out.push(Word(vec![x, y, -x, -y]));
            }
        }
        out
    };
    match spec.class() {
        GroupClass::Free => Vec::new(),
        GroupClass::FreeAbelian => commutators(spec.rank(), &|l| l),
        GroupClass::SmallCancellation(sc) => sc.relators().to_vec(),
        GroupClass::GraphOfGroups(gog) => {
            let mut out = Vec::new();
            for (v, g) in gog.vertices().iter().enumerate() {
                if matches!(g.class(), GroupClass::FreeAbelian) {
                    out.extend(commutators(g.rank(), &|l| gog.globalize_letter(v, l)));
                }
            }
            for (i, e) in gog.edges().iter().enumerate() {
                if e.kind == EdgeKind::Trivial {
                    continue;
                }
                let a = gog.globalize(e.source, &e.source_word);
                let b = gog.globalize(e.target, &e.target_word);
                let r = match gog.stable_letter(i) {
                    Some(t) => a.concat(&Word(vec![t])).concat(&b.inverse()).concat(&Word(vec![-t])),
                    None => a.concat(&b.inverse()),
                };
                out.push(r);
            }
            out
        }
    }
}

fn is_peripheral(g: &GroupSpec) -> bool {
    matches!(g.class(), GroupClass::FreeAbelian) && g.rank() >= 2
}

/// Checks the hypotheses: no cyclic edge between two peripheral (free
/// abelian of rank ≥ 2) vertex groups, every cyclic edge group maximal cyclic
/// in at least one endpoint group.
pub fn validate_pipeline(spec: &GroupSpec) -> Result<()> {
    let Some(gog) = spec.as_graph_of_groups() else { return Ok(()) };
    for (i, e) in gog.edges().iter().enumerate() {
        if e.kind == EdgeKind::Trivial {
            continue;
        }
        let (gs, gt) = (&gog.vertices()[e.source], &gog.vertices()[e.target]);
        if is_peripheral(gs) && is_peripheral(gt) {
            return Err(Error::PeripheralEdge(i));
        }
        if is_peripheral(gs) || is_peripheral(gt) {
            return Err(Error::InvalidSpec(format!(
                "edge {i}: cyclic edges into peripheral vertex groups are not supported"
            )));
        }
        let ms = gs.is_maximal_cyclic(&e.source_word);
        let mt = gt.is_maximal_cyclic(&e.target_word);
        match (ms, mt) {
            (Some(true), _) | (_, Some(true)) => {}
            (None, _) | (_, None) => return Err(Error::MaximalityUnverifiable(i)),
            _ => return Err(Error::NotMaximalCyclic(i)),
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceReport {
    pub vertex: usize,
    pub class: String,
    pub ball_vertices: usize,
    pub cones: usize,
    /// Constants of the reduced piece combing on the coned piece.
    pub constants: StraightnessConstants,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub radius: u32,
    pub d: u32,
    pub identity: bool,
    pub pieces: Vec<PieceReport>,
    pub glued_pieces: usize,
    pub glued_vertices: usize,
    pub max_depth: u32,
    /// Vertices of the radius-`radius` ball inside the output region.
    pub covered: usize,
    pub ball_vertices: usize,
    /// The output region: vertices of the working ball whose extended
    /// combing paths stay in the region.
    pub region_vertices: usize,
    /// Cone transits replaced during the extension.
    pub transits: usize,
    /// Cosets left coned at the end (peripheral subgroups).
    pub peripheral: Vec<String>,
    pub complex: ComplexSummary,
    pub constants: StraightnessConstants,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub ball: BallGraph,
    pub complex: CellComplex,
    pub combing: Combing,
    pub report: PipelineReport,
}

fn measure(rho: &Combing, ball: &BallGraph, complex: &CellComplex, budget: u32) -> Result<StraightnessConstants> {
    let metric = DistanceMatrix::new(&ball.graph);
    let space = Space {
        graph: &ball.graph,
        metric: &metric,
        complex,
        dist: &ball.dist,
        radius: ball.radius,
        budget,
    };
    measure_straightness(rho, &space)
}

/// Measuring complex on an un-coned Cayley ball: Rips 2-skeleton plus the
/// relator polygons that fit in the ball.
pub fn ball_complex(ball: &BallGraph, d: u32) -> Result<CellComplex> {
    let metric = DistanceMatrix::new(&ball.graph);
    let mut cx = rips_two_skeleton(&ball.graph, &metric, d);
    if let Some(spec) = &ball.spec {
        cx.add_word_cells(ball, &presentation_relators(spec))?;
    }
    Ok(cx)
}

/// Removes every backtrack `x, y, x`; backtracks bound no area.
fn drop_backtracks(p: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(p.len());
    for v in p {
        if out.len() >= 2 && out[out.len() - 2] == v {
            out.pop();
        } else {
            out.push(v);
        }
    }
    out
}

fn loop_erase(p: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(p.len());
    for v in p {
        if let Some(i) = out.iter().position(|&x| x == v) {
            out.truncate(i);
        }
        out.push(v);
    }
    out
}

fn identity_pipeline(spec: &GroupSpec, opts: PipelineOptions) -> Result<PipelineOutput> {
    let ball = build_ball(spec, opts.radius, opts.cap)?;
    let complex = ball_complex(&ball, opts.d)?;
    let combing = geodesic_tree_combing(&ball.graph, ball.base);
    let constants = measure(&combing, &ball, &complex, opts.budget)?;
    let peripheral = if is_peripheral(spec) { vec![String::from("G")] } else { Vec::new() };
    let report = PipelineReport {
        radius: opts.radius,
        d: opts.d,
        identity: true,
        pieces: Vec::new(),
        glued_pieces: 1,
        glued_vertices: ball.vertex_count(),
        max_depth: 0,
        covered: ball.vertex_count(),
        ball_vertices: ball.vertex_count(),
        region_vertices: ball.vertex_count(),
        transits: 0,
        peripheral,
        complex: complex.summary(),
        constants,
    };
    Ok(PipelineOutput { ball, complex, combing, report })
}

/// Cone, glue, push forward and extend. Single-piece inputs (no edges, or
/// not a graph of groups) run the identity pipeline on the geodesic tree
/// combing.
pub fn devissage_pipeline(spec: &GroupSpec, opts: PipelineOptions) -> Result<PipelineOutput> {
    validate_pipeline(spec)?;
    let gog = match spec.as_graph_of_groups() {
        Some(g) if !g.edges().is_empty() => g,
        _ => return identity_pipeline(spec, opts),
    };

    // cone every vertex group along its edge groups
    let pieces = coned_pieces(spec, opts.radius + opts.piece_margin, opts.cap)?;
    let piece_combings = reduced_piece_combings(spec, &pieces)?;
    let mut piece_reports = Vec::new();
    for (v, piece) in pieces.iter().enumerate() {
        let metric = DistanceMatrix::new(piece.graph());
        let cx = rips_two_skeleton(piece.graph(), &metric, opts.d);
        let rho = piece_combings.get(v, piece.base()).ok_or(Error::AttachmentMissing(v))?;
        let constants = measure(rho, &piece.hat, &cx, opts.budget)?;
        piece_reports.push(PieceReport {
            vertex: v,
            class: gog.vertices()[v].class_name().into(),
            ball_vertices: (0..piece.vertex_count()).filter(|&x| !piece.is_cone(x)).count(),
            cones: piece.cones().len(),
            constants,
        });
    }

    // glue, keeping the part of the tree of spaces that maps into the
    // working ball
    let work = build_ball(spec, opts.radius + opts.margin, opts.cap)?;
    let keep = |w: &Word| work.index_of(w).is_some();
    let tree_opts =
        TreeOptions { depth: opts.radius + opts.margin + 1, branch_radius: u32::MAX, vertex_cap: opts.cap };
    let tos = tree_of_spaces_within(spec, &pieces, tree_opts, &piece_combings, &keep)?;
    let glued_rho = free_construction_combing(&tos, &piece_combings)?;

    // push forward to the coned working ball of the whole group
    let families: Vec<ConeFamily> = gog
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EdgeKind::Cyclic)
        .map(|(i, e)| ConeFamily { tag: format!("e{i}"), generator: gog.globalize(e.source, &e.source_word) })
        .collect();
    let coned = cone_off(&work, &families)?;
    let n_work = work.vertex_count();
    let mut image = vec![None; tos.glued.vertex_count()];
    for (g, slot) in image.iter_mut().enumerate() {
        if let Some(w) = &tos.image[g] {
            *slot = work.index_of(w);
        }
    }
    for g in 0..tos.glued.vertex_count() {
        if !tos.glued.graph.is_cone(g) {
            continue;
        }
        let edge = tos.glued.graph.adjacency(g).iter().find_map(|&(_, l)| match l {
            EdgeLabel::Cone(e) => Some(e),
            _ => None,
        });
        let member = tos.glued.graph.neighbors(g).find_map(|y| image[y]);
        if let (Some(e), Some(y)) = (edge, member) {
            let tag = format!("e{e}");
            let f = families.iter().position(|f| f.tag == tag).ok_or(Error::AttachmentMissing(g))?;
            image[g] = coned.cones_of(y).iter().copied().find(|&c| coned.cone_info(c).map(|i| i.family) == Some(f));
        }
    }
    let mut chosen: Vec<Option<usize>> = vec![None; n_work];
    for (g, img) in image.iter().enumerate() {
        if let Some(x) = *img {
            if x < n_work && chosen[x].is_none() {
                chosen[x] = Some(g);
            }
        }
    }
    let mut transits = 0;
    let mut extended: Vec<Option<Path>> = vec![None; n_work];
    for x in 0..n_work {
        let Some(g) = chosen[x] else { continue };
        let mapped: Option<Vec<usize>> = glued_rho.paths[g].vertices().iter().map(|&y| image[y]).collect();
        let mapped = mapped.ok_or(Error::AttachmentMissing(g))?;
        let hat = Path(loop_erase(mapped));
        hat.check_in(coned.graph())?;
        // extend over every cyclic cone; transits leaving the working ball
        // drop the vertex
        if let Ok(p) = extend_path(&hat, &coned) {
            transits += hat.vertices().iter().filter(|&&v| coned.is_cone(v)).count();
            extended[x] = Some(Path(drop_backtracks(p.0)));
        }
    }

    // largest vertex set closed under taking combing paths
    let mut inside: Vec<bool> = extended.iter().map(Option::is_some).collect();
    loop {
        let next: Vec<bool> = (0..n_work)
            .map(|x| inside[x] && extended[x].as_ref().is_some_and(|p| p.vertices().iter().all(|&y| inside[y])))
            .collect();
        if next == inside {
            break;
        }
        inside = next;
    }
    let target = (0..n_work).filter(|&x| work.dist[x] <= opts.radius).count();
    let covered = (0..n_work).filter(|&x| work.dist[x] <= opts.radius && inside[x]).count();
    if covered < target {
        let missing = (0..n_work).find(|&x| work.dist[x] <= opts.radius && !inside[x]).expect("uncovered");
        return Err(Error::AttachmentMissing(missing));
    }

    // the un-coned region: induced subgraph on the closed set
    let keep_ix: Vec<usize> = (0..n_work).filter(|&x| inside[x]).collect();
    let mut local = vec![usize::MAX; n_work];
    let mut graph = Graph::new();
    for &x in &keep_ix {
        local[x] = graph.add_vertex(work.graph.label(x).clone());
    }
    for (u, v) in work.graph.edges() {
        if inside[u] && inside[v] {
            graph.add_edge(local[u], local[v], work.graph.edge_label(u, v).expect("edge exists"));
        }
    }
    let mut ball = BallGraph::from_graph(graph, local[work.base])?;
    ball.spec = Some(spec.clone());
    let paths = keep_ix
        .iter()
        .map(|&x| Path(extended[x].as_ref().expect("inside").vertices().iter().map(|&y| local[y]).collect()))
        .collect();
    let combing = Combing { base: ball.base, paths };
    let complex = ball_complex(&ball, opts.d)?;
    let constants = measure(&combing, &ball, &complex, opts.budget)?;
    let report = PipelineReport {
        radius: opts.radius,
        d: opts.d,
        identity: false,
        pieces: piece_reports,
        glued_pieces: tos.pieces.len(),
        glued_vertices: tos.glued.vertex_count(),
        max_depth: tos.pieces.iter().map(|p| p.depth).max().unwrap_or(0),
        covered,
        ball_vertices: target,
        region_vertices: ball.vertex_count(),
        transits,
        peripheral: Vec::new(),
        complex: complex.summary(),
        constants,
    };
    Ok(PipelineOutput { ball, complex, combing, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::EdgeSpec;
    use crate::path::Lambda;
    use crate::word::Alphabet;

    fn amalgam(left: &str, right: &str) -> GroupSpec {
        let f = GroupSpec::free(Alphabet::standard(2));
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

    #[test]
    fn relators_of_an_amalgam() {
        let s = amalgam("a", "c");
        let r = presentation_relators(&s);
        assert_eq!(r.len(), 1);
        assert_eq!(s.alphabet().render(&r[0]), "a c^-1");
    }

    #[test]
    fn validation() {
        assert!(matches!(validate_pipeline(&amalgam("a^2", "c^3")), Err(Error::NotMaximalCyclic(0))));
        assert!(validate_pipeline(&amalgam("a^2", "c")).is_ok());
        let z2 = GroupSpec::free_abelian(Alphabet::standard(2));
        let z2b = GroupSpec::free_abelian(Alphabet::new(vec!["c".into(), "d".into()]).unwrap());
        let s = GroupSpec::graph_of_groups(
            vec![z2, z2b],
            vec![EdgeSpec {
                source: 0,
                target: 1,
                source_word: Word(vec![1]),
                target_word: Word(vec![1]),
                kind: EdgeKind::Cyclic,
            }],
            None,
        )
        .unwrap();
        assert!(matches!(validate_pipeline(&s), Err(Error::PeripheralEdge(0))));
    }

    #[test]
    fn abelian_piece_is_identity() {
        let out = devissage_pipeline(&GroupSpec::free_abelian(Alphabet::standard(2)), PipelineOptions {
            radius: 2,
            ..Default::default()
        })
        .unwrap();
        assert!(out.report.identity);
        assert_eq!(out.report.peripheral.len(), 1);
        assert_eq!(out.report.constants.lambda, Lambda::ONE);
    }

    #[test]
    fn amalgam_over_a_generator() {
        let s = amalgam("a", "c");
        let out = devissage_pipeline(&s, PipelineOptions { radius: 2, ..Default::default() }).unwrap();
        assert_eq!(out.report.covered, out.report.ball_vertices);
        out.combing.validate(&out.ball.graph).unwrap();
        assert!(out.report.constants.lambda.is_finite());
        assert_eq!(out.report.constants.exhausted, 0);
    }
}
