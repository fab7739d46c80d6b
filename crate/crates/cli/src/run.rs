//! Pipeline execution: one function per pipeline kind, each sweeping the
//! configured radii and producing a JSON result, flags and summary lines.

use anyhow::{bail, Result};
use serde_json::{json, Value};
use thincomb_core::cochain::{coboundary, cocycle_defects, edge_fillings, random_one_cochain, solve_with};
use thincomb_core::combing::{extend_combing, reduce_combing};
use thincomb_core::complex::{coned_complex, rips_two_skeleton, CellComplex};
use thincomb_core::cone::{cone_off, ConeFamily, ConedGraph};
use thincomb_core::graph::{build_ball, fineness_scan, geodesic_tree_combing, hyperbolicity_estimate, BallGraph, DistanceMatrix, Graph};
use thincomb_core::group::CosetId;
use thincomb_core::path::{Combing, Lambda, Path};
use thincomb_core::pipeline::{ball_complex, devissage_pipeline, presentation_relators, PipelineOptions};
use thincomb_core::tree::{
    attachment_separates, check_fixed_points, coned_pieces, free_construction_combing, glued_element, reduced_piece_combings,
    tree_of_spaces, TreeOptions,
};
use thincomb_core::verify::{
    bcp_estimate, extension_lambda, measure_straightness, reduction_lambda, stability_verdict, sweep_lemma_qg, FinenessSummary,
    Space, StabilityVerdict, StraightnessConstants, SweepKind, SweepReport, VerificationReport,
};
use thincomb_core::{Error, GroupSpec};

use crate::config::{JobConfig, PipelineKind};
use crate::dot::export_dot;
use crate::report::{combing_json, config_digest, graph_label, Artifacts, Report, SCHEMA_VERSION};

/// Above this many ball vertices, sweeps use paths from the base only
/// instead of all pairs.
const ALL_PAIRS_LIMIT: usize = 600;

struct Ctx<'a> {
    cfg: &'a JobConfig,
    spec: GroupSpec,
    families: Vec<ConeFamily>,
    flags: Vec<String>,
    summary: Vec<String>,
    dot: Option<String>,
    combing: Option<Value>,
}

impl Ctx<'_> {
    fn ball(&self, r: u32) -> Result<BallGraph> {
        Ok(build_ball(&self.spec, r, self.cfg.vertex_cap)?)
    }

    fn coned(&self, ball: &BallGraph) -> Result<ConedGraph> {
        Ok(cone_off(ball, &self.families)?)
    }

    fn is_last(&self, r: u32) -> bool {
        self.cfg.radii().last() == Some(&r)
    }

    /// Keeps the DOT text and combing of the largest radius.
    fn keep(&mut self, r: u32, graph: &Graph, rho: Option<&Combing>, label: &dyn Fn(usize) -> String) {
        if !self.is_last(r) {
            return;
        }
        if self.cfg.output.dot.is_some() {
            self.dot = Some(export_dot(graph, &format!("{} R={r}", self.cfg.pipeline.name()), label));
        }
        if let (Some(_), Some(rho)) = (&self.cfg.output.combing, rho) {
            self.combing = Some(combing_json(rho, label));
        }
    }

    fn note_constants(&mut self, what: &str, r: u32, c: &StraightnessConstants) {
        if c.exhausted > 0 {
            self.flags.push(format!("{what} R={r}: {} area searches exhausted", c.exhausted));
        }
        if c.unreliable {
            self.flags.push(format!("{what} R={r}: worst witness within 2 of the ball boundary"));
        }
        self.summary.push(format!("{what} R={r}: λ={} m_thin={} m_prefix={}", c.lambda, c.m_thin, c.m_prefix));
    }
}

fn measure(rho: &Combing, graph: &Graph, complex: &CellComplex, dist: &[u32], radius: u32, budget: u32) -> Result<StraightnessConstants> {
    let metric = DistanceMatrix::new(graph);
    let space = Space { graph, metric: &metric, complex, dist, radius, budget };
    Ok(measure_straightness(rho, &space)?)
}

fn constants_verdict(rows: &[StraightnessConstants]) -> StabilityVerdict {
    let key = |c: &StraightnessConstants| {
        (c.lambda.is_finite() && c.m_thin.is_exact() && c.m_prefix.is_exact())
            .then(|| (c.lambda.ratio(), c.m_thin.value(), c.m_prefix.value()))
    };
    stability_verdict(&rows.iter().map(key).collect::<Vec<_>>())
}

/// `P̂` over the coned graph: Rips complex of the base graph, relator cells,
/// cone triangles.
fn coned_measuring_complex(spec: &GroupSpec, ball: &BallGraph, coned: &ConedGraph, d: u32) -> Result<CellComplex> {
    let metric = DistanceMatrix::new(&coned.base_graph);
    let mut p = rips_two_skeleton(&coned.base_graph, &metric, d);
    p.add_word_cells(ball, &presentation_relators(spec))?;
    Ok(coned_complex(&p, coned)?)
}

fn ball_vertices(coned: &ConedGraph) -> usize {
    coned.vertex_count() - coned.cones().len()
}

fn pairs(n: usize, base: usize) -> Vec<(usize, usize)> {
    if n <= ALL_PAIRS_LIMIT {
        (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect()
    } else {
        (0..n).filter(|&y| y != base).map(|y| (base, y)).collect()
    }
}

/// Geodesics of `K` between ball vertices, for the reduction sweep.
fn base_geodesics(coned: &ConedGraph) -> Vec<Path> {
    let m = DistanceMatrix::new(&coned.base_graph);
    pairs(ball_vertices(coned), coned.base()).into_iter().map(|(x, y)| m.geodesic(&coned.base_graph, x, y)).collect()
}

/// Geodesics of `K̂` between ball vertices, for the extension sweep.
fn hat_geodesics(coned: &ConedGraph, hat: &DistanceMatrix) -> Vec<Path> {
    pairs(ball_vertices(coned), coned.base()).into_iter().map(|(x, y)| hat.geodesic(coned.graph(), x, y)).collect()
}

fn sweep_from(kind: SweepKind, radii: &[u32], values: &[Lambda]) -> Result<SweepReport> {
    let mut it = values.iter();
    Ok(sweep_lemma_qg(kind, radii, |_| Ok(*it.next().expect("one value per radius")))?)
}

fn fineness(ctx: &mut Ctx<'_>, coned: &ConedGraph, r: u32) -> Vec<(FinenessSummary, Option<u64>)> {
    let mut out = Vec::new();
    for (f, fam) in ctx.families.iter().enumerate() {
        let Some(v) = coned.cone_of(f, &CosetId(Vec::new())) else { continue };
        let count = match fineness_scan(coned.graph(), v, coned.base(), ctx.cfg.verify.fineness_len, ctx.cfg.verify.fineness_cap) {
            Ok(n) => Some(n),
            Err(Error::SizeLimitExceeded { cap }) => {
                ctx.flags.push(format!("fineness R={r} family {}: scan cap {cap} reached", fam.tag));
                None
            }
            Err(e) => {
                ctx.flags.push(format!("fineness R={r} family {}: {e}", fam.tag));
                None
            }
        };
        let summary = FinenessSummary {
            radius: r,
            edge: (format!("cone:{}:1", fam.tag), "1".into()),
            max_len: ctx.cfg.verify.fineness_len,
            count: count.unwrap_or(0),
        };
        out.push((summary, count));
    }
    out
}

/// Per-family verdicts over the radii; `true` when some family grows.
fn fineness_failure(ctx: &mut Ctx<'_>, rows: &[Vec<(FinenessSummary, Option<u64>)>]) -> (Vec<Value>, Option<bool>) {
    let mut verdicts = Vec::new();
    let mut failure = None;
    for (f, fam) in ctx.families.iter().enumerate() {
        let counts: Vec<Option<u64>> = rows.iter().map(|r| r.get(f).and_then(|x| x.1)).collect();
        let v = stability_verdict(&counts);
        match v {
            StabilityVerdict::Growing => failure = Some(true),
            StabilityVerdict::Stable => failure = Some(failure.unwrap_or(false)),
            StabilityVerdict::Inconclusive => {}
        }
        ctx.summary.push(format!("fineness family {}: counts {counts:?} -> {v:?}", fam.tag));
        verdicts.push(json!({ "family": fam.tag, "counts": counts, "verdict": v }));
    }
    if failure == Some(true) {
        ctx.flags.push("fineness failure: loop counts through a cone edge grow with the radius".into());
    }
    (verdicts, failure)
}

fn run_ball(ctx: &mut Ctx<'_>) -> Result<Value> {
    let mut rows = Vec::new();
    for r in ctx.cfg.radii() {
        let b = ctx.ball(r)?;
        let m = DistanceMatrix::new(&b.graph);
        let hyp = hyperbolicity_estimate(&b.graph, &m, ctx.cfg.verify.hyperbolicity_triangles, ctx.cfg.seed);
        if !hyp.exact {
            ctx.flags.push(format!("ball R={r}: hyperbolicity sampled over {} triangles", hyp.triangles));
        }
        let spheres: Vec<usize> = (0..=r).map(|k| b.sphere(k).count()).collect();
        ctx.summary.push(format!("ball R={r}: {} vertices, {} edges, δ≥{}", b.vertex_count(), b.graph.edge_count(), hyp.delta));
        rows.push(json!({
            "radius": r,
            "vertices": b.vertex_count(),
            "edges": b.graph.edge_count(),
            "spheres": spheres,
            "diameter": m.diameter(),
            "hyperbolicity": hyp,
        }));
        let spec = ctx.spec.clone();
        let label = graph_label(&b.graph, |w| spec.alphabet().render(w));
        ctx.keep(r, &b.graph, None, &label);
    }
    Ok(json!({ "balls": rows }))
}

fn run_cone(ctx: &mut Ctx<'_>) -> Result<Value> {
    let mut rows = Vec::new();
    let mut scans = Vec::new();
    for r in ctx.cfg.radii() {
        let b = ctx.ball(r)?;
        let c = ctx.coned(&b)?;
        let scan = fineness(ctx, &c, r);
        rows.push(json!({
            "radius": r,
            "vertices": c.vertex_count(),
            "cones": c.cones().len(),
            "edges": c.graph().edge_count(),
            "fineness": scan.iter().map(|x| &x.0).collect::<Vec<_>>(),
        }));
        ctx.summary.push(format!("cone R={r}: {} vertices, {} cone vertices", c.vertex_count(), c.cones().len()));
        scans.push(scan);
        let spec = ctx.spec.clone();
        let label = graph_label(c.graph(), |w| spec.alphabet().render(w));
        ctx.keep(r, c.graph(), None, &label);
    }
    let (verdicts, failure) = fineness_failure(ctx, &scans);
    Ok(json!({ "coned": rows, "fineness_verdicts": verdicts, "fineness_failure": failure }))
}

fn run_comb(ctx: &mut Ctx<'_>) -> Result<Value> {
    let mut rows = Vec::new();
    let mut consts = Vec::new();
    for r in ctx.cfg.radii() {
        let b = ctx.ball(r)?;
        let cx = ball_complex(&b, ctx.cfg.d)?;
        let rho = geodesic_tree_combing(&b.graph, b.base);
        let c = measure(&rho, &b.graph, &cx, &b.dist, r, ctx.cfg.budget)?;
        ctx.note_constants("comb", r, &c);
        rows.push(json!({ "radius": r, "complex": cx.summary(), "constants": c }));
        consts.push(c);
        let spec = ctx.spec.clone();
        let label = graph_label(&b.graph, |w| spec.alphabet().render(w));
        ctx.keep(r, &b.graph, Some(&rho), &label);
    }
    Ok(json!({ "rows": rows, "stability": constants_verdict(&consts) }))
}

fn run_reduce_extend(ctx: &mut Ctx<'_>, extend: bool) -> Result<Value> {
    let radii = ctx.cfg.radii();
    let mut rows = Vec::new();
    let mut consts = Vec::new();
    let mut lambdas = Vec::new();
    for &r in &radii {
        let b = ctx.ball(r)?;
        let c = ctx.coned(&b)?;
        let rho = geodesic_tree_combing(&b.graph, b.base);
        let rho_hat = reduce_combing(&rho, &c)?;
        let hat = DistanceMatrix::new(c.graph());
        let spec = ctx.spec.clone();
        if extend {
            let rho_check = extend_combing(&rho_hat, &c)?;
            let cx = ball_complex(&b, ctx.cfg.d)?;
            let k = measure(&rho_check, &b.graph, &cx, &b.dist, r, ctx.cfg.budget)?;
            let nu = extension_lambda(&hat_geodesics(&c, &hat), &c, &DistanceMatrix::new(&c.base_graph))?;
            ctx.note_constants("extended combing", r, &k);
            rows.push(json!({ "radius": r, "complex": cx.summary(), "constants": k, "nu": nu }));
            consts.push(k);
            lambdas.push(nu);
            let label = graph_label(&b.graph, |w| spec.alphabet().render(w));
            ctx.keep(r, &b.graph, Some(&rho_check), &label);
        } else {
            let p_hat = coned_measuring_complex(&ctx.spec, &b, &c, ctx.cfg.d)?;
            let k = measure(&rho_hat, c.graph(), &p_hat, &c.hat.dist, r, ctx.cfg.budget)?;
            let mu = reduction_lambda(&base_geodesics(&c), &c, &hat);
            ctx.note_constants("reduced combing", r, &k);
            rows.push(json!({ "radius": r, "complex": p_hat.summary(), "constants": k, "mu": mu }));
            consts.push(k);
            lambdas.push(mu);
            let label = graph_label(c.graph(), |w| spec.alphabet().render(w));
            ctx.keep(r, c.graph(), Some(&rho_hat), &label);
        }
    }
    let kind = if extend { SweepKind::Extension } else { SweepKind::Reduction };
    let sweep = sweep_from(kind, &radii, &lambdas)?;
    ctx.summary.push(format!("{kind:?} sweep: {:?} -> {:?}", lambdas.iter().map(Lambda::to_string).collect::<Vec<_>>(), sweep.verdict));
    Ok(json!({ "rows": rows, "stability": constants_verdict(&consts), "sweep": sweep }))
}

fn run_tree(ctx: &mut Ctx<'_>) -> Result<Value> {
    let t = &ctx.cfg.tree;
    let opts = TreeOptions { depth: t.depth, branch_radius: t.branch_radius, vertex_cap: t.vertex_cap };
    let mut rows = Vec::new();
    let mut consts = Vec::new();
    for r in ctx.cfg.radii() {
        let pieces = coned_pieces(&ctx.spec, r, ctx.cfg.vertex_cap)?;
        check_fixed_points(&ctx.spec, &pieces)?;
        let tos = tree_of_spaces(&ctx.spec, &pieces, opts)?;
        let pc = reduced_piece_combings(&ctx.spec, &pieces)?;
        let rho = free_construction_combing(&tos, &pc)?;
        let metric = DistanceMatrix::new(&tos.glued.graph);
        let cx = rips_two_skeleton(&tos.glued.graph, &metric, ctx.cfg.d);
        let c = measure(&rho, &tos.glued.graph, &cx, &tos.glued.dist, r, ctx.cfg.budget)?;
        let sep = attachment_separates(&tos);
        let bad: Vec<usize> = sep.iter().filter(|x| !x.1).map(|x| x.0).collect();
        if !bad.is_empty() {
            ctx.flags.push(format!("tree R={r}: attachment is not a cut vertex for pieces {bad:?}"));
        }
        ctx.note_constants("free construction", r, &c);
        let per_depth: Vec<usize> = (0..=tos.depth).map(|d| tos.pieces.iter().filter(|p| p.depth == d).count()).collect();
        rows.push(json!({
            "radius": r,
            "pieces": tos.pieces.len(),
            "pieces_per_depth": per_depth,
            "glued_vertices": tos.glued.vertex_count(),
            "attachments_checked": sep.len(),
            "attachments_separating": sep.len() - bad.len(),
            "complex": cx.summary(),
            "constants": c,
        }));
        consts.push(c);
        let spec = ctx.spec.clone();
        let g = &tos.glued.graph;
        let label = |v: usize| {
            let (piece, _) = tos.owner(v);
            match glued_element(&tos, v) {
                Some(e) => format!("p{piece}:{}", spec.alphabet().render(&e.word)),
                None => format!("p{piece}:cone:{}", g.label(v).tag.clone().unwrap_or_default()),
            }
        };
        ctx.keep(r, g, Some(&rho), &label);
    }
    Ok(json!({ "rows": rows, "stability": constants_verdict(&consts) }))
}

fn run_pipeline(ctx: &mut Ctx<'_>) -> Result<Value> {
    let mut rows = Vec::new();
    let mut consts = Vec::new();
    for r in ctx.cfg.radii() {
        let opts = PipelineOptions {
            radius: r,
            d: ctx.cfg.d,
            budget: ctx.cfg.budget,
            cap: ctx.cfg.vertex_cap,
            margin: ctx.cfg.tree.margin,
            piece_margin: ctx.cfg.tree.piece_margin,
        };
        let out = devissage_pipeline(&ctx.spec, opts)?;
        let rep = &out.report;
        ctx.note_constants("pipeline", r, &rep.constants);
        ctx.summary.push(format!(
            "pipeline R={r}: {} pieces glued, {}/{} covered, {} transits extended",
            rep.glued_pieces, rep.covered, rep.ball_vertices, rep.transits
        ));
        rows.push(serde_json::to_value(rep)?);
        consts.push(rep.constants.clone());
        let spec = ctx.spec.clone();
        let label = graph_label(&out.ball.graph, |w| spec.alphabet().render(w));
        ctx.keep(r, &out.ball.graph, Some(&out.combing), &label);
    }
    Ok(json!({ "rows": rows, "stability": constants_verdict(&consts) }))
}

fn run_metab(ctx: &mut Ctx<'_>) -> Result<Value> {
    let m = ctx.cfg.metab.clone();
    let mut rows = Vec::new();
    for r in ctx.cfg.radii() {
        let b = ctx.ball(r)?;
        let (cx, rho) = if ctx.families.is_empty() {
            (ball_complex(&b, ctx.cfg.d)?, geodesic_tree_combing(&b.graph, b.base))
        } else {
            let c = ctx.coned(&b)?;
            let rho = reduce_combing(&geodesic_tree_combing(&b.graph, b.base), &c)?;
            (coned_measuring_complex(&ctx.spec, &b, &c, ctx.cfg.d)?, rho)
        };
        let fills = edge_fillings(&rho, &cx, ctx.cfg.budget)?;
        let mut violations = 0;
        let mut norm_failures = 0;
        let mut defects = 0;
        let mut domain = cx.cell_count();
        let mut unsolved = 0;
        for i in 0..m.cochains {
            let u = random_one_cochain::<i64>(&cx, m.max_abs, ctx.cfg.seed.wrapping_add(i));
            let c = coboundary(&u, &cx)?;
            defects += cocycle_defects(&c, &cx);
            let sol = solve_with(&fills, &cx, &c);
            violations += sol.report.violations;
            norm_failures += usize::from(!sol.report.norm_bound_holds);
            domain = domain.min(sol.report.domain_cells);
            unsolved = sol.report.unsolved_edges.len();
        }
        if violations + norm_failures + defects > 0 {
            ctx.flags.push(format!(
                "metab R={r}: {violations} coboundary violations, {norm_failures} norm bound failures, {defects} cocycle defects"
            ));
        }
        if unsolved > 0 {
            ctx.flags.push(format!("metab R={r}: {unsolved} edges without a filling within budget"));
        }
        ctx.summary.push(format!(
            "metab R={r}: m_thin={}, {} cochains, domain {domain}/{} cells, {violations} violations",
            fills.m_thin,
            m.cochains,
            cx.cell_count()
        ));
        rows.push(json!({
            "radius": r,
            "complex": cx.summary(),
            "edges": fills.edges.len(),
            "unsolved_edges": unsolved,
            "m_thin": fills.m_thin,
            "cochains": m.cochains,
            "domain_cells": domain,
            "violations": violations,
            "norm_bound_failures": norm_failures,
            "cocycle_defects": defects,
        }));
    }
    Ok(json!({ "rows": rows }))
}

fn run_verify(ctx: &mut Ctx<'_>) -> Result<Value> {
    let radii = ctx.cfg.radii();
    let mut report = VerificationReport { radii: radii.clone(), ..Default::default() };
    let mut scans = Vec::new();
    let (mut mus, mut nus) = (Vec::new(), Vec::new());
    for &r in &radii {
        let b = ctx.ball(r)?;
        let c = ctx.coned(&b)?;
        let rho_hat = reduce_combing(&geodesic_tree_combing(&b.graph, b.base), &c)?;
        let p_hat = coned_measuring_complex(&ctx.spec, &b, &c, ctx.cfg.d)?;
        let k = measure(&rho_hat, c.graph(), &p_hat, &c.hat.dist, r, ctx.cfg.budget)?;
        ctx.note_constants("reduced combing", r, &k);
        if k.exhausted > 0 {
            report.exhausted_flags.push(format!("R={r}: {} area searches", k.exhausted));
        }
        report.constants.push(k);
        let hat = DistanceMatrix::new(c.graph());
        let base = DistanceMatrix::new(&c.base_graph);
        for &l in &ctx.cfg.verify.bcp_lambdas {
            let e = bcp_estimate(&c, &hat, &base, Lambda::from_integer(l), ctx.cfg.verify.bcp_threshold, ctx.cfg.verify.bcp_cap);
            if !e.exact {
                ctx.flags.push(format!("bcp R={r} λ={l}: enumeration truncated, r is a lower bound"));
            }
            ctx.summary.push(format!("bcp R={r} λ={l}: r={} ({})", e.r, if e.exact { "exact" } else { "lower bound" }));
            report.bcp.push(e);
        }
        let scan = fineness(ctx, &c, r);
        report.fineness.extend(scan.iter().map(|x| x.0.clone()));
        scans.push(scan);
        if !ctx.families.is_empty() {
            mus.push(reduction_lambda(&base_geodesics(&c), &c, &hat));
            nus.push(extension_lambda(&hat_geodesics(&c, &hat), &c, &base)?);
        }
        let spec = ctx.spec.clone();
        let label = graph_label(c.graph(), |w| spec.alphabet().render(w));
        ctx.keep(r, c.graph(), Some(&rho_hat), &label);
    }
    let (verdicts, failure) = fineness_failure(ctx, &scans);
    report.fineness_failure = failure;
    if !ctx.families.is_empty() {
        for (kind, vals) in [(SweepKind::Reduction, &mus), (SweepKind::Extension, &nus)] {
            let s = sweep_from(kind, &radii, vals)?;
            ctx.summary.push(format!("{kind:?} sweep: {:?} -> {:?}", vals.iter().map(Lambda::to_string).collect::<Vec<_>>(), s.verdict));
            report.sweeps.push(s);
        }
    }
    let stability = constants_verdict(&report.constants);
    Ok(json!({ "verification": report, "stability": stability, "fineness_verdicts": verdicts }))
}

/// Runs the configured pipeline.
pub fn execute(cfg: &JobConfig) -> Result<Artifacts> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let families = cfg.cone_families(&spec)?;
    let mut ctx = Ctx { cfg, spec, families, flags: Vec::new(), summary: Vec::new(), dot: None, combing: None };
    let result = match cfg.pipeline {
        PipelineKind::Ball => run_ball(&mut ctx)?,
        PipelineKind::Cone => run_cone(&mut ctx)?,
        PipelineKind::Comb => run_comb(&mut ctx)?,
        PipelineKind::Reduce => run_reduce_extend(&mut ctx, false)?,
        PipelineKind::Extend => run_reduce_extend(&mut ctx, true)?,
        PipelineKind::Tree => run_tree(&mut ctx)?,
        PipelineKind::Pipeline => run_pipeline(&mut ctx)?,
        PipelineKind::Metab => run_metab(&mut ctx)?,
        PipelineKind::Verify => run_verify(&mut ctx)?,
    };
    if result.is_null() {
        bail!("pipeline produced no result");
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        pipeline: cfg.pipeline.name().into(),
        config_sha256: config_digest(cfg),
        seed: cfg.seed,
        budget: cfg.budget,
        radii: cfg.radii(),
        flags: ctx.flags,
        result,
    };
    Ok(Artifacts { report, summary: ctx.summary, dot: ctx.dot, combing: ctx.combing })
}
