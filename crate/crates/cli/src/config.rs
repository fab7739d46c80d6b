//! Job configuration files (TOML).
//!
//! ```toml
//! pipeline = "verify"        # ball | cone | comb | reduce | extend | tree | pipeline | metab | verify
//! radii = [3, 4, 5]          # or: radius = 3
//! d = 1                      # Rips parameter
//! seed = 7
//! budget = 24                # area search budget
//!
//! [group]
//! kind = "free"              # free | free_abelian | small_cancellation | graph_of_groups
//! generators = ["a", "b"]
//! relators = []              # small_cancellation only, e.g. ["a b a^-1 b^-1 c d c^-1 d^-1"]
//!
//! # graph_of_groups only:
//! # [[group.vertices]]
//! # kind = "free"
//! # generators = ["a", "b"]
//! # [[group.edges]]
//! # source = 0
//! # target = 1
//! # source_word = "a"
//! # target_word = "c"
//! # kind = "cyclic"          # cyclic | trivial
//!
//! [[cones]]
//! tag = "H"
//! generator = "a"
//!
//! [verify]                   # optional sections: verify, tree, metab, output
//! bcp_lambdas = [2]
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use thincomb_core::cone::ConeFamily;
use thincomb_core::group::{EdgeKind, EdgeSpec};
use thincomb_core::{Alphabet, GroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    Ball,
    Cone,
    Comb,
    Reduce,
    Extend,
    Tree,
    Pipeline,
    Metab,
    Verify,
}

impl PipelineKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ball => "ball",
            Self::Cone => "cone",
            Self::Comb => "comb",
            Self::Reduce => "reduce",
            Self::Extend => "extend",
            Self::Tree => "tree",
            Self::Pipeline => "pipeline",
            Self::Metab => "metab",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Free,
    FreeAbelian,
    SmallCancellation,
    GraphOfGroups,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKindConfig {
    Cyclic,
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub kind: GroupKind,
    #[serde(default)]
    pub generators: Vec<String>,
    #[serde(default)]
    pub relators: Vec<String>,
    #[serde(default)]
    pub vertices: Vec<GroupConfig>,
    #[serde(default)]
    pub edges: Vec<EdgeConfig>,
    #[serde(default)]
    pub stable_names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeConfig {
    pub source: usize,
    pub target: usize,
    #[serde(default)]
    pub source_word: String,
    #[serde(default)]
    pub target_word: String,
    pub kind: EdgeKindConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeConfig {
    pub tag: String,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Integer quasi-geodesy constants for the BCP estimate.
    pub bcp_lambdas: Vec<u64>,
    /// Path-length threshold; default `2·λ·diam`.
    pub bcp_threshold: Option<usize>,
    pub bcp_cap: u64,
    pub fineness_len: usize,
    pub fineness_cap: usize,
    pub hyperbolicity_triangles: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            bcp_lambdas: vec![2],
            bcp_threshold: None,
            bcp_cap: 5_000_000,
            fineness_len: 6,
            fineness_cap: 50_000_000,
            hyperbolicity_triangles: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeConfig {
    pub depth: u32,
    pub branch_radius: u32,
    pub vertex_cap: usize,
    /// Extra radius of the pieces over the working ball (pipeline).
    pub piece_margin: u32,
    pub margin: u32,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { depth: 2, branch_radius: 2, vertex_cap: 20_000, piece_margin: 2, margin: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetabConfig {
    pub cochains: u64,
    pub max_abs: i64,
}

impl Default for MetabConfig {
    fn default() -> Self {
        Self { cochains: 50, max_abs: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub report: String,
    pub dot: Option<String>,
    pub combing: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { report: "report.json".into(), dot: None, combing: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub pipeline: PipelineKind,
    pub group: GroupConfig,
    #[serde(default)]
    pub cones: Vec<ConeConfig>,
    #[serde(default)]
    pub radius: Option<u32>,
    #[serde(default)]
    pub radii: Vec<u32>,
    #[serde(default = "default_d")]
    pub d: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u32,
    #[serde(default = "default_cap")]
    pub vertex_cap: usize,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub tree: TreeConfig,
    #[serde(default)]
    pub metab: MetabConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_d() -> u32 {
    1
}

fn default_budget() -> u32 {
    24
}

fn default_cap() -> usize {
    200_000
}

fn group_spec(g: &GroupConfig) -> Result<GroupSpec> {
    let alphabet = || Alphabet::new(g.generators.clone()).context("generators");
    Ok(match g.kind {
        GroupKind::Free => GroupSpec::free(alphabet()?),
        GroupKind::FreeAbelian => GroupSpec::free_abelian(alphabet()?),
        GroupKind::SmallCancellation => {
            let a = alphabet()?;
            let rels = g.relators.iter().map(|r| a.parse(r)).collect::<Result<Vec<_>, _>>()?;
            GroupSpec::small_cancellation(a, rels)?
        }
        GroupKind::GraphOfGroups => {
            let vertices = g.vertices.iter().map(group_spec).collect::<Result<Vec<_>>>()?;
            let mut edges = Vec::new();
            for (i, e) in g.edges.iter().enumerate() {
                let (Some(s), Some(t)) = (vertices.get(e.source), vertices.get(e.target)) else {
                    bail!("edge {i} has an endpoint out of range");
                };
                let parse = |spec: &GroupSpec, w: &str| -> Result<_> {
                    Ok(if w.is_empty() { Default::default() } else { spec.alphabet().parse(w)? })
                };
                let kind = match e.kind {
                    EdgeKindConfig::Cyclic => EdgeKind::Cyclic,
                    EdgeKindConfig::Trivial => EdgeKind::Trivial,
                };
                edges.push(EdgeSpec {
                    source: e.source,
                    target: e.target,
                    source_word: parse(s, &e.source_word)?,
                    target_word: parse(t, &e.target_word)?,
                    kind,
                });
            }
            GroupSpec::graph_of_groups(vertices, edges, g.stable_names.clone())?
        }
    })
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: JobConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Swept radii in increasing order.
    pub fn radii(&self) -> Vec<u32> {
        let mut r: Vec<u32> = self.radii.iter().copied().chain(self.radius).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn spec(&self) -> Result<GroupSpec> {
        group_spec(&self.group)
    }

    pub fn cone_families(&self, spec: &GroupSpec) -> Result<Vec<ConeFamily>> {
        self.cones
            .iter()
            .map(|c| Ok(ConeFamily { tag: c.tag.clone(), generator: spec.element(&c.generator)?.word }))
            .collect()
    }

    /// Checks everything that can be checked before computing.
    pub fn validate(&self) -> Result<()> {
        if self.radii().is_empty() {
            bail!("set `radius` or `radii`");
        }
        if self.d == 0 {
            bail!("`d` must be at least 1");
        }
        let nested = self.group.kind != GroupKind::GraphOfGroups && (!self.group.vertices.is_empty() || !self.group.edges.is_empty());
        if nested {
            bail!("`vertices` and `edges` are only allowed for graph_of_groups");
        }
        let spec = self.spec()?;
        self.cone_families(&spec)?;
        let needs_cones = matches!(self.pipeline, PipelineKind::Cone | PipelineKind::Reduce | PipelineKind::Extend);
        if needs_cones && self.cones.is_empty() {
            bail!("pipeline `{}` needs at least one [[cones]] entry", self.pipeline.name());
        }
        if self.pipeline == PipelineKind::Tree && self.group.kind != GroupKind::GraphOfGroups {
            bail!("pipeline `tree` needs a graph_of_groups");
        }
        if self.pipeline == PipelineKind::Pipeline {
            thincomb_core::pipeline::validate_pipeline(&spec)?;
        }
        if self.verify.bcp_lambdas.contains(&0) {
            bail!("BCP constants must be positive");
        }
        Ok(())
    }
}
