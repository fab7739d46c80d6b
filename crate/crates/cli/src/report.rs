//! Report envelope, artifact serialization and the on-disk cache.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thincomb_core::graph::Graph;
use thincomb_core::path::Combing;

use crate::config::JobConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "THINCOMB_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub pipeline: String,
    pub config_sha256: String,
    pub seed: u64,
    pub budget: u32,
    pub radii: Vec<u32>,
    /// Exhausted searches, truncated enumerations and failed checks.
    pub flags: Vec<String>,
    pub result: Value,
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub report: Report,
    pub summary: Vec<String>,
    pub dot: Option<String>,
    pub combing: Option<Value>,
}

/// SHA-256 of the effective configuration.
pub fn config_digest(cfg: &JobConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    let mut h = Sha256::new();
    h.update(SCHEMA_VERSION.to_le_bytes());
    h.update(canonical.as_bytes());
    hex::encode(h.finalize())
}

pub fn to_pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// `{ vertex label: [labels along ρ(vertex)] }`, in vertex order.
pub fn combing_json(rho: &Combing, label: impl Fn(usize) -> String) -> Value {
    let paths: Vec<Value> = rho
        .paths
        .iter()
        .enumerate()
        .map(|(v, p)| {
            serde_json::json!({
                "vertex": label(v),
                "path": p.vertices().iter().map(|&x| label(x)).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({ "base": label(rho.base), "paths": paths })
}

pub fn graph_label<'g>(graph: &'g Graph, render: impl Fn(&thincomb_core::Word) -> String + 'g) -> impl Fn(usize) -> String + 'g {
    move |v| {
        let l = graph.label(v);
        match (&l.tag, l.is_cone()) {
            (Some(tag), true) => format!("cone:{tag}:{}", render(&l.word)),
            _ => render(&l.word),
        }
    }
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()).map(|d| Self { dir: PathBuf::from(d) })
    }

    fn entry(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<Artifacts> {
        let text = std::fs::read_to_string(self.entry(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, key: &str, a: &Artifacts) -> Result<()> {
        std::fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let tmp = self.dir.join(format!("{key}.tmp"));
        std::fs::write(&tmp, serde_json::to_string(a)?)?;
        std::fs::rename(&tmp, self.entry(key))?;
        Ok(())
    }
}

/// Writes the report and optional artifacts under `out`; returns the paths.
pub fn write_artifacts(a: &Artifacts, cfg: &JobConfig, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut written = Vec::new();
    let report = out.join(&cfg.output.report);
    std::fs::write(&report, to_pretty(&a.report)).with_context(|| format!("writing {}", report.display()))?;
    written.push(report);
    if let (Some(name), Some(dot)) = (&cfg.output.dot, &a.dot) {
        let p = out.join(name);
        std::fs::write(&p, dot).with_context(|| format!("writing {}", p.display()))?;
        written.push(p);
    }
    if let (Some(name), Some(c)) = (&cfg.output.combing, &a.combing) {
        let p = out.join(name);
        std::fs::write(&p, to_pretty(c)).with_context(|| format!("writing {}", p.display()))?;
        written.push(p);
    }
    Ok(written)
}
