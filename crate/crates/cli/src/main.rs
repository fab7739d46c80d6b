use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use thincomb::config::JobConfig;
use thincomb::report::{config_digest, write_artifacts, Cache};

/// Run one job config: build balls, cone, comb, reduce, extend, glue or
/// verify, and write a JSON report.
#[derive(Debug, Parser)]
#[command(name = "thincomb", version)]
struct Args {
    /// Job config (TOML).
    config: PathBuf,
    /// Directory for the report and other artifacts.
    #[arg(long, short, default_value = ".")]
    output: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the area search budget.
    #[arg(long)]
    budget: Option<u32>,
}

enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
}

fn run(args: &Args) -> Result<(), Failure> {
    let mut cfg = JobConfig::load(&args.config).map_err(Failure::Config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")
            .map_err(Failure::Run)?;
    }
    let cache = Cache::from_env();
    let key = config_digest(&cfg);
    let artifacts = match cache.as_ref().and_then(|c| c.load(&key)) {
        Some(a) => {
            println!("cached report {key}");
            a
        }
        None => {
            let a = thincomb::execute(&cfg).map_err(Failure::Run)?;
            if let Some(c) = &cache {
                c.store(&key, &a).map_err(Failure::Run)?;
            }
            a
        }
    };
    for line in &artifacts.summary {
        println!("{line}");
    }
    for f in &artifacts.report.flags {
        println!("flag: {f}");
    }
    for p in write_artifacts(&artifacts, &cfg, &args.output).map_err(Failure::Run)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
