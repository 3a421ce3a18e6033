mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::{ConfigError, RunConfig};
use output::{Manifest, OutputDir};

/// Run one XXZ probe-qubit computation described by a TOML config.
#[derive(Debug, Parser)]
#[command(name = "xxz", version, about)]
struct Cli {
    /// Run config, or the manifest.toml of an earlier run.
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory; overrides the config's output_dir.
    #[arg(long, short, env = "XXZ_OUTPUT_DIR")]
    output: Option<PathBuf>,
    /// Worker threads (0 = all cores); overrides the config.
    #[arg(long)]
    workers: Option<usize>,
    /// Seed for randomized checks, recorded in the manifest.
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::load(&cli.config)?;
    if let Some(dir) = &cli.output {
        cfg.output_dir = dir.clone();
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cfg: &RunConfig, seed: Option<u64>) -> anyhow::Result<OutputDir> {
    let start = Instant::now();
    let mut out = OutputDir::create(&cfg.output_dir)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    pool.install(|| commands::run(cfg, &mut out))?;
    let manifest = Manifest::new(cfg.clone(), start.elapsed().as_secs_f64(), seed, out.files().to_vec());
    let path = out.root().join("manifest.toml");
    std::fs::write(&path, manifest.to_toml())?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cfg, cli.seed) {
        Ok(out) => {
            for f in out.files() {
                println!("{}", out.root().join(f).display());
            }
            println!("{}", out.root().join("manifest.toml").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {} failed: {e:#}", cfg.command.name());
            ExitCode::FAILURE
        }
    }
}
