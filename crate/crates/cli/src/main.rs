//! `photon-tow` command-line front end.
//!
//! Exit status: 0 on success, 2 when a config or argument fails validation,
//! 1 on I/O failure.

mod manifest;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use photon_tow::engine::DEFAULT_SNAPSHOT_CYCLE;
use photon_tow::figures::{self, Figure, DEFAULT_REPLICATIONS};
use photon_tow::{run_experiment_with, sweep_resolutions, ExperimentConfig, Resolution};

use crate::manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "photon-tow",
    version,
    about = "Hierarchical single-photon bandit simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the config's master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write per-cycle traces of every trial.
        #[arg(long)]
        traces: bool,
    },
    /// Regenerate the built-in four-armed experiments.
    Reproduce {
        /// fig3, fig4 or fig5
        figure: Figure,
        #[arg(long)]
        out: PathBuf,
        /// Use the original trial counts (10 or 100) instead of 1000.
        #[arg(long)]
        paper_fidelity: bool,
    },
    /// Run a config once per resolution.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated odd resolutions, e.g. 5,7,9,11
        #[arg(long)]
        resolutions: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SNAPSHOT_CYCLE)]
        snapshot_cycle: usize,
    },
}

/// A config or argument that fails validation; exits with status 2.
#[derive(Debug)]
struct InvalidInput(String);

impl fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

fn invalid(msg: impl fmt::Display) -> anyhow::Error {
    InvalidInput(msg.to_string()).into()
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    config.validate().map_err(invalid)?;
    Ok(config)
}

fn parse_resolutions(list: &str) -> Result<Vec<u32>> {
    let values = list
        .split(',')
        .map(|s| {
            let s = s.trim();
            let n: u32 = s
                .parse()
                .map_err(|_| invalid(format!("resolution {s:?} is not an integer")))?;
            Resolution::new(n).map_err(invalid)?;
            Ok(n)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values)
}

fn create_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_run(config: &Path, out: &Path, seed: Option<u64>, traces: bool) -> Result<()> {
    let started = Instant::now();
    let mut config = load_config(config)?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    create_out(out)?;
    let result = run_experiment_with(&config, traces)?;
    output::write_curves(&out.join("curves.csv"), &result.curves)?;
    let mut outputs = vec!["curves.csv".to_string()];
    if let Some(traces) = &result.traces {
        output::write_traces(&out.join("traces.csv"), traces)?;
        outputs.push("traces.csv".into());
    }
    outputs.push("manifest.json".into());

    let last = result.curves.cycles();
    println!(
        "{} trials x {last} cycles: fine_cdr@{last} = {}",
        config.replications,
        output::sig6(result.curves.fine_cdr[last - 1])
    );
    let mut manifest = RunManifest::new("run", vec![config.clone()], config.master_seed);
    manifest.outputs = outputs;
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.write(&out.join("manifest.json"))
}

fn cmd_sweep(config: &Path, resolutions: &str, out: &Path, snapshot_cycle: usize) -> Result<()> {
    let started = Instant::now();
    let resolutions = parse_resolutions(resolutions)?;
    let base = load_config(config)?;
    if snapshot_cycle == 0 || snapshot_cycle > base.cycles {
        return Err(invalid(format!(
            "snapshot cycle must be in 1..={}, got {snapshot_cycle}",
            base.cycles
        )));
    }
    create_out(out)?;
    let points = sweep_resolutions(&base, &resolutions, snapshot_cycle)?;
    let mut outputs = Vec::new();
    for p in &points {
        let name = format!("curves_res{}.csv", p.resolution);
        output::write_curves(&out.join(&name), &p.curves)?;
        outputs.push(name);
        println!(
            "resolution {:>3}: fine_cdr@{snapshot_cycle} = {}",
            p.resolution,
            output::sig6(p.fine_at_snapshot)
        );
    }
    output::write_snapshot(&out.join("snapshot.csv"), &points)?;
    outputs.push("snapshot.csv".into());
    outputs.push("manifest.json".into());

    let configs = resolutions
        .iter()
        .map(|&r| base.clone().with_resolution(r))
        .collect();
    let mut manifest = RunManifest::new("sweep", configs, base.master_seed);
    manifest.snapshot_cycle = Some(snapshot_cycle);
    manifest.outputs = outputs;
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.write(&out.join("manifest.json"))
}

fn cmd_reproduce(figure: Figure, out: &Path, paper_fidelity: bool) -> Result<()> {
    let started = Instant::now();
    let replications = if paper_fidelity {
        figure.original_replications()
    } else {
        DEFAULT_REPLICATIONS
    };
    create_out(out)?;
    let report = figures::reproduce(figure, replications, 0)?;
    let prefix = figure.name();
    let mut outputs = Vec::new();
    let mut configs = Vec::new();

    for run in &report.runs {
        let name = format!("{prefix}_{}.csv", run.label);
        output::write_curves(&out.join(&name), &run.curves)?;
        outputs.push(name);
        configs.push(run.config.clone());
    }
    if !report.sweep.is_empty() {
        for p in &report.sweep {
            let name = format!("{prefix}_res{}.csv", p.resolution);
            output::write_curves(&out.join(&name), &p.curves)?;
            outputs.push(name);
        }
        let name = format!("{prefix}_snapshot.csv");
        output::write_snapshot(&out.join(&name), &report.sweep)?;
        outputs.push(name);
        let name = format!("{prefix}_final.csv");
        output::write_final_table(&out.join(&name), &report.sweep)?;
        outputs.push(name);
        let base = ExperimentConfig::new(
            photon_tow::problems::CASE3.to_vec(),
            report.sweep[0].curves.cycles(),
            replications,
        );
        configs.extend(
            report
                .sweep
                .iter()
                .map(|p| base.clone().with_resolution(p.resolution)),
        );
    }
    let name = format!("{prefix}_summary.csv");
    output::write_summary(&out.join(&name), prefix, &report.checks)?;
    outputs.push(name);
    outputs.push("manifest.json".into());

    println!("{prefix} ({replications} trials per curve)");
    for c in &report.checks {
        println!(
            "  [{}] {:<34} {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        );
    }

    let mut manifest = RunManifest::new(&format!("reproduce {prefix}"), configs, 0);
    if figure == Figure::Fig5 {
        manifest.snapshot_cycle = Some(DEFAULT_SNAPSHOT_CYCLE);
    }
    manifest.outputs = outputs;
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.write(&out.join("manifest.json"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            traces,
        } => cmd_run(&config, &out, seed, traces),
        Command::Reproduce {
            figure,
            out,
            paper_fidelity,
        } => cmd_reproduce(figure, &out, paper_fidelity),
        Command::Sweep {
            config,
            resolutions,
            out,
            snapshot_cycle,
        } => cmd_sweep(&config, &resolutions, &out, snapshot_cycle),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<InvalidInput>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
