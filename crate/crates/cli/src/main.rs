//! `famdyn`: run finite-horizon dynamics experiments from TOML configs.
//!
//! Exit codes: 0 holds or computed, 1 fails at horizon, 2 inconclusive,
//! 3 usage or configuration error.

mod config;
mod ops;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use famdyn::constructions::fixtures;
use famdyn::report::Verdict;
use famdyn::System;
use serde_json::{json, Value};

use config::ExperimentConfig;
use ops::{find, operations, Ctx};

const USAGE_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "famdyn",
    version,
    about = "Finite-horizon topological dynamics experiments",
    after_help = "Fixtures (see `famdyn fixtures`): full-2-shift, full-3-shift, golden-mean-shift, \
two-fixed-points, golden-rotation, skew-product, lambda-squares, newprop-10, newprop-2, \
wedge-fullshift, proximal-contraction, product-fullshift."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the fixture registry.
    Fixtures,
    /// List the operations a config can name.
    Operations,
    /// Print a two-column CSV of one series from a report.
    Plot {
        report: PathBuf,
        series: String,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(verdict: Option<Verdict>) -> u8 {
    match verdict {
        None | Some(Verdict::HoldsAtHorizon) => 0,
        Some(Verdict::FailsAtHorizon) => 1,
        Some(Verdict::Inconclusive) => 2,
    }
}

fn run(config_path: &Path, out: Option<&Path>) -> Result<u8> {
    let start = Instant::now();
    let config = ExperimentConfig::load(config_path)?;
    let op = find(&config.operation)?;
    let resolved = config.resolve()?;
    let sys = System::with_limits(&resolved.spec, config.limits.clone())?;
    let ctx = Ctx {
        sys,
        point: resolved.point,
        params: &config.params,
    };
    let outcome = op.run(&ctx).with_context(|| format!("operation `{}`", op.name()))?;

    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| config.output_dir(config_path));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, text) in &outcome.files {
        std::fs::write(dir.join(name), text).with_context(|| format!("writing {name}"))?;
    }
    let report = json!({
        "config": serde_json::to_value(&config)?,
        "system": serde_json::to_value(&resolved.spec)?,
        "operation": op.name(),
        "verdict": outcome.verdict,
        "result": outcome.result,
        "series": serde_json::to_value(&outcome.series)?,
        "side_files": outcome.files.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "wall_clock_ms": start.elapsed().as_millis() as u64,
    });
    let path = dir.join("report.json");
    std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    let verdict = outcome.verdict.map(Verdict::as_str).unwrap_or("computed");
    println!("{}: {verdict} ({})", op.name(), path.display());
    Ok(exit_code(outcome.verdict))
}

fn list_fixtures() {
    let all = fixtures();
    let width = all.iter().map(|f| f.name.len()).max().unwrap_or(0);
    for f in all {
        println!("{:width$}  {}", f.name, f.description);
    }
}

fn list_operations() {
    let width = operations().map(|op| op.name().len()).max().unwrap_or(0);
    for op in operations() {
        println!("{:width$}  {}", op.name(), op.summary());
    }
}

fn plot(report: &Path, series: &str, out: Option<&Path>) -> Result<u8> {
    let text = std::fs::read_to_string(report).with_context(|| format!("reading {}", report.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", report.display()))?;
    let csv = plot::series_csv(&value, series)?;
    match out {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run { config, out } => run(config, out.as_deref()),
        Command::Fixtures => {
            list_fixtures();
            Ok(0)
        }
        Command::Operations => {
            list_operations();
            Ok(0)
        }
        Command::Plot { report, series, out } => plot(report, series, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
