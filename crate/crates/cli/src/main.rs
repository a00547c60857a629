//! `hgibbs` — experiment runner for the hogwild-gibbs toolkit.
//!
//! Simulated experiments are deterministic given their config (seed
//! included); hardware delay probes depend on machine scheduling and are
//! gated behind an explicit `--threads` flag. Exit code is 0 iff every
//! pass/fail flag of the run passed.

mod config;
mod experiments;
mod output;
mod report;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{ExperimentConfig, ExperimentKind};
use experiments::{run_experiment, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hgibbs", version, about = "Gibbs sampling experiments on Ising models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct CommonArgs {
    /// Experiment config file (key = value sections); defaults mirror the
    /// standard protocol when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Divide run counts by this factor for quick runs.
    #[arg(long)]
    scale: Option<u64>,
    /// Print the fully resolved config (for sharing/diffing) and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Model description utilities.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Draw independent-restart samples and write them as CSV.
    Sample {
        #[command(flatten)]
        common: CommonArgs,
        /// Also export the first run's trajectory (step,site,new_value).
        #[arg(long)]
        trace: bool,
    },
    /// Thinned long-run total variation against the exact distribution.
    Stationarity {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Greedy-coupled sequential/asynchronous runs with Hamming moments.
    Couple {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sequential-vs-asynchronous bias of a polynomial statistic.
    Bias {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Asynchronous variance envelope across model sizes.
    Variance {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Hardware delay probe (lock-free engine; nondeterministic).
    DelayProbe {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker thread count; required to run on real hardware.
        #[arg(long)]
        threads: Option<usize>,
        /// Sweep the config's thread list instead of a fixed count.
        #[arg(long)]
        sweep_threads: bool,
        /// Dump the raw read log (write_index,node,delay) of the first
        /// probe point; large for big write counts.
        #[arg(long)]
        log_reads: bool,
    },
}

#[derive(Subcommand)]
enum ModelAction {
    /// Print node count, edge count, and the Dobrushin coefficient.
    Inspect {
        /// Model description file.
        #[arg(long)]
        config: PathBuf,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
}

fn load_config_any(
    allowed: &[ExperimentKind],
    preferred: ExperimentKind,
    common: &CommonArgs,
) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if !allowed.contains(&cfg.kind) {
                bail!(
                    "config {} declares kind `{}` but the `{}` subcommand was invoked",
                    path.display(),
                    cfg.kind.name(),
                    preferred.name()
                );
            }
            cfg
        }
        None => ExperimentConfig::default_for(preferred),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(scale) = common.scale {
        if scale == 0 {
            bail!("--scale must be at least 1");
        }
        cfg.scale = scale;
    }
    Ok(cfg)
}

fn load_config(kind: ExperimentKind, common: &CommonArgs) -> Result<ExperimentConfig> {
    load_config_any(&[kind], kind, common)
}

fn execute_with(cfg: &ExperimentConfig, common: &CommonArgs, opts: &RunOptions) -> Result<bool> {
    if common.print_config {
        print!("{}", cfg.serialize());
        return Ok(true);
    }
    execute(cfg, opts)
}

fn execute(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<bool> {
    let report = run_experiment(cfg, opts)?;
    let written = output::emit_plotdata(&report, &cfg.out)?;
    println!(
        "{}: {} in {:.1} s{}",
        report.kind,
        if report.passing() { "PASS" } else { "FAIL" },
        report.wall_ms as f64 / 1000.0,
        if report.deterministic {
            ""
        } else {
            " (hardware run, nondeterministic)"
        }
    );
    for flag in &report.flags {
        println!(
            "  [{}] {}: {} {} {}  ({})",
            if flag.pass { "ok" } else { "FAIL" },
            flag.name,
            flag.value,
            flag.relation,
            flag.threshold,
            flag.formula
        );
    }
    for path in written {
        println!("  wrote {}", path.display());
    }
    Ok(report.passing())
}

fn inspect_model(path: &std::path::Path, json: bool) -> Result<bool> {
    let model = hogwild_gibbs::model::load_model(path)
        .with_context(|| format!("cannot load model {}", path.display()))?;
    let alpha = model.dobrushin_alpha()?;
    if json {
        let value = serde_json::json!({
            "n": model.n(),
            "edges": model.graph().edge_count(),
            "zero_field": model.is_zero_field(),
            "dobrushin_alpha": alpha,
            "dobrushin_satisfied": alpha < 1.0,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("nodes:              {}", model.n());
        println!("edges:              {}", model.graph().edge_count());
        println!("zero field:         {}", model.is_zero_field());
        println!("dobrushin alpha:    {alpha:.6}");
        println!("dobrushin alpha<1:  {}", alpha < 1.0);
    }
    Ok(true)
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Model { action } => match action {
            ModelAction::Inspect { config, json } => inspect_model(&config, json),
        },
        Command::Sample { common, trace } => {
            let cfg = load_config(ExperimentKind::Sample, &common)?;
            execute_with(&cfg, &common, &RunOptions { trace, ..Default::default() })
        }
        Command::Stationarity { common } => {
            let cfg = load_config(ExperimentKind::Stationarity, &common)?;
            execute_with(&cfg, &common, &RunOptions::default())
        }
        Command::Couple { common } => {
            let cfg = load_config(ExperimentKind::CoupledHamming, &common)?;
            execute_with(&cfg, &common, &RunOptions::default())
        }
        Command::Bias { common } => {
            let cfg = load_config(ExperimentKind::Bias, &common)?;
            execute_with(&cfg, &common, &RunOptions::default())
        }
        Command::Variance { common } => {
            let cfg = load_config(ExperimentKind::Variance, &common)?;
            execute_with(&cfg, &common, &RunOptions::default())
        }
        Command::DelayProbe {
            common,
            threads,
            sweep_threads,
            log_reads,
        } => {
            let kind = if sweep_threads {
                ExperimentKind::TauVsThreads
            } else {
                ExperimentKind::DelayProbe
            };
            // A config written for either probe kind is accepted here.
            let mut cfg = load_config_any(
                &[ExperimentKind::DelayProbe, ExperimentKind::TauVsThreads],
                kind,
                &common,
            )?;
            cfg.kind = kind;
            execute_with(
                &cfg,
                &common,
                &RunOptions {
                    threads,
                    log_reads,
                    ..Default::default()
                },
            )
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
