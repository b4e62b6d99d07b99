//! `gsampler` command-line harness.

mod commands;
mod config;
mod error;
mod output;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{arms, cmd_bench, cmd_generate, cmd_locality, cmd_shuffle, cmd_stats, cmd_sweep, cmd_train};
use config::{parse_list, ExperimentConfig, RawConfig};
use error::{usage, CliError, CliResult};
use output::OutDir;

#[derive(Parser, Debug)]
#[command(name = "gsampler", version, about = "Locality-aware GNN sampling experiments")]
struct Cli {
    /// Flat key=value config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Global seed; every random stream is derived from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Override a config key, e.g. --set sampler.budget=64. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Node/edge counts, average and 90th-percentile degree, neighbor reuse.
    Stats,
    /// Writes a planted-partition graph with features and splits.
    Generate,
    /// Relabels the graph (and dataset) by a seeded random permutation.
    Shuffle,
    /// Builds and caches locality weights.
    Locality {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        s: Option<f64>,
    },
    /// Samples every batch once and simulates the cache.
    Bench {
        #[arg(long)]
        vanilla: bool,
        #[arg(long)]
        locality: bool,
    },
    /// Trains the GCN.
    Train {
        #[arg(long)]
        vanilla: bool,
        #[arg(long)]
        locality: bool,
    },
    /// Trains the locality arm over an (n, s) grid.
    Sweep {
        /// Comma-separated degree filters.
        #[arg(long)]
        n_list: Option<String>,
        /// Comma-separated similarity thresholds.
        #[arg(long)]
        s_list: Option<String>,
    },
}

fn build_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut raw = match &cli.config {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::default(),
    };
    for s in &cli.set {
        raw.set(s)?;
    }
    if let Some(seed) = cli.seed {
        raw.set(&format!("seed={seed}"))?;
    }
    if let Some(out) = &cli.out {
        raw.set(&format!("out={}", out.display()))?;
    }
    if let Some(jobs) = cli.jobs {
        raw.set(&format!("jobs={jobs}"))?;
    }
    if let Command::Locality { n, s } = &cli.command {
        if let Some(n) = n {
            raw.set(&format!("locality.n={n}"))?;
        }
        if let Some(s) = s {
            raw.set(&format!("locality.s={s}"))?;
        }
    }
    raw.build()
}

fn list<T>(flag: &str, text: &Option<String>, default: &[T]) -> CliResult<Vec<T>>
where
    T: std::str::FromStr + Clone,
    T::Err: std::fmt::Display,
{
    match text {
        Some(t) => parse_list(t).map_err(|e| usage(format!("{flag}: {e}"))),
        None => Ok(default.to_vec()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = build_config(&cli)?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| usage(format!("--jobs: {e}")))?;
    }
    let out = OutDir::create(&cfg.out)?;
    let printed = match &cli.command {
        Command::Stats => {
            print!("{}", cmd_stats(&cfg, &out)?);
            return Ok(());
        }
        Command::Generate => cmd_generate(&cfg, &out)?,
        Command::Shuffle => cmd_shuffle(&cfg, &out)?,
        Command::Locality { .. } => cmd_locality(&cfg, &out)?,
        Command::Bench { vanilla, locality } => cmd_bench(&cfg, &out, &arms(*vanilla, *locality))?,
        Command::Train { vanilla, locality } => cmd_train(&cfg, &out, &arms(*vanilla, *locality))?,
        Command::Sweep { n_list, s_list } => {
            let ns = list("--n-list", n_list, &cfg.sweep_n)?;
            let ss = list("--s-list", s_list, &cfg.sweep_s)?;
            cmd_sweep(&cfg, &out, &ns, &ss)?
        }
    };
    println!("{}", serde_json::to_string_pretty(&printed).expect("json values serialize"));
    Ok(())
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            return fail(&usage(msg.trim_end()));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
