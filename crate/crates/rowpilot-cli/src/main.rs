//! `rowpilot` command line: run simulated episode batches, replay recorded
//! depth frames, sweep calibration thresholds, dump the control curves, and
//! harvest auto-labeled training samples.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use rowpilot::io::{parse_config, Config};

#[derive(Parser)]
#[command(name = "rowpilot", version, about = "Depth-map corridor following toolkit")]
struct Cli {
    /// Config file; falls back to $ROWPILOT_CONFIG, then to built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Base seed; per-episode seeds derive as seed + episode index.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of episodes, overriding `episode.count` from the config.
    #[arg(long, global = true)]
    episodes: Option<u32>,

    /// Suppress progress output on stdout.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of closed-loop episodes and write logs plus a summary.
    RunSim {
        /// Also write every depth frame the controller saw, as 16-bit PGM.
        #[arg(long)]
        dump_frames: bool,
    },
    /// Replay a directory of recorded .pgm depth frames through the
    /// pipeline and arbiter, in lexicographic filename order.
    ProcessFrames { dir: PathBuf },
    /// Sweep the distance and area thresholds over episode batches.
    Calibrate {
        /// Comma-separated distance thresholds; default is the configured one.
        #[arg(long)]
        t_distances: Option<String>,
        /// Comma-separated area thresholds; default is the configured one.
        #[arg(long)]
        t_areas: Option<String>,
    },
    /// Sample the proportional control curves over the full offset range.
    Curves {
        /// Number of samples; odd values place one exactly at d = 0.
        #[arg(long, default_value_t = 65)]
        samples: usize,
    },
    /// Run episodes with the auto-labeling harvester and persist samples.
    Harvest,
}

fn load_config(cli: &Cli) -> Result<Config> {
    let path = cli.config.clone().or_else(|| {
        std::env::var_os("ROWPILOT_CONFIG").map(PathBuf::from)
    });
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg = parse_config(&text).with_context(|| format!("config {}", path.display()))?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    let mut config = load_config(cli)?;
    if let Some(n) = cli.episodes {
        config.episode_count = n;
    }
    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("cannot create output dir {}", cli.out.display()))?;

    let ctx = commands::Context {
        config,
        out: cli.out.clone(),
        seed: cli.seed,
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::RunSim { dump_frames } => commands::run_sim(&ctx, *dump_frames),
        Command::ProcessFrames { dir } => commands::process_frames(&ctx, dir),
        Command::Calibrate {
            t_distances,
            t_areas,
        } => commands::calibrate(&ctx, t_distances.as_deref(), t_areas.as_deref()),
        Command::Curves { samples } => commands::curves(&ctx, *samples),
        Command::Harvest => commands::harvest(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
