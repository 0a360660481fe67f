use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use phasetip::analyses::{run_analysis, RunError};
use phasetip::config::parse_config;
use phasetip::exec::init_workers;
use phasetip::output::OutputDir;

/// Detects and characterises rate-induced tipping between coexisting limit
/// cycles of planar birhythmic oscillators.
#[derive(Parser)]
#[command(name = "phasetip", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override a config value by dotted path, e.g. --set shift.r=13.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory (overrides run.out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for grid sweeps (default: PHASETIP_WORKERS or all
    /// cores). The outputs are identical for any worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Random seed recorded in the config (sampling-based diagnostics only;
    /// the analyses themselves are deterministic).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and export it as CSV.
    Simulate(CommonArgs),
    /// Find the coexisting cycles, their phases, and amplitude-equation roots.
    Cycles(CommonArgs),
    /// One-parameter branch scan with fold refinement.
    Scan1d(CommonArgs),
    /// Two-parameter region scan with Hopf/fold curves and their junction.
    Scan2d(CommonArgs),
    /// Basin-instability flags of a base cycle over a parameter grid.
    BasinRegion(CommonArgs),
    /// Basin-unstable arcs of a base cycle against a shifted separatrix.
    Arcs(CommonArgs),
    /// Track/tip outcomes over a (magnitude, rate) grid.
    TippingDiagram(CommonArgs),
    /// Tipping diagrams for a list of switch times.
    TcSweep(CommonArgs),
    /// Track/tip outcomes over (initial phase, rate) at fixed magnitude.
    PacePhase(CommonArgs),
    /// Impulse-input series demonstration at fixed rate.
    Series(CommonArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Simulate(a) => ("simulate", a),
            Command::Cycles(a) => ("cycles", a),
            Command::Scan1d(a) => ("scan1d", a),
            Command::Scan2d(a) => ("scan2d", a),
            Command::BasinRegion(a) => ("basin-region", a),
            Command::Arcs(a) => ("arcs", a),
            Command::TippingDiagram(a) => ("tipping-diagram", a),
            Command::TcSweep(a) => ("tc-sweep", a),
            Command::PacePhase(a) => ("pace-phase", a),
            Command::Series(a) => ("series", a),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (subcommand, args) = cli.command.parts();
    init_workers(args.workers);

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let mut cfg = match parse_config(&text, &args.sets) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.run.out_dir));
    let out = match OutputDir::create(&out_dir) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("config error: cannot create {}: {e}", out_dir.display());
            return ExitCode::from(1);
        }
    };
    match run_analysis(subcommand, &cfg, &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
