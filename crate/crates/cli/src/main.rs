use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use symreach::{Engine, PolyOptions, Polyhedron, SplitMode};
use symreach_cli::{cmd_bound_nn, cmd_partition, cmd_verify, load_network, parse_box, LoadedConfig, Outcome};

/// Reach-avoid verification of neural-network controlled systems.
///
/// Exit status: 0 verified, 1 violated, 2 inconclusive, 3 error.
#[derive(Parser)]
#[command(name = "symreach", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Backward,
    Forward,
    Accuracy,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Affine,
    Poly,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-loop reachability over the configured horizon.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json and trace.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Reachability with adaptive splitting of the initial set.
    Partition {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        max_splits: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Output bounds of a network over an input box.
    BoundNn {
        #[arg(long)]
        network: PathBuf,
        /// Input box as `lo:hi,lo:hi,...`.
        #[arg(long, allow_hyphen_values = true)]
        input_box: String,
        /// Optional output box the bound must lie in.
        #[arg(long, allow_hyphen_values = true)]
        goal_box: Option<String>,
        #[arg(long, value_enum, default_value = "affine")]
        engine: EngineArg,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> symreach_cli::Result<(Outcome, PathBuf)> {
    match cli.command {
        Command::Verify { config, out } => Ok((cmd_verify(&LoadedConfig::load(&config)?)?, out)),
        Command::Partition {
            config,
            mode,
            max_splits,
            out,
        } => {
            let cfg = LoadedConfig::load(&config)?;
            let mut opts = cfg.config.partition.options();
            if let Some(m) = mode {
                opts.mode = match m {
                    Mode::Backward => SplitMode::Backward,
                    Mode::Forward => SplitMode::Forward,
                    Mode::Accuracy => SplitMode::Accuracy,
                };
            }
            if let Some(n) = max_splits {
                opts.max_splits = n;
            }
            Ok((cmd_partition(&cfg, &opts)?, out))
        }
        Command::BoundNn {
            network,
            input_box,
            goal_box,
            engine,
            out,
        } => {
            let net = load_network(&network)?;
            let input = parse_box(&input_box)?;
            let goal = goal_box
                .map(|g| -> symreach_cli::Result<Polyhedron> {
                    let b = parse_box(&g)?;
                    let lo: Vec<f64> = b.iter().map(|i| i.lo).collect();
                    let hi: Vec<f64> = b.iter().map(|i| i.hi).collect();
                    Ok(Polyhedron::from_box(&lo, &hi)?)
                })
                .transpose()?;
            let engine = match engine {
                EngineArg::Affine => Engine::Affine,
                EngineArg::Poly => Engine::Poly(PolyOptions::default()),
            };
            Ok((cmd_bound_nn(&net, &input, engine, goal.as_ref())?, out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|(outcome, dir)| outcome.write(&dir).map(|()| outcome)) {
        Ok(outcome) => {
            let r = &outcome.report;
            let name = r.name.as_deref().unwrap_or(r.command);
            println!("{name}: {} ({:.3} s)", serde_json::to_string(&r.verdict).unwrap_or_default(), r.timings.total_s);
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
