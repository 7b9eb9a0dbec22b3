//! Command-line front end for streaming community detection.

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use commstream::generator::{generate, GenConfig};
use commstream::window::{WindowMode, WindowPolicy};
use commstream_cli::pipeline::{self, Algorithm, RunConfig};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "commstream", version, about = "Community detection over edge-event streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Process an event stream and write result artifacts.
    Run(RunArgs),
    /// Generate a synthetic event stream with planted ground truth.
    Gen(GenArgs),
    /// List the distinct community ids of a completed run.
    Communities {
        /// Artifact directory of a completed run.
        dir: PathBuf,
    },
    /// List the member vertices of one community of a completed run.
    Vertices {
        /// Artifact directory of a completed run.
        dir: PathBuf,
        /// Community id to look up.
        community: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Input event-stream file.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Dynlouvain)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = WindowArg::Landmark)]
    window: WindowArg,
    /// Window length: events for count mode, time units for time mode.
    #[arg(long, default_value_t = 1000)]
    window_size: u64,
    #[arg(long, value_enum, default_value_t = WindowModeArg::Count)]
    window_mode: WindowModeArg,
    /// Eviction cadence: evictions run every stride-th event.
    #[arg(long, default_value_t = 1)]
    stride: u64,
    /// Add the average-density column to quality.csv.
    #[arg(long)]
    densopt: bool,
    /// Log and skip removals of absent edges instead of failing.
    #[arg(long)]
    lenient_removes: bool,
    /// Steps between emitted quality and stability rows.
    #[arg(long, default_value_t = 1)]
    emit_every: u64,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Dynlouvain,
    StaticRerun,
    DensoptPost,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WindowArg {
    Landmark,
    Sliding,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WindowModeArg {
    Count,
    Time,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 200)]
    n_vertices: usize,
    #[arg(long, default_value_t = 2.5)]
    degree_exponent: f64,
    #[arg(long, default_value_t = 2.5)]
    size_exponent: f64,
    #[arg(long, default_value_t = 0.8)]
    intra_probability: f64,
    #[arg(long, default_value_t = 0.05)]
    inter_probability: f64,
    /// Iterations an interaction survives without being re-drawn.
    #[arg(long, default_value_t = 5)]
    decay_ttl: u64,
    /// Chance of a planted merge or split at each stable iteration.
    #[arg(long, default_value_t = 0.2)]
    event_probability: f64,
    #[arg(long, default_value_t = 30)]
    iterations: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory for events.csv and ground_truth.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() {
    env_logger::init();
    if let Err(err) = dispatch(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

/// Writes one line to stdout. A closed pipe (`commstream communities out
/// | head`) is a clean exit, not a panic.
fn emit(out: &mut impl Write, line: impl std::fmt::Display) {
    if let Err(err) = writeln!(out, "{line}") {
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = RunConfig {
                algorithm: match args.algorithm {
                    AlgorithmArg::Dynlouvain => Algorithm::DynLouvain,
                    AlgorithmArg::StaticRerun => Algorithm::StaticRerun,
                    AlgorithmArg::DensoptPost => Algorithm::DensoptPost,
                },
                window: match args.window {
                    WindowArg::Landmark => WindowPolicy::Landmark,
                    WindowArg::Sliding => WindowPolicy::Sliding {
                        length: args.window_size,
                        mode: match args.window_mode {
                            WindowModeArg::Count => WindowMode::Count,
                            WindowModeArg::Time => WindowMode::Time,
                        },
                        stride: args.stride,
                    },
                },
                input: args.input,
                out: args.out.clone(),
                lenient_removes: args.lenient_removes,
                emit_every: args.emit_every,
                densopt_column: args.densopt,
            };
            let summary = pipeline::run(&cfg)?;
            emit(
                &mut std::io::stdout().lock(),
                format!(
                    "processed {} events into {} communities; artifacts in {}",
                    summary.events,
                    summary.communities,
                    args.out.display()
                ),
            );
        }
        Command::Gen(args) => {
            let cfg = GenConfig {
                n_vertices: args.n_vertices,
                degree_exponent: args.degree_exponent,
                size_exponent: args.size_exponent,
                intra_probability: args.intra_probability,
                inter_probability: args.inter_probability,
                decay_ttl: args.decay_ttl,
                event_probability: args.event_probability,
                iterations: args.iterations,
                seed: args.seed,
            };
            let timeline = generate(&cfg)?;
            pipeline::write_generated(&args.out, &timeline)?;
            emit(
                &mut std::io::stdout().lock(),
                format!(
                    "generated {} events with {} stable points; artifacts in {}",
                    timeline.events.len(),
                    timeline.stable_points.len(),
                    args.out.display()
                ),
            );
        }
        Command::Communities { dir } => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for c in pipeline::list_communities(&dir)? {
                emit(&mut out, c);
            }
        }
        Command::Vertices { dir, community } => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for v in pipeline::list_vertices(&dir, community)? {
                emit(&mut out, v);
            }
        }
    }
    Ok(())
}
