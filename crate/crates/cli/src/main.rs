//! `seaweed` command-line tool.
//!
//! Every failure prints one JSON line `{"error": <kind>, "message": ...}` to
//! stderr and exits with status 1. Usage errors exit with status 2.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "seaweed",
    version,
    about = "Seaweed-swarm ecosystem simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct WorldArgs {
    /// Engine configuration JSON; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the master seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the world in real time behind the HTTP API.
    Serve {
        #[command(flatten)]
        world: WorldArgs,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        /// Snapshots per second on /stream.
        #[arg(long, default_value_t = 10.0)]
        stream_hz: f64,
        /// Append every applied event to this JSON-lines trace.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Run a scripted policy headless and write timeseries.csv,
    /// final_state.json and trace.jsonl into --out.
    Simulate {
        #[command(flatten)]
        world: WorldArgs,
        /// Policy JSON; no insertions when omitted.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Simulated seconds.
        #[arg(long)]
        duration: f64,
        #[arg(long)]
        out: PathBuf,
        /// Ticks between CSV rows.
        #[arg(long, default_value_t = 10)]
        sample_every: u64,
    },
    /// Fit one response-curve model per factor and write <factor>.json plus fit_report.json.
    Fit {
        /// Directory holding <factor>.json datasets; the bundled curves when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 8)]
        hidden: usize,
        #[arg(long, default_value_t = 20_000)]
        epochs: usize,
        #[arg(long, default_value_t = 1.0)]
        lr: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Final MSE each factor must reach.
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
    /// Replay an event trace and print the final state hash.
    Replay {
        #[command(flatten)]
        world: WorldArgs,
        #[arg(long)]
        trace: PathBuf,
        /// Ticks to run after the last reset; defaults to one past the last event.
        #[arg(long)]
        ticks: Option<u64>,
        /// Write snapshots.jsonl here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        snapshot_every: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve {
            world,
            bind,
            stream_hz,
            record,
        } => commands::serve(&world, &bind, stream_hz, record.as_deref()),
        Command::Simulate {
            world,
            policy,
            duration,
            out,
            sample_every,
        } => commands::simulate(&world, policy.as_deref(), duration, &out, sample_every),
        Command::Fit {
            data,
            out,
            hidden,
            epochs,
            lr,
            seed,
            threshold,
        } => {
            let params = seaweed_core::genmodel::FitParams {
                hidden,
                epochs,
                lr,
                seed,
            };
            commands::fit(data.as_deref(), &out, &params, threshold)
        }
        Command::Replay {
            world,
            trace,
            ticks,
            out,
            snapshot_every,
        } => commands::replay(&world, &trace, ticks, out.as_deref(), snapshot_every),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": e.kind, "message": e.message})
            );
            ExitCode::FAILURE
        }
    }
}
