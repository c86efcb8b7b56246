//! `crowd-pivot`: aggregate, simulate, analyse and evaluate crowd forecasts.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crowd_pivot::aggregators::parse_method_list;
use crowd_pivot::simulator::Structure;
use crowd_pivot::MethodId;

pub(crate) const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Parser)]
#[command(name = "crowd-pivot", version, about)]
pub(crate) struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub(crate) enum Command {
    /// Apply aggregation methods to one panel and print each estimate.
    Aggregate {
        /// CSV with `estimate` and `peer_estimate` columns.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = methods, default_value = "mean,median,trimmed:0.1,mp,so,np")]
        methods: MethodList,
    },
    /// Draw simulated trials and/or estimate pivot MSE by Monte Carlo.
    Simulate(SimulateArgs),
    /// Closed-form results.
    Theory {
        #[command(subcommand)]
        command: TheoryCommand,
    },
    /// RMSE table with Wilcoxon significance markers.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = methods, default_value = "mean,median,trimmed:0.1,mp,so,np")]
        methods: MethodList,
    },
    /// Least-squares oracle pivot per experiment.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Crowd-size curves from resampled judges.
    Bootstrap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = methods, default_value = "mean,median,trimmed:0.1,mp,so,np")]
        methods: MethodList,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,40,80")]
        sizes: Vec<usize>,
        /// Replications per size.
        #[arg(long, default_value_t = 1000)]
        boot: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write an SVG chart; with several experiments the name gets a suffix.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub(crate) struct SimulateArgs {
    /// TOML file with crowd parameters; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub crowd: CrowdFlags,
    /// Number of trials to write to --output.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    /// Dataset CSV for the drawn trials.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Pivot weights for the Monte Carlo MSE (printed as CSV on stdout).
    #[arg(long, value_delimiter = ',')]
    pub psi: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    pub replications: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args, Default)]
pub(crate) struct CrowdFlags {
    #[arg(long)]
    pub judges: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long)]
    pub m1: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long)]
    pub sigma0: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    #[arg(long)]
    pub sd_delta: Option<f64>,
    #[arg(long)]
    pub sd_epsilon: Option<f64>,
    #[arg(long)]
    pub sd_gamma: Option<f64>,
    #[arg(long)]
    pub structure: Option<Structure>,
}

#[derive(Debug, Subcommand)]
pub(crate) enum TheoryCommand {
    /// P(pw <= c) for independent uniform p and w.
    ProbPw { c: f64 },
    /// The pivot weights that never lose to the simple mean in large crowds.
    Range,
    /// Expected squared error of pivots over a (p, w, psi) grid.
    Mse(TheoryMseArgs),
    /// Grid of (p, w) marking where pw <= 2/3.
    Region {
        #[arg(long, default_value_t = 101)]
        grid_resolution: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub(crate) struct TheoryMseArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub w: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub psi: Vec<f64>,
    /// Finite crowd size; omit for the large-crowd limit only.
    #[arg(long)]
    pub judges: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m1: f64,
    /// Prior standard deviation; defaults to sqrt(v0 / m0).
    #[arg(long)]
    pub sigma0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub v0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sd_delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sd_epsilon: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sd_gamma: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Comma-separated methods in their text form.
#[derive(Debug, Clone)]
pub(crate) struct MethodList(pub Vec<MethodId>);

fn methods(s: &str) -> Result<MethodList, String> {
    parse_method_list(s)
        .map(MethodList)
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = err
                .downcast_ref::<crowd_pivot::Error>()
                .map_or("error", crowd_pivot::Error::kind);
            let line = serde_json::json!({
                "error": { "kind": kind, "message": format!("{err:#}") }
            });
            eprintln!("{line}");
            ExitCode::from(1)
        }
    }
}
