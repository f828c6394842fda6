use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Density evolution, threshold search and finite-length simulation for LDPC
/// and spatially coupled LDPC codes over the binary two-way relay channel.
#[derive(Debug, Parser)]
#[command(name = "relay-de", version)]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0x5eed_2017)]
    seed: u64,
    /// Worker threads; 1 selects the sequential reference mode.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symmetric information rate: C_sym(sigma) on a grid, or sigma_sym(R).
    Sir(SirArgs),
    /// Per-iteration, per-position BER of one density-evolution run.
    DeTrace(DeTraceArgs),
    /// BP threshold search, optionally swept over chain lengths.
    Threshold(ThresholdArgs),
    /// Monte Carlo BP (and optionally exhaustive ML) on sampled codes.
    Simulate(SimulateArgs),
    /// Protograph structure as JSON.
    Describe(DescribeArgs),
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[arg(long = "dl", default_value_t = 3)]
    d_l: usize,
    #[arg(long = "dr", default_value_t = 6)]
    d_r: usize,
    /// Chain length; omit for the uncoupled ensemble.
    #[arg(long = "L")]
    chain: Option<usize>,
}

#[derive(Debug, Args)]
struct DeArgs {
    /// Population size.
    #[arg(long = "N")]
    population: Option<usize>,
    /// Iteration cap.
    #[arg(long = "T")]
    iterations: Option<usize>,
    /// BER draws per position and bit value.
    #[arg(long)]
    ber_samples: Option<usize>,
    /// Consecutive zero-BER iterations that count as decoded.
    #[arg(long)]
    zero_streak: Option<usize>,
    /// Start from N=1e5, T=2000 instead of N=1e4, T=1000.
    #[arg(long)]
    paper_fidelity: bool,
}

#[derive(Debug, Args)]
struct SirArgs {
    /// Target rate in (0, 1); reports sigma_sym(rate).
    #[arg(long, value_parser = parse_rate, conflicts_with_all = ["sigma", "grid"])]
    rate: Option<f64>,
    /// Noise levels at which to evaluate C_sym.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    sigma: Vec<f64>,
    /// Evaluation grid `start:stop:step`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct DeTraceArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, value_parser = parse_positive)]
    sigma: f64,
    #[command(flatten)]
    de: DeArgs,
    #[arg(long, short)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Chain lengths to sweep, e.g. `10,25,50`.
    #[arg(long = "sweep-L", value_delimiter = ',', conflicts_with = "chain")]
    sweep: Vec<usize>,
    /// Fit sigma_inf + c/L to the swept thresholds.
    #[arg(long, requires = "sweep")]
    extrapolate: bool,
    /// Search bracket `lo,hi`.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    bracket: Vec<f64>,
    /// Final bracket width.
    #[arg(long, default_value_t = 0.002, value_parser = parse_positive)]
    tol: f64,
    #[command(flatten)]
    de: DeArgs,
    /// JSON output; stdout when absent.
    #[arg(long, short)]
    out: Option<std::path::PathBuf>,
    /// Also write summary rows (ensemble, L, rate, sigma*, sigma_sym) as CSV.
    #[arg(long)]
    summary_csv: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long = "dl", default_value_t = 3)]
    d_l: usize,
    #[arg(long = "dr", default_value_t = 6)]
    d_r: usize,
    /// Block length.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0.7, value_parser = parse_positive)]
    sigma: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// BP iteration cap.
    #[arg(long, default_value_t = 10)]
    iters: usize,
    /// Reuse one sampled graph for every trial.
    #[arg(long)]
    same_graph: bool,
    /// Compare BP with exhaustive ML on one small code instead.
    #[arg(long)]
    ml: bool,
    #[arg(long, short)]
    out: Option<std::path::PathBuf>,
    /// Also write `trial,iteration,ber` rows.
    #[arg(long)]
    trials_csv: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct DescribeArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, short)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    start: f64,
    stop: f64,
    step: f64,
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}

fn parse_rate(s: &str) -> Result<f64, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number or fraction"));
    let v = match s.split_once('/') {
        Some((p, q)) => num(p)? / num(q)?,
        None => num(s)?,
    };
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("rate must lie strictly between 0 and 1, got {s}"))
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts[..] else {
        return Err("expected start:stop:step".into());
    };
    let g = Grid {
        start: parse_positive(a)?,
        stop: parse_positive(b)?,
        step: parse_positive(c)?,
    };
    if g.stop < g.start {
        return Err("stop must not be below start".into());
    }
    Ok(g)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
