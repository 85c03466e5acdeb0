use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zspiral::Error;

mod figures;
mod run;

/// Curves, curvature and zero statistics of the Riemann zeta-function on
/// vertical lines.
///
/// The thread count is read from ZSPIRAL_THREADS.
#[derive(Parser, Debug)]
#[command(name = "zspiral", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    /// One JSON object with provenance and result.
    Json,
    Svg,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct Line {
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = zspiral::curvature::DEFAULT_STEP)]
    pub step: f64,
    /// Absolute error target of each zeta evaluation.
    #[arg(long, default_value_t = 1e-8)]
    pub accuracy: f64,
}

#[derive(Args, Debug, Clone)]
pub struct Shifts {
    #[arg(long, allow_negative_numbers = true)]
    pub tau_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub tau_max: f64,
    #[arg(long, default_value_t = zspiral::universality::DEFAULT_TAU_STEP)]
    pub tau_step: f64,
    #[arg(long)]
    pub epsilon: f64,
}

#[derive(Args, Debug, Clone)]
pub struct Function {
    /// `zeta`, `zeta-prime`, or a Dirichlet polynomial `n:re[:im],...`
    /// such as `1:1,2:-1` for 1 − 2^(−s).
    #[arg(long, default_value = "zeta", allow_hyphen_values = true)]
    pub function: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Count,
    DerivativeDiff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProbeKind {
    /// Exponent of dyadic-window minima of |ζ| left of the critical line.
    Exponent,
    /// Length of the curve t ↦ ζ(σ + it).
    ArcLength,
    /// Lattice cells of a disk visited by the curve.
    Visit,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Values ζ(σ + it) on a grid: `t,re,im`.
    Trace {
        #[command(flatten)]
        line: Line,
        #[command(flatten)]
        out: Output,
    },
    /// Signed curvature samples: `t,kappa,re_logderiv,speed,defined`.
    Curvature {
        #[command(flatten)]
        line: Line,
        #[command(flatten)]
        out: Output,
    },
    /// Sign changes of Re ζ″/ζ′ on a grid.
    Signs {
        #[command(flatten)]
        line: Line,
        #[command(flatten)]
        out: Output,
    },
    /// Shifts τ with |ζ(σ + i(t + τ)) − target(t)| < ε.
    Scan {
        /// CSV with columns `t,re,im`.
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[command(flatten)]
        shifts: Shifts,
        #[command(flatten)]
        out: Output,
    },
    /// Shifts matching Re ζ to `f` and Im ζ to `g` at once.
    JointScan {
        /// CSV with columns `t,f,g`.
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[command(flatten)]
        shifts: Shifts,
        #[command(flatten)]
        out: Output,
    },
    /// Curves from curvature (and torsion) profiles, or the reverse.
    Frenet {
        /// Profile CSV `t,kappa[,torsion]`, or with --extract a curve CSV
        /// `t,x,y[,z]`.
        #[arg(long)]
        target: PathBuf,
        /// Read a curve and write its invariants.
        #[arg(long)]
        extract: bool,
        #[arg(long, allow_negative_numbers = true)]
        t_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t_max: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Window means of log|f| and Re f′/f on a σ grid.
    Jensen {
        #[command(flatten)]
        function: Function,
        /// `start:end:step` or a comma separated list.
        #[arg(long, allow_hyphen_values = true)]
        sigma_grid: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_max: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Zeros of f in a rectangle by the argument principle.
    Zeros {
        #[command(flatten)]
        function: Function,
        #[arg(long, allow_negative_numbers = true)]
        sigma_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_max: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Zeros per unit height in a vertical strip.
    Freq {
        #[command(flatten)]
        function: Function,
        #[arg(long, allow_negative_numbers = true)]
        sigma_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma_max: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long, value_enum, default_value_t = Method::Count)]
        method: Method,
        #[command(flatten)]
        out: Output,
    },
    /// Density probes.
    Probe {
        #[arg(long, value_enum)]
        kind: ProbeKind,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_max: f64,
        /// Sampling step for `visit`; chosen from |ζ′| if absent.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        center_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        center_im: f64,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        /// Lattice (1/N)Z[i].
        #[arg(long, default_value_t = 10)]
        n: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Reproduce a figure: SVGs and the CSV traces behind them.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        number: u8,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Machine-readable error record on standard error.
fn report(kind: &str, message: &str) {
    let rec = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{rec}");
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ZSPIRAL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("ZSPIRAL_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("invalid_arguments", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = configure_threads() {
        report("invalid_arguments", &msg);
        return ExitCode::from(2);
    }
    match run::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(e.kind(), &e.to_string());
            ExitCode::from(if is_validation(&e) { 2 } else { 1 })
        }
    }
}

fn is_validation(e: &Error) -> bool {
    e.is_validation() || matches!(e, Error::Coverage { .. } | Error::SamplingTooCoarse { .. })
}
