use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Ground states of the discrete NLS on the half-lattice.
#[derive(Debug, Clone, Parser)]
#[command(name = "ncsoliton", version, args_override_self = true)]
pub struct Cli {
    /// `key = value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory for outputs: relative `--out` paths resolve against it, and
    /// omitted ones get a default file name inside it instead of stdout.
    #[arg(long, global = true, env = "NCSOLITON_OUT_DIR", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Seed for randomized perturbations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Tabulate φ_{-a}, ψ_{-a} and the closed asymptote of ψ_{-a}.
    Specfun(SpecfunArgs),
    /// Eigenvalues of the truncated matrix of L₀.
    Spectrum(SpectrumArgs),
    /// Build the soliton and write it as JSON.
    Construct(ConstructArgs),
    /// Check a constructed soliton.
    Verify(VerifyArgs),
    /// Construct over a list of frequencies, one CSV row each.
    Sweep(SweepArgs),
    /// Evolve initial data under the discrete NLS.
    Evolve(EvolveArgs),
}

/// A frequency, literal or relative to the threshold: `6.5`, `auto`, `auto2x`, `auto1.5x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuSpec {
    Value(f64),
    TimesThreshold(f64),
}

impl FromStr for MuSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("auto") {
            if rest.is_empty() {
                return Ok(MuSpec::TimesThreshold(2.0));
            }
            let factor = rest.strip_suffix('x').ok_or_else(|| format!("expected autoNx, e.g. auto2x, got {s:?}"))?;
            let f: f64 = factor.parse().map_err(|_| format!("bad factor in {s:?}"))?;
            if !(f > 1.0 && f.is_finite()) {
                return Err(format!("factor in {s:?} must exceed 1 to stay above the threshold"));
            }
            return Ok(MuSpec::TimesThreshold(f));
        }
        let v: f64 = s.parse().map_err(|_| format!("expected a number or autoNx, got {s:?}"))?;
        Ok(MuSpec::Value(v))
    }
}

/// `auto` or an explicit last site `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XmaxSpec {
    Auto,
    Fixed(usize),
}

impl FromStr for XmaxSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "auto" => Ok(XmaxSpec::Auto),
            n => n.parse().map(XmaxSpec::Fixed).map_err(|_| format!("expected auto or an integer, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpecfunArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value = "auto")]
    pub xmax: XmaxSpec,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Matrix dimension (sites 0..n−1).
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 3)]
    pub p: u32,
    #[arg(long, default_value_t = 1e-12)]
    pub iter_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub root_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    #[arg(long, default_value = "auto")]
    pub xmax: XmaxSpec,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    /// Frequency: a number, or autoNx for N times the threshold.
    #[arg(long, alias = "a", default_value = "auto2x")]
    pub mu: MuSpec,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// JSON destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// A file written by `construct`.
    pub input: PathBuf,
    /// JSON report destination; printed after the table when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated frequencies, each a number or autoNx.
    #[arg(
        long,
        action = clap::ArgAction::Set,
        value_delimiter = ',',
        default_value = "auto1.5x,auto2x,auto4x,auto8x"
    )]
    pub mu: Vec<MuSpec>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialKind {
    Soliton,
    Chi0,
    Gaussian,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    /// Start from a soliton written by `construct`.
    #[arg(long, conflicts_with = "initial")]
    pub from: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub initial: Option<InitialKind>,
    /// Frequency for `--initial soliton`.
    #[arg(long, alias = "a", default_value = "auto2x")]
    pub mu: MuSpec,
    #[arg(long, default_value_t = 3)]
    pub p: u32,
    /// Final time; defaults to 10/μ for solitons and 1 otherwise.
    #[arg(long = "T", alias = "t-final")]
    pub t_final: Option<f64>,
    /// Time step; defaults to 1e-3/μ for solitons and 1e-3 otherwise.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    #[arg(long)]
    pub linear_only: bool,
    /// Relative edge amplitude treated as leakage.
    #[arg(long, default_value_t = crate::dnls::DEFAULT_LEAK_TOL)]
    pub leak_tol: f64,
    /// Lattice size; initial data is zero-extended to it.
    #[arg(long)]
    pub xmax: Option<usize>,
    /// Multiplies the initial data.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Width of the `gaussian` initial profile exp(−(x/width)²).
    #[arg(long, default_value_t = 4.0)]
    pub width: f64,
    /// Relative amplitude of seeded uniform noise: `v(x) ← v(x)(1 + noise·U(x))`,
    /// `U` uniform on `[−1, 1]`. Keeps the support of the data.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// CSV time series destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file for full snapshots.
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Snapshot every this many records.
    #[arg(long, default_value_t = 1)]
    pub snapshot_every: usize,
}
