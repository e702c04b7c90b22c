//! The `ncsoliton` command line.
//!
//! Exit codes: `0` success, `1` a verification check failed, `2` a usage,
//! regime or numerical error.

mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;

use clap::Parser;

pub use args::{
    Cli, Command, ConstructArgs, EvolveArgs, InitialKind, MuSpec, SolverArgs, SpecfunArgs, SpectrumArgs, SweepArgs,
    VerifyArgs, XmaxSpec,
};
pub use commands::{SpecfunRow, SpectrumRow, SweepRow};
pub use config::ConfigFile;
pub use output::{write_atomic, Sink};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} verification check(s) failed")]
    VerificationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::VerificationFailed(_) => EXIT_VERIFY_FAILED,
            _ => EXIT_ERROR,
        }
    }
}

/// A fully parsed invocation: flags after merging the config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cli: Cli,
    pub config: ConfigFile,
}

impl RunConfig {
    pub fn from_args<I, T>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString>,
    {
        let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
        let (merged, config) = config::merge(args)?;
        let cli = Cli::try_parse_from(merged)?;
        let run = Self { cli, config };
        run.validate()?;
        Ok(run)
    }

    /// Range checks clap cannot express. Numerical parameters are
    /// validated again by the library.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        match &self.cli.command {
            Command::Specfun(a) => {
                if !(a.a > 0.0 && a.a.is_finite()) {
                    return bad(format!("--a must be positive, got {}", a.a));
                }
            }
            Command::Spectrum(s) => {
                if s.n < 2 {
                    return bad(format!("--n must be >= 2, got {}", s.n));
                }
            }
            Command::Construct(c) => check_solver(&c.solver)?,
            Command::Sweep(s) => {
                check_solver(&s.solver)?;
                if s.mu.is_empty() {
                    return bad("--mu needs at least one value".into());
                }
            }
            Command::Verify(_) => {}
            Command::Evolve(e) => {
                if e.from.is_none() && e.initial.is_none() {
                    return bad("evolve needs --from FILE or --initial KIND".into());
                }
                if let Some(dt) = e.dt {
                    if !(dt > 0.0 && dt.is_finite()) {
                        return bad(format!("--dt must be positive, got {dt}"));
                    }
                }
                if let Some(t) = e.t_final {
                    if !(t >= 0.0 && t.is_finite()) {
                        return bad(format!("--T must be >= 0, got {t}"));
                    }
                }
                if e.record_every == 0 || e.snapshot_every == 0 {
                    return bad("--record-every and --snapshot-every must be >= 1".into());
                }
                if !(e.leak_tol > 0.0) {
                    return bad(format!("--leak-tol must be positive, got {}", e.leak_tol));
                }
                if !e.scale.is_finite() || !(e.width > 0.0) || !(e.noise >= 0.0) {
                    return bad("--scale must be finite, --width positive, --noise >= 0".into());
                }
                if e.xmax.is_some_and(|x| x < 2) {
                    return bad("--xmax must be >= 2".into());
                }
            }
        }
        Ok(())
    }
}

fn check_solver(s: &SolverArgs) -> Result<(), CliError> {
    if s.p < 2 {
        return Err(CliError::Usage(format!("--p must be >= 2, got {}", s.p)));
    }
    if let XmaxSpec::Fixed(x) = s.xmax {
        if x < 2 {
            return Err(CliError::Usage(format!("--xmax must be >= 2, got {x}")));
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
/// Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match RunConfig::from_args(args).and_then(|cfg| commands::dispatch(&cfg)) {
        Ok(()) => EXIT_OK,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("ncsoliton: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::VerificationFailed(2).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Numerical(Error::RegimeViolation("x".into())).exit_code(), 2);
        assert_eq!(run(["ncsoliton", "construct", "--mu", "banana"]), 2);
        assert_eq!(run(["ncsoliton", "--help"]), 0);
    }

    #[test]
    fn validation_rejects_bad_ranges() {
        assert!(RunConfig::from_args(["ncsoliton", "spectrum", "--n", "1"]).is_err());
        assert!(RunConfig::from_args(["ncsoliton", "evolve", "--initial", "chi0", "--dt", "0"]).is_err());
        assert!(RunConfig::from_args(["ncsoliton", "evolve"]).is_err());
        assert!(RunConfig::from_args(["ncsoliton", "evolve", "--initial", "chi0"]).is_ok());
    }

    #[test]
    fn config_values_are_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "p = 5\niter_tol = 1e-9\n").unwrap();
        let cfg = cfg.to_str().unwrap();
        let run = RunConfig::from_args(["ncsoliton", "--config", cfg, "construct", "--p", "3"]).unwrap();
        match run.cli.command {
            Command::Construct(c) => {
                assert_eq!(c.solver.p, 3);
                assert_eq!(c.solver.iter_tol, 1e-9);
            }
            _ => unreachable!(),
        }
    }
}
