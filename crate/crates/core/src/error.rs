use thiserror::Error;

/// Errors raised by the numerical pipeline.
///
/// Failed property checks are not errors; they are recorded in a
/// [`VerificationReport`](crate::verify::VerificationReport).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {what} exceeds the floating range at x = {x}")]
    Overflow { what: &'static str, x: usize },

    #[error("quadrature for {what} did not converge after {panels} panels")]
    Quadrature { what: &'static str, panels: usize },

    #[error("kernel invariant broken at x = {x}: (x+1)W[phi,psi](x) = {value}")]
    Wronskian { x: usize, value: f64 },

    #[error("g(a, s) has no two positive roots for a = {a}, p = {p} (a <= a0)")]
    NoTwoRoots { a: f64, p: u32 },

    #[error("tail iteration did not converge in {iters} steps (last l1 step {last_step:e})")]
    NonConvergence { iters: usize, last_step: f64 },

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("boundary function does not change sign on [{lo}, {hi}]: f = ({f_lo:e}, {f_hi:e})")]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("check requires p >= 3, got p = {0}")]
    UnsupportedP(u32),

    #[error("decay fit window too small: {0}")]
    FitWindowTooSmall(String),

    #[error("mass reached the truncation boundary: |w(X)| = {edge:e} at t = {t}")]
    TailLeak { edge: f64, t: f64 },

    #[error("phase unwrap failed: increment {jump} rad between samples at t = {t}")]
    PhaseUnwrapFailure { jump: f64, t: f64 },

    #[error("constructed profile fails {check}: measured {measured:e}")]
    PropertyViolation { check: String, measured: f64 },

    #[error("mismatched truncations: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {value}")))
    }
}
