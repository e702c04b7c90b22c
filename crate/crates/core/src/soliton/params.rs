use serde::{Deserialize, Serialize};

use super::bounds::b_plus;
use crate::error::{ensure_positive, Error, Result};
use crate::specfun::{default_truncation, psi_tail_l1_bound};

/// Smallest lattice the automatic policy will pick.
pub const MIN_AUTO_TRUNCATION: usize = 64;

/// How the lattice is cut off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// Large enough that the `ψ_{-a}` tail is below round-off and below
    /// `iter_tol / 10` in ℓ¹ after scaling by `b₊^p`.
    Auto,
    /// Sites `0..=X`.
    Fixed(usize),
}

/// Every knob of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    /// Spectral shift `a` (the frequency `μ`).
    pub a: f64,
    /// Nonlinearity power, `p >= 2`.
    pub p: u32,
    pub iter_tol: f64,
    pub root_tol: f64,
    pub max_iters: usize,
    pub truncation: Truncation,
}

impl SolitonParams {
    /// Defaults: tolerances `1e-12`, `10 000` iterations, automatic truncation.
    pub fn new(a: f64, p: u32) -> Self {
        Self { a, p, iter_tol: 1e-12, root_tol: 1e-12, max_iters: 10_000, truncation: Truncation::Auto }
    }

    pub fn with_tolerances(mut self, iter_tol: f64, root_tol: f64) -> Self {
        self.iter_tol = iter_tol;
        self.root_tol = root_tol;
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("a", self.a)?;
        if self.p < 2 {
            return Err(Error::Domain(format!("p must be >= 2, got {}", self.p)));
        }
        for (name, tol) in [("iter_tol", self.iter_tol), ("root_tol", self.root_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::Domain(format!("{name} must lie in (0, 1), got {tol}")));
            }
        }
        if self.max_iters < 1 {
            return Err(Error::Domain("max_iters must be >= 1".into()));
        }
        if let Truncation::Fixed(x) = self.truncation {
            if x < 2 {
                return Err(Error::Domain(format!("truncation must be >= 2, got {x}")));
            }
        }
        Ok(())
    }

    /// The truncation `X` this configuration runs at.
    pub fn resolve_truncation(&self) -> Result<usize> {
        self.validate()?;
        match self.truncation {
            Truncation::Fixed(x) => Ok(x),
            Truncation::Auto => auto_truncation(self.a, self.p, self.iter_tol),
        }
    }
}

fn auto_truncation(a: f64, p: u32, iter_tol: f64) -> Result<usize> {
    let mut x = default_truncation(a)?.max(MIN_AUTO_TRUNCATION);
    let scale = b_plus(a, p).powi(p as i32);
    while psi_tail_l1_bound(a, x)? * scale >= iter_tol / 10.0 {
        x += x / 8 + 1;
    }
    Ok(x)
}
