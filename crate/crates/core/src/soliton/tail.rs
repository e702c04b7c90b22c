//! The fixed-point iteration `u_{n+1} = ψ̂_{-a} bᵖ + P R_{-a} u_nᵖ`, `u₀ = 0`.

use serde::{Deserialize, Serialize};

use super::bounds::{h, s_min};
use super::params::SolitonParams;
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::operator::{projected_resolvent, ResolventKernel};

/// What happened along one run of the tail iteration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TailDiagnostics {
    /// Steps taken; `u_n` for `n = iterations` is returned.
    pub iterations: usize,
    /// `‖u_n‖₁` plus its certified tail, `n = 1..=iterations`.
    pub l1_norms: Vec<f64>,
    /// The majorant `s_n(a)`, `n = 1..=iterations`.
    pub bound_sequence: Vec<f64>,
    /// `‖u_n − u_{n−1}‖₁`.
    pub step_l1: Vec<f64>,
    /// `‖u_n − u_{n−1}‖_∞`.
    pub step_sup: Vec<f64>,
    /// `min_{n, x >= 1} (u_n(x) − u_{n−1}(x))`.
    pub min_increment: f64,
    /// `min_n (s_n − ‖u_n‖₁)`.
    pub min_bound_margin: f64,
    /// Every step increased every site `x >= 1`.
    pub monotone: bool,
    /// `‖u_n‖₁ <= s_n(a)` at every step.
    pub bounded: bool,
}

impl TailDiagnostics {
    /// Identity for [`merge_flags`](Self::merge_flags): no steps, no per-step series.
    pub(crate) fn empty_summary() -> Self {
        Self {
            min_increment: f64::INFINITY,
            min_bound_margin: f64::INFINITY,
            monotone: true,
            bounded: true,
            ..Default::default()
        }
    }

    /// Folds another run into a summary: steps add up, margins keep the worst.
    pub(crate) fn merge_flags(&mut self, other: &TailDiagnostics) {
        self.iterations += other.iterations;
        self.min_increment = self.min_increment.min(other.min_increment);
        self.min_bound_margin = self.min_bound_margin.min(other.min_bound_margin);
        self.monotone &= other.monotone;
        self.bounded &= other.bounded;
    }
}

/// Iterates to the fixed point `u⋆(a, b)` with `u⋆(0) = 0`.
///
/// Stops once both `‖u_{n+1} − u_n‖₁` and `‖u_{n+1} − u_n‖_∞` are at most
/// `iter_tol`. Leaving the contraction basin `‖u_n‖₁ < s_min(a)` is a
/// [`Error::RegimeViolation`].
pub fn tail_iteration(
    params: &SolitonParams,
    b: f64,
    kernel: &ResolventKernel,
) -> Result<(LatticeVector<f64>, TailDiagnostics)> {
    params.validate()?;
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("boundary value must be positive, got {b}")));
    }
    if kernel.a() != params.a {
        return Err(Error::Domain(format!("kernel built for a = {} used with a = {}", kernel.a(), params.a)));
    }
    let a = params.a;
    let p = params.p;
    let basin = s_min(a, p);
    let bp = b.powi(p as i32);
    let source = kernel.psi_vector().hat().scale(bp);

    let mut diag = TailDiagnostics::empty_summary();
    let mut u = LatticeVector::zeros(kernel.truncation_len());
    let mut s = 0.0;
    for n in 1..=params.max_iters {
        let next = if n == 1 {
            source.clone()
        } else {
            let image = projected_resolvent(kernel, &u.powi(p))?;
            let values = source.values().iter().zip(image.values()).map(|(s, r)| s + r).collect();
            LatticeVector::from_parts_unchecked(values, source.tail_bound() + image.tail_bound())
        };
        s = h(a, p, s);

        let mut step_l1 = 0.0;
        let mut step_sup = 0.0f64;
        for x in 1..next.len() {
            let d = next[x] - u[x];
            step_l1 += d.abs();
            step_sup = step_sup.max(d.abs());
            diag.min_increment = diag.min_increment.min(d);
        }
        let norm = next.norm_l1() + next.tail_bound();
        diag.monotone &= diag.min_increment > 0.0;
        diag.min_bound_margin = diag.min_bound_margin.min(s - norm);
        diag.bounded &= norm <= s;
        diag.l1_norms.push(norm);
        diag.bound_sequence.push(s);
        diag.step_l1.push(step_l1);
        diag.step_sup.push(step_sup);
        diag.iterations = n;

        if norm > basin {
            return Err(Error::RegimeViolation(format!(
                "tail iterate left the contraction basin: ||u_{n}||_1 = {norm:e} > s_min = {basin:e}"
            )));
        }
        u = next;
        if step_l1 <= params.iter_tol && step_sup <= params.iter_tol {
            return Ok((u, diag));
        }
    }
    Err(Error::NonConvergence { iters: params.max_iters, last_step: diag.step_l1.last().copied().unwrap_or(f64::NAN) })
}
