//! The boundary row `bᵖ − (a+1)b + q(a, b) = 0`, `q(a, b) = u⋆(a, b; 1)`.

use super::bounds::{b_minus, b_plus};
use super::params::SolitonParams;
use super::tail::{tail_iteration, TailDiagnostics};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::operator::ResolventKernel;

/// `f(a, b, q) = bᵖ − (a+1)b + q`.
pub fn f(a: f64, p: u32, b: f64, q: f64) -> f64 {
    b.powi(p as i32) - (a + 1.0) * b + q
}

/// `f` with `q = 0`; vanishes at `b₊(a)`.
pub fn f_minus(a: f64, p: u32, b: f64) -> f64 {
    f(a, p, b, 0.0)
}

/// `f` with `q = b`; vanishes at `b₋(a)`.
pub fn f_plus(a: f64, p: u32, b: f64) -> f64 {
    f(a, p, b, b)
}

/// One evaluation of the boundary function with the tail that produced it.
#[derive(Debug, Clone)]
pub struct BoundaryEval {
    pub b: f64,
    pub f: f64,
    pub q: f64,
    pub u_star: LatticeVector<f64>,
    pub diagnostics: TailDiagnostics,
}

pub fn evaluate_boundary(params: &SolitonParams, b: f64, kernel: &ResolventKernel) -> Result<BoundaryEval> {
    let (u_star, diagnostics) = tail_iteration(params, b, kernel)?;
    let q = u_star[1];
    Ok(BoundaryEval { b, f: f(params.a, params.p, b, q), q, u_star, diagnostics })
}

/// `f⋆(a, b) = bᵖ − (a+1)b + u⋆(a, b; 1)`.
pub fn boundary_function(params: &SolitonParams, b: f64, kernel: &ResolventKernel) -> Result<f64> {
    Ok(evaluate_boundary(params, b, kernel)?.f)
}

/// The root `b⋆` together with the tail at `b⋆` and all iteration
/// diagnostics seen on the way.
#[derive(Debug, Clone)]
pub struct BoundaryRoot {
    pub root: BoundaryEval,
    pub evaluations: usize,
    /// Flags and total steps folded over every tail iteration run during
    /// the solve; the per-step series are left empty.
    pub all_runs: TailDiagnostics,
}

/// Bisection for `f⋆(a, ·) = 0` on `[b₋(a), b₊(a)]`, stopping at the first
/// midpoint with `|f⋆| <= root_tol`.
pub fn solve_boundary(params: &SolitonParams, kernel: &ResolventKernel) -> Result<BoundaryRoot> {
    let (a, p) = (params.a, params.p);
    let mut lo = b_minus(a, p);
    let mut hi = b_plus(a, p);
    let f_lo = evaluate_boundary(params, lo, kernel)?;
    let f_hi = evaluate_boundary(params, hi, kernel)?;
    let mut all_runs = TailDiagnostics::empty_summary();
    all_runs.merge_flags(&f_lo.diagnostics);
    all_runs.merge_flags(&f_hi.diagnostics);
    if !(f_lo.f < 0.0 && f_hi.f > 0.0) {
        return Err(Error::BracketFailure { lo, hi, f_lo: f_lo.f, f_hi: f_hi.f });
    }
    let mut evaluations = 2;
    let mut best: Option<BoundaryEval> = None;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let eval = evaluate_boundary(params, mid, kernel)?;
        evaluations += 1;
        all_runs.merge_flags(&eval.diagnostics);
        let done = eval.f.abs() <= params.root_tol;
        if eval.f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if best.as_ref().map_or(true, |bst| eval.f.abs() < bst.f.abs()) {
            best = Some(eval);
        }
        if done {
            break;
        }
    }
    let root = best.expect("bracket admits at least one midpoint");
    if root.f.abs() > params.root_tol {
        log::warn!(
            "boundary bisection exhausted the bracket with |f| = {:e} > root_tol = {:e}",
            root.f.abs(),
            params.root_tol
        );
    }
    Ok(BoundaryRoot { root, evaluations, all_runs })
}
