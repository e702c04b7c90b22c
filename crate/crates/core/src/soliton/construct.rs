use serde::{Deserialize, Serialize};

use super::boundary::solve_boundary;
use super::bounds::{bound_fixed_points, compute_thresholds, Thresholds};
use super::params::SolitonParams;
use super::tail::TailDiagnostics;
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::operator::{apply_l0, build_kernel};

/// The soliton `α` with everything needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonResult {
    /// `α(0) = b⋆`, `α(x) = u⋆(x)` for `x >= 1`.
    pub alpha: LatticeVector<f64>,
    pub b_star: f64,
    /// `q(a, b⋆) = α(1)`.
    pub q_at_root: f64,
    /// `s₋(a)`, the limit of the majorant.
    pub s_star: f64,
    /// Tail-iteration steps at `b⋆`.
    pub iterations_used: usize,
    /// `‖L₀α + aα − αᵖ‖_∞` over rows `0..X−1`.
    pub residual_sup: f64,
    /// `f⋆(a, b⋆)`.
    pub boundary_value: f64,
    pub boundary_evaluations: usize,
    pub params: SolitonParams,
    pub thresholds: Thresholds,
    /// Diagnostics of the final tail iteration.
    pub diagnostics: TailDiagnostics,
    /// Monotonicity and majorant flags folded over every iteration run
    /// during the boundary solve.
    pub all_runs: TailDiagnostics,
}

impl SolitonResult {
    pub fn a(&self) -> f64 {
        self.params.a
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn truncation_len(&self) -> usize {
        self.alpha.truncation_len()
    }
}

/// `L₀v + av − vᵖ` on rows `0..X−1`.
pub fn soliton_residual(v: &LatticeVector<f64>, a: f64, p: u32) -> LatticeVector<f64> {
    let l0 = apply_l0(v);
    let values = l0.values().iter().zip(v.values()).map(|(l, v)| l + a * v - v.powi(p as i32)).collect();
    LatticeVector::from_parts_unchecked(values, l0.tail_bound())
}

/// Builds `α_a` for `a > μ⋆(p)`.
///
/// The shape checks (positivity, strict decrease, certified ℓ¹
/// tail) run before returning; a profile that fails them is an error.
pub fn construct_soliton(params: &SolitonParams) -> Result<SolitonResult> {
    params.validate()?;
    let thresholds = compute_thresholds(params.p)?;
    if params.a <= thresholds.mu_star {
        return Err(Error::RegimeViolation(format!(
            "mu = {} <= mu_star = {} for p = {}",
            params.a, thresholds.mu_star, params.p
        )));
    }
    let x_max = params.resolve_truncation()?;
    let kernel = build_kernel(params.a, x_max)?;
    let bounds = bound_fixed_points(params.a, params.p)?;
    let solved = solve_boundary(params, &kernel)?;
    let root = solved.root;

    let mut alpha = root.u_star;
    alpha[0] = root.b;
    let residual_sup = soliton_residual(&alpha, params.a, params.p).norm_sup();

    let result = SolitonResult {
        q_at_root: alpha[1],
        alpha,
        b_star: root.b,
        s_star: bounds.s_minus,
        iterations_used: root.diagnostics.iterations,
        residual_sup,
        boundary_value: root.f,
        boundary_evaluations: solved.evaluations,
        params: *params,
        thresholds,
        diagnostics: root.diagnostics,
        all_runs: solved.all_runs,
    };
    for check in crate::verify::check_shape(&result) {
        if !check.passed {
            return Err(Error::PropertyViolation { check: check.name, measured: check.measured });
        }
    }
    Ok(result)
}
