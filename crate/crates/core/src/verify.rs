//! Executable checks of the properties a constructed soliton must have.
//!
//! Each check records what was measured, the bound it was held to and
//! whether it passed. A failing check is data, not an error; only inputs the
//! checks cannot handle at all produce [`Error`]s.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::soliton::{b_minus, b_plus, soliton_residual, SolitonParams, SolitonResult};
use crate::specfun::{laguerre_phi, psi_tail_l1_bound, resolvent_psi, EigenfunctionProfile};

/// Certified ℓ¹ tail a soliton must stay below.
pub const TAIL_TOL: f64 = 1e-10;
/// Absolute tolerance of the summed difference identity.
pub const SUMMED_FORM_TOL: f64 = 1e-9;
/// Cap on the correction constant `C` in `‖α̂‖₁ a^{(p−2)/(p−1)} <= 1 + C/a`.
pub const L1_CORRECTION_CAP: f64 = 5.0;
/// Relative width `ε/a` of the upper reference in the decay-rate bracket.
pub const DECAY_EPS: f64 = 1e-3;
/// Fewest sites a decay-fit window may hold.
pub const MIN_FIT_POINTS: usize = 16;

/// One named property with its measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The property being tested, in words.
    pub claim: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &str, claim: &str, passed: bool, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self { name: name.into(), claim: claim.into(), passed, measured, bound, tolerance }
    }

    /// Passes iff `measured < bound` (or `<=` when `inclusive`).
    fn below(name: &str, claim: &str, measured: f64, bound: f64, inclusive: bool) -> Self {
        let passed = if inclusive { measured <= bound } else { measured < bound };
        Self::new(name, claim, passed, measured, bound, 0.0)
    }

    fn above(name: &str, claim: &str, measured: f64, bound: f64) -> Self {
        Self::new(name, claim, measured > bound, measured, bound, 0.0)
    }
}

/// `log y + k log x ≈ log c₀ − c₁ √x` fitted by least squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c0: f64,
    pub c1: f64,
    /// RMS residual of the fit in log space.
    pub residual: f64,
    /// `k`, the power of the algebraic prefactor.
    pub prefactor_power: f64,
    pub window: (usize, usize),
}

/// Prefactor power used unless stated otherwise. The closed asymptote of
/// `ψ_{-a}` carries `x^{-1/4}`.
pub const DEFAULT_PREFACTOR_POWER: f64 = 0.25;

/// Quantities behind the spatial-decay envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeData {
    /// Last site where `α^{p−1} >= a/2` may still hold.
    pub x_star: usize,
    /// `sup_{x > x⋆} α(x)^{p−1}`.
    pub q_bar: f64,
    /// `c = Σ_{y<=x⋆} α(y)ᵖ φ_{-(a−q̄)}(y)`.
    pub constant: f64,
    /// `max_{x > x⋆} α(x) / (c ψ_{-(a−q̄)}(x))`.
    pub max_ratio: f64,
    /// `c Σ_{x>X} ψ_{-(a−q̄)}(x)`, a certified bound on the tail of `α`.
    pub certified_tail: f64,
}

/// Everything [`verify_all`] found. Entries are only ever appended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub params: SolitonParams,
    checks: Vec<Check>,
    pub decay_fit: Option<DecayFit>,
    /// The same fit with prefactor power `1/2`.
    pub decay_fit_half: Option<DecayFit>,
    pub envelope: Option<EnvelopeData>,
}

impl VerificationReport {
    pub fn new(params: SolitonParams) -> Self {
        Self { params, checks: Vec::new(), decay_fit: None, decay_fit_half: None, envelope: None }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:<6} {:>14} {:>14}", "check", "result", "measured", "bound")?;
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "{:<28} {:<6} {:>14.6e} {:>14.6e}", c.name, verdict, c.measured, c.bound)?;
        }
        if let Some(fit) = &self.decay_fit {
            writeln!(
                f,
                "decay fit (k = {}): c0 = {:.6e}, c1 = {:.6}, rms = {:.3e}",
                fit.prefactor_power, fit.c0, fit.c1, fit.residual
            )?;
        }
        Ok(())
    }
}

/// Positivity, strict decrease and certified ℓ¹ tail of a profile.
pub fn shape_checks(alpha: &LatticeVector<f64>) -> Vec<Check> {
    let v = alpha.values();
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max_step = v.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    vec![
        Check::above("positivity", "alpha(x) > 0 at every site", min, 0.0),
        Check::below("strict_decrease", "alpha(x+1) - alpha(x) < 0 at every site", max_step, 0.0, false),
        Check::below("l1_tail", "certified l1 mass beyond the truncation", alpha.tail_bound(), TAIL_TOL, false),
    ]
}

/// Positive, strictly decreasing, absolutely summable.
pub fn check_shape(result: &SolitonResult) -> Vec<Check> {
    shape_checks(&result.alpha)
}

/// `‖L₀α + aα − αᵖ‖_∞ <= 10 (iter_tol + root_tol)`, recomputed from `α`.
pub fn check_residual(result: &SolitonResult) -> Check {
    let measured = soliton_residual(&result.alpha, result.a(), result.p()).norm_sup();
    let bound = 10.0 * (result.params.iter_tol + result.params.root_tol);
    Check::below("residual", "stationary equation holds on the interior", measured, bound, true)
}

/// `b₋(a) < b⋆ < b₊(a)`; measured is the smaller distance to an end.
pub fn check_bracket(result: &SolitonResult) -> Check {
    let (lo, hi) = (b_minus(result.a(), result.p()), b_plus(result.a(), result.p()));
    let margin = (result.b_star - lo).min(hi - result.b_star);
    Check::above("bracket", "boundary value strictly inside its interval", margin, 0.0)
}

/// Strict pointwise increase of the tail iterates and `‖u_n‖₁ <= s_n`,
/// over every iteration run during the construction.
pub fn check_iteration(result: &SolitonResult) -> Vec<Check> {
    let d = &result.all_runs;
    vec![
        Check::above("iteration_monotone", "u_{n+1}(x) > u_n(x) for all x >= 1 and all n", d.min_increment, 0.0),
        Check::new(
            "iteration_majorized",
            "||u_n||_1 <= s_n at every step",
            d.bounded && d.min_bound_margin >= 0.0,
            d.min_bound_margin,
            0.0,
            0.0,
        ),
    ]
}

/// `a^{(p−2)/(p−1)} ‖α̂‖₁`, the quantity that tends to 1.
pub fn l1_scaling_ratio(result: &SolitonResult) -> f64 {
    let p = result.p() as f64;
    let hat = result.alpha.hat();
    (hat.norm_l1() + hat.tail_bound()) * result.a().powf((p - 2.0) / (p - 1.0))
}

/// `‖α̂‖₁ <= s₋(a)` and `a^{(p−2)/(p−1)}‖α̂‖₁ <= 1 + C/a` with `C` capped at 5.
pub fn check_l1_scaling(result: &SolitonResult) -> Result<Vec<Check>> {
    if result.p() < 3 {
        return Err(Error::UnsupportedP(result.p()));
    }
    let hat = result.alpha.hat();
    let norm = hat.norm_l1() + hat.tail_bound();
    let ratio = l1_scaling_ratio(result);
    Ok(vec![
        Check::below("l1_majorant", "||alpha_hat||_1 <= s_minus(a)", norm, result.s_star, true),
        Check::below(
            "l1_leading_order",
            "a^((p-2)/(p-1)) ||alpha_hat||_1 <= 1 + C/a",
            ratio,
            1.0 + L1_CORRECTION_CAP / result.a(),
            true,
        ),
    ])
}

/// The leading-order ratio along a sweep of `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1ScalingSweep {
    pub a: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Least-squares `C` in `ratio − 1 ≈ C/a`.
    pub fitted_c: f64,
    /// Smallest `C` with `ratio <= 1 + C/a` at every point.
    pub envelope_c: f64,
    pub checks: Vec<Check>,
}

/// Fits the correction constant and checks that the ratio approaches 1.
///
/// `results` must be sorted by increasing `a`.
pub fn l1_scaling_sweep(results: &[SolitonResult]) -> Result<L1ScalingSweep> {
    if let Some(r) = results.iter().find(|r| r.p() < 3) {
        return Err(Error::UnsupportedP(r.p()));
    }
    if results.windows(2).any(|w| w[1].a() <= w[0].a()) {
        return Err(Error::Domain("sweep must be sorted by increasing a".into()));
    }
    let a: Vec<f64> = results.iter().map(SolitonResult::a).collect();
    let ratio: Vec<f64> = results.iter().map(l1_scaling_ratio).collect();
    let num: f64 = a.iter().zip(&ratio).map(|(a, r)| (r - 1.0) / a).sum();
    let den: f64 = a.iter().map(|a| 1.0 / (a * a)).sum();
    let fitted_c = num / den;
    let envelope_c = a.iter().zip(&ratio).map(|(a, r)| (r - 1.0) * a).fold(f64::NEG_INFINITY, f64::max);
    let mut checks = Vec::new();
    for r in results {
        checks.extend(check_l1_scaling(r)?);
    }
    let dist: Vec<f64> = ratio.iter().map(|r| (r - 1.0).abs()).collect();
    let worst_growth = dist.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::below(
        "l1_ratio_converges",
        "|ratio - 1| strictly decreases along the sweep",
        worst_growth,
        0.0,
        false,
    ));
    checks.push(Check::below("l1_fitted_constant", "fitted C within the cap", envelope_c, L1_CORRECTION_CAP, true));
    Ok(L1ScalingSweep { a, ratio, fitted_c, envelope_c, checks })
}

fn potential(a: f64, p: u32, r: f64) -> f64 {
    a * r - r.powi(p as i32)
}

/// The summed first-order form `α(x+1) − α(x) = (x+1)⁻¹ Σ_{y<=x} V(α(y))`,
/// `V(r) = ar − rᵖ`, and the sign structure that makes `α` decrease.
pub fn check_monotone_mechanism(result: &SolitonResult) -> Vec<Check> {
    let (a, p) = (result.a(), result.p());
    let v = result.alpha.values();
    let n = v.len();
    let pot: Vec<f64> = v.iter().map(|&r| potential(a, p, r)).collect();

    let mut prefix = 0.0;
    let mut worst = 0.0f64;
    for x in 0..n - 1 {
        prefix += pot[x];
        let lhs = v[x + 1] - v[x];
        worst = worst.max((lhs - prefix / (x as f64 + 1.0)).abs());
    }

    let min_pot = pot[1..].iter().copied().fold(f64::INFINITY, f64::min);

    // Σ_{y<=x} V = Σ_{y<=X} V − Σ_{x<y<=X} V, with the full sum equal to
    // (X+1)(α(X+1) − α(X)) and α(X+1) dropped. Every term is negative, so
    // there is no cancellation.
    let x_max = n - 1;
    let mut suffix = 0.0;
    let mut max_partial = f64::NEG_INFINITY;
    for x in (0..n).rev() {
        let partial = -(x_max as f64 + 1.0) * v[x_max] - suffix;
        max_partial = max_partial.max(partial);
        suffix += pot[x];
    }

    let chain = result.s_star - b_minus(a, p);
    vec![
        Check::below(
            "summed_form",
            "alpha(x+1) - alpha(x) = (x+1)^-1 sum_{y<=x} V(alpha(y))",
            worst,
            SUMMED_FORM_TOL,
            true,
        ),
        Check::above("potential_positive", "V(alpha(x)) > 0 for x >= 1", min_pot, 0.0),
        Check::below("partial_sums_negative", "sum_{y<=x} V(alpha(y)) < 0 for all x", max_partial, 0.0, false),
        Check::below("hypothesis_chain", "s_minus(a) < b_minus(a)", chain, 0.0, false),
    ]
}

/// Least-squares fit of `log y(x) + k log x = log c₀ − c₁√x` on `window`,
/// given `log y`.
pub fn fit_log_profile(log_y: &[f64], window: (usize, usize), k: f64) -> Result<DecayFit> {
    let (lo, hi) = window;
    if lo == 0 || hi < lo || hi >= log_y.len() || hi - lo + 1 < MIN_FIT_POINTS {
        return Err(Error::FitWindowTooSmall(format!(
            "window [{lo}, {hi}] on {} sites; need at least {MIN_FIT_POINTS} points with x >= 1",
            log_y.len()
        )));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .map(|x| {
            let xf = x as f64;
            (xf.sqrt(), log_y[x] + k * xf.ln())
        })
        .collect();
    let m = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_t;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(DecayFit { c0: intercept.exp(), c1: -slope, residual: (rss / m).sqrt(), prefactor_power: k, window })
}

/// The fit window `[X/4, 3X/4]` for truncation `X`.
pub fn default_window(x_max: usize) -> (usize, usize) {
    ((x_max / 4).max(1), 3 * x_max / 4)
}

/// Decay fit of `α` on `[X/4, 3X/4]` with prefactor power `k`.
pub fn fit_decay(result: &SolitonResult, k: f64) -> Result<DecayFit> {
    let v = result.alpha.values();
    let window = default_window(result.truncation_len());
    if let Some(x) = (window.0..=window.1.min(v.len() - 1)).find(|&x| !(v[x] > 0.0)) {
        return Err(Error::Domain(format!("profile not positive at x = {x} inside the fit window")));
    }
    let logs: Vec<f64> = v.iter().map(|y| y.ln()).collect();
    fit_log_profile(&logs, window, k)
}

/// Decay fit of an eigenfunction profile on an explicit window.
pub fn fit_profile(profile: &EigenfunctionProfile, window: (usize, usize), k: f64) -> Result<DecayFit> {
    fit_log_profile(profile.log_values(), window, k)
}

/// `x⋆`, `q̄`, the envelope constant and the worst envelope ratio.
pub fn envelope(result: &SolitonResult) -> Result<(EnvelopeData, EigenfunctionProfile)> {
    let (a, p) = (result.a(), result.p());
    let v = result.alpha.values();
    let x_max = v.len() - 1;
    let pm1 = p as i32 - 1;
    // smallest x⋆ with α(y)^{p−1} < a/2 for every y > x⋆
    let x_star = (0..x_max).rev().find(|&x| v[x + 1].powi(pm1) >= a / 2.0).map_or(0, |x| x + 1);
    if x_star >= x_max {
        return Err(Error::FitWindowTooSmall(format!("x_star = {x_star} reaches the truncation")));
    }
    let q_bar = v[x_star + 1..].iter().fold(0.0f64, |m, &r| m.max(r.powi(pm1)));
    let shift = a - q_bar;
    let phi = laguerre_phi(shift, x_star)?;
    let psi = resolvent_psi(shift, x_max)?;
    let constant: f64 = (0..=x_star).map(|y| v[y].powi(p as i32) * phi.value(y)).sum();
    let max_ratio = (x_star + 1..=x_max)
        .map(|x| (v[x].ln() - constant.ln() - psi.log_value(x)).exp())
        .fold(f64::NEG_INFINITY, f64::max);
    let certified_tail = constant * psi_tail_l1_bound(shift, x_max)?;
    Ok((EnvelopeData { x_star, q_bar, constant, max_ratio, certified_tail }, psi))
}

/// Spatial decay: the envelope `α <= c ψ_{-(a−q̄)}` beyond `x⋆`, its
/// certified tail, and the fitted rate bracketed by same-window fits of
/// `ψ_{-(a−q̄)}` and `ψ_{-(a+ε)}`.
pub fn check_decay(result: &SolitonResult) -> Result<(DecayFit, EnvelopeData, Vec<Check>)> {
    let fit = fit_decay(result, DEFAULT_PREFACTOR_POWER)?;
    let (env, psi_shift) = envelope(result)?;
    let psi_fast = resolvent_psi(result.a() * (1.0 + DECAY_EPS), result.truncation_len())?;
    let slow = fit_profile(&psi_shift, fit.window, fit.prefactor_power)?;
    let fast = fit_profile(&psi_fast, fit.window, fit.prefactor_power)?;
    let checks = vec![
        Check::below("decay_envelope", "alpha(x) <= c psi_{-(a-q)}(x) beyond x_star", env.max_ratio, 1.0, true),
        Check::below("decay_envelope_tail", "c sum_{x>X} psi_{-(a-q)}(x)", env.certified_tail, TAIL_TOL, false),
        Check::new(
            "decay_rate_lower",
            "fitted c1 >= c1 of psi_{-(a-q)} on the same window",
            fit.c1 >= slow.c1,
            fit.c1,
            slow.c1,
            0.0,
        ),
        Check::new(
            "decay_rate_upper",
            "fitted c1 <= c1 of psi_{-(a+eps)} on the same window",
            fit.c1 <= fast.c1,
            fit.c1,
            fast.c1,
            0.0,
        ),
    ];
    Ok((fit, env, checks))
}

/// Runs every applicable check.
pub fn verify_all(result: &SolitonResult) -> VerificationReport {
    let mut report = VerificationReport::new(result.params);
    report.extend(check_shape(result));
    report.push(check_residual(result));
    report.push(check_bracket(result));
    report.extend(check_iteration(result));
    if result.p() >= 3 {
        if let Ok(checks) = check_l1_scaling(result) {
            report.extend(checks);
        }
    }
    report.extend(check_monotone_mechanism(result));
    match check_decay(result) {
        Ok((fit, env, checks)) => {
            report.decay_fit = Some(fit);
            report.decay_fit_half = fit_decay(result, 0.5).ok();
            report.envelope = Some(env);
            report.extend(checks);
        }
        Err(e) => report.push(Check::new("decay_fit", &e.to_string(), false, f64::NAN, f64::NAN, 0.0)),
    }
    report
}
