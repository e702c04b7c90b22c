//! The generalized eigenfunction `φ_{-a}` and the resolvent vector `ψ_{-a}`.
//!
//! Both are stored as natural logarithms. `φ_{-a}(x)` grows like
//! `e^{2√(ax)}` and `ψ_{-a}(x)` decays at the same rate, so the raw values
//! leave the floating range together once `ax` reaches about `1.2e5`; the
//! logs never do.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::exp_integral::scaled_exp_integral;
use super::quadrature::unit_interval_rule;
use crate::error::{ensure_positive, Error, Result};

const QUAD_TOL: f64 = 1e-12;
const MIN_PANELS: usize = 8;
const MAX_PANELS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Phi,
    Psi,
}

/// `φ_{-a}` or `ψ_{-a}` on the sites `0..=x_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionProfile {
    kind: ProfileKind,
    a: f64,
    log_values: Vec<f64>,
}

impl EigenfunctionProfile {
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Number of sites, `x_max + 1`.
    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    pub fn x_max(&self) -> usize {
        self.log_values.len() - 1
    }

    pub fn value(&self, x: usize) -> f64 {
        self.log_values[x].exp()
    }

    pub fn log_value(&self, x: usize) -> f64 {
        self.log_values[x]
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// Materialized values; entries past the floating range come out as
    /// `inf` (φ) or `0` (ψ).
    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|l| l.exp()).collect()
    }
}

/// `φ_{-a}(x) = Σ_k a^k/k! C(x,k)` for `0 <= x <= x_max`.
///
/// Evaluated with the forward recurrence
/// `(x+1)φ(x+1) = (2x+1+a)φ(x) − xφ(x−1)`, `φ(0) = 1`, `φ(1) = 1 + a`,
/// which is stable for this growing solution.
///
/// ```
/// let phi = ncsoliton::specfun::laguerre_phi(1.0, 2).unwrap();
/// assert_eq!(phi.values(), vec![1.0, 2.0, 3.5]);
/// ```
pub fn laguerre_phi(a: f64, x_max: usize) -> Result<EigenfunctionProfile> {
    ensure_positive("a", a)?;
    let log_values = log_laguerre_phi(a, x_max);
    if log_values[x_max] >= f64::MAX.ln() {
        let x = log_values.iter().position(|&l| l >= f64::MAX.ln()).unwrap_or(x_max);
        return Err(Error::Overflow { what: "phi_{-a}", x });
    }
    Ok(EigenfunctionProfile { kind: ProfileKind::Phi, a, log_values })
}

/// Overflow-free `ln φ_{-a}` via the ratio `ρ(x) = φ(x+1)/φ(x)`.
pub(crate) fn log_laguerre_phi(a: f64, x_max: usize) -> Vec<f64> {
    let mut logs = Vec::with_capacity(x_max + 1);
    logs.push(0.0);
    let mut ratio = 1.0 + a;
    for x in 0..x_max {
        if x > 0 {
            let xf = x as f64;
            ratio = ((2.0 * xf + 1.0 + a) - xf / ratio) / (xf + 1.0);
        }
        logs.push(logs[x] + ratio.ln());
    }
    logs
}

/// Raw forward recurrence for `L₀φ = λφ`, `φ(0) = 1`, for any real `λ`.
///
/// For `λ > 0` the solution oscillates and the values are only as accurate
/// as the recurrence allows; it is meant for small `x_max`.
pub fn laguerre_eigenfunction(lambda: f64, x_max: usize) -> Vec<f64> {
    let mut phi = Vec::with_capacity(x_max + 1);
    phi.push(1.0);
    if x_max >= 1 {
        phi.push(1.0 - lambda);
    }
    for x in 1..x_max {
        let xf = x as f64;
        let next = ((2.0 * xf + 1.0 - lambda) * phi[x] - xf * phi[x - 1]) / (xf + 1.0);
        phi.push(next);
    }
    phi
}

/// `ψ_{-a} = R_{-a} χ₀` from its positive integral representation.
///
/// With `t = 1/(1−s)`,
/// `ψ_{-a}(x) = ∫_0^1 s^x e^{-as/(1−s)} (1−s)^{-1} ds`, evaluated with
/// 64-point Gauss–Legendre panels, doubling the panel count until every
/// site agrees to `1e-12` relative. Each site is integrated in log-scaled
/// form, so nothing underflows.
///
/// ```
/// let psi = ncsoliton::specfun::resolvent_psi(1.0, 1).unwrap();
/// assert!((psi.value(0) - 0.596_347_362_323_194).abs() < 1e-14);
/// // boundary row of (L₀ + a)ψ = χ₀
/// assert!((psi.value(1) - (2.0 * psi.value(0) - 1.0)).abs() < 1e-14);
/// ```
pub fn resolvent_psi(a: f64, x_max: usize) -> Result<EigenfunctionProfile> {
    ensure_positive("a", a)?;
    let mut panels = MIN_PANELS;
    let mut prev = log_psi_quadrature(a, x_max, panels);
    loop {
        panels *= 2;
        if panels > MAX_PANELS {
            return Err(Error::Quadrature { what: "psi_{-a}", panels: MAX_PANELS });
        }
        let next = log_psi_quadrature(a, x_max, panels);
        let worst = prev.iter().zip(&next).map(|(p, n)| (p - n).abs()).fold(0.0, f64::max);
        if worst <= QUAD_TOL {
            return Ok(EigenfunctionProfile { kind: ProfileKind::Psi, a, log_values: next });
        }
        prev = next;
    }
}

fn log_psi_quadrature(a: f64, x_max: usize, panels: usize) -> Vec<f64> {
    let (nodes, weights) = unit_interval_rule(panels);
    let log_s: Vec<f64> = nodes.iter().map(|s| s.ln()).collect();
    // ln w − a s/(1−s) − ln(1−s)
    let base: Vec<f64> = nodes.iter().zip(&weights).map(|(&s, &w)| w.ln() - a * s / (1.0 - s) - (-s).ln_1p()).collect();
    let mut out = Vec::with_capacity(x_max + 1);
    let mut terms = vec![0.0; nodes.len()];
    for x in 0..=x_max {
        let xf = x as f64;
        let mut peak = f64::NEG_INFINITY;
        for (t, (ls, b)) in terms.iter_mut().zip(log_s.iter().zip(&base)) {
            *t = xf * ls + b;
            peak = peak.max(*t);
        }
        let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
        out.push(peak + sum.ln());
    }
    out
}

/// `ψ_{-a}` by Miller's backward recurrence, normalized to `ψ(0) = e^a E_1(a)`.
///
/// The ratios `r(x) = ψ(x)/ψ(x−1)` satisfy
/// `r(x) = x / ((2x+1+a) − (x+1) r(x+1))` and are started from zero far
/// enough out that the dominant solution's contamination is below round-off.
/// This is the cross-check for [`resolvent_psi`].
pub fn resolvent_psi_recurrence(a: f64, x_max: usize) -> Result<EigenfunctionProfile> {
    ensure_positive("a", a)?;
    let reach = (x_max as f64).sqrt() + 12.0 / a.sqrt();
    let start = (reach * reach).ceil() as usize + 20;
    let mut ratios = vec![0.0; x_max + 1];
    let mut r = 0.0;
    for x in (1..=start).rev() {
        let xf = x as f64;
        r = xf / ((2.0 * xf + 1.0 + a) - (xf + 1.0) * r);
        if x <= x_max {
            ratios[x] = r;
        }
    }
    let mut log_values = Vec::with_capacity(x_max + 1);
    log_values.push(scaled_exp_integral(1, a)?.ln());
    for x in 1..=x_max {
        log_values.push(log_values[x - 1] + ratios[x].ln());
    }
    Ok(EigenfunctionProfile { kind: ProfileKind::Psi, a, log_values })
}

/// Closed large-`x` form `e^{a/2} π^{1/2} (ax)^{-1/4} e^{-2√(ax)}` of `ψ_{-a}(x)`.
///
/// Used for choosing truncations and as a decay reference, never in place
/// of [`resolvent_psi`]. It lies above `ψ_{-a}` and the ratio tends to 1.
pub fn psi_tail_asymptote(a: f64, x: f64) -> Result<f64> {
    ensure_positive("a", a)?;
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("asymptote needs x >= 1, got {x}")));
    }
    Ok(log_psi_asymptote(a, x).exp())
}

fn log_psi_asymptote(a: f64, x: f64) -> f64 {
    0.5 * a + 0.5 * std::f64::consts::PI.ln() - 0.25 * (a * x).ln() - 2.0 * (a * x).sqrt()
}

/// Upper bound on `Σ_{x > X} ψ_{-a}(x)` from integrating the asymptote:
/// `∫_X^∞ e^{a/2}π^{1/2}(ay)^{-1/4}e^{-2√(ay)} dy ≤ e^{a/2}π^{1/2}(aX)^{-1/4}(z+1)e^{-z}/(2a)`
/// with `z = 2√(aX)`.
pub fn psi_tail_l1_bound(a: f64, x_max: usize) -> Result<f64> {
    ensure_positive("a", a)?;
    let x = x_max.max(1) as f64;
    let z = 2.0 * (a * x).sqrt();
    let log_bound =
        0.5 * a + 0.5 * std::f64::consts::PI.ln() - 0.25 * (a * x).ln() + (z + 1.0).ln() - z - (2.0 * a).ln();
    Ok(log_bound.exp())
}

/// Smallest `X` with `psi_tail_asymptote(a, X) < rel · ψ_{-a}(0)`.
pub fn truncation_for(a: f64, rel: f64) -> Result<usize> {
    ensure_positive("a", a)?;
    ensure_positive("rel", rel)?;
    let target = scaled_exp_integral(1, a)?.ln() + rel.ln();
    let below = |x: usize| log_psi_asymptote(a, x as f64) < target;
    let mut hi = 1usize;
    while !below(hi) {
        hi *= 2;
        if hi > 1 << 40 {
            return Err(Error::Domain(format!("no truncation reaches {rel:e} for a = {a}")));
        }
    }
    if hi == 1 {
        return Ok(1);
    }
    // invariant: !below(lo) && below(hi)
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The truncation prescribed for lattice profiles: asymptotic tail below
/// `1e-16 ψ_{-a}(0)`.
pub fn default_truncation(a: f64) -> Result<usize> {
    truncation_for(a, 1e-16)
}

type CacheKey = (u64, usize);

fn psi_cache() -> &'static Mutex<HashMap<CacheKey, Arc<EigenfunctionProfile>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<EigenfunctionProfile>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// [`resolvent_psi`] memoized on `(a, x_max)`.
pub fn cached_psi(a: f64, x_max: usize) -> Result<Arc<EigenfunctionProfile>> {
    let key = (a.to_bits(), x_max);
    if let Some(hit) = psi_cache().lock().expect("psi cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let profile = Arc::new(resolvent_psi(a, x_max)?);
    psi_cache().lock().expect("psi cache poisoned").insert(key, Arc::clone(&profile));
    Ok(profile)
}

pub(crate) fn phi_profile_unchecked(a: f64, x_max: usize) -> EigenfunctionProfile {
    EigenfunctionProfile { kind: ProfileKind::Phi, a, log_values: log_laguerre_phi(a, x_max) }
}
