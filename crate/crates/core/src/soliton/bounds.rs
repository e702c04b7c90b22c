//! The scalar majorant of the tail iteration and the regime thresholds.
//!
//! `s_{n+1} = h(a, s_n)` with `h(a, s) = a⁻¹r(a) + a⁻¹sᵖ`, `r(a) = (a+1)^{1/(p−1)}`,
//! bounds `‖u_n‖₁` from above. Its fixed points are the roots of
//! `g(a, s) = h(a, s) − s`, which is convex in `s` with minimum at
//! `s_min(a) = (a/p)^{1/(p−1)}`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

fn inv_pm1(p: u32) -> f64 {
    1.0 / (p as f64 - 1.0)
}

/// `r(a) = (a+1)^{1/(p−1)}`.
pub fn r(a: f64, p: u32) -> f64 {
    (a + 1.0).powf(inv_pm1(p))
}

/// `h(a, s) = a⁻¹r(a) + a⁻¹sᵖ`.
pub fn h(a: f64, p: u32, s: f64) -> f64 {
    (r(a, p) + s.powi(p as i32)) / a
}

/// `g(a, s) = h(a, s) − s`.
pub fn g(a: f64, p: u32, s: f64) -> f64 {
    h(a, p, s) - s
}

/// `∂ₛh(a, s) = p sᵖ⁻¹ / a`.
pub fn dh_ds(a: f64, p: u32, s: f64) -> f64 {
    p as f64 * s.powi(p as i32 - 1) / a
}

pub fn s_min(a: f64, p: u32) -> f64 {
    (a / p as f64).powf(inv_pm1(p))
}

/// Lower end of the boundary-value interval, `a^{1/(p−1)}`.
pub fn b_minus(a: f64, p: u32) -> f64 {
    a.powf(inv_pm1(p))
}

/// Upper end of the boundary-value interval, `(a+1)^{1/(p−1)}`.
pub fn b_plus(a: f64, p: u32) -> f64 {
    r(a, p)
}

/// Bisection to floating-point resolution for `f(lo) > 0 > f(hi)` or the
/// reverse.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let lo_positive = f(lo) > 0.0;
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The two fixed points of `h(a, ·)` and the minimizer of `g(a, ·)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSequence {
    pub a: f64,
    pub p: u32,
    pub s_minus: f64,
    pub s_plus: f64,
    pub s_min: f64,
}

impl BoundSequence {
    /// `s_0 = 0, s_1, …` until two successive terms differ by at most `tol`
    /// or `max_terms` are produced.
    pub fn iterate(&self, tol: f64, max_terms: usize) -> Vec<f64> {
        let mut seq = vec![0.0];
        while seq.len() < max_terms {
            let last = *seq.last().unwrap();
            let next = h(self.a, self.p, last);
            seq.push(next);
            if (next - last).abs() <= tol {
                break;
            }
        }
        seq
    }
}

/// `s₋ < s_min < s₊` with `g(a, s±) = 0`.
///
/// Fails with [`Error::NoTwoRoots`] when `g(a, s_min) >= 0`, i.e. `a <= a₀`.
///
/// ```
/// let b = ncsoliton::soliton::bound_fixed_points(10.0, 3).unwrap();
/// assert!((b.s_minus - 0.335_43).abs() < 1e-5);
/// ```
pub fn bound_fixed_points(a: f64, p: u32) -> Result<BoundSequence> {
    ensure_positive("a", a)?;
    if p < 2 {
        return Err(Error::Domain(format!("p must be >= 2, got {p}")));
    }
    let sm = s_min(a, p);
    if !(g(a, p, sm) < 0.0) {
        return Err(Error::NoTwoRoots { a, p });
    }
    let f = |s| g(a, p, s);
    let s_minus = bisect(f, 0.0, sm);
    let mut upper = 2.0 * sm;
    while f(upper) <= 0.0 {
        upper *= 2.0;
    }
    let s_plus = bisect(f, sm, upper);
    Ok(BoundSequence { a, p, s_minus, s_plus, s_min: sm })
}

/// Regime markers for a given `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub p: u32,
    /// Below `a0` the majorant has no fixed point.
    pub a0: f64,
    /// From the sufficient condition `s₋(a) < b₋(a)`; an upper bound on the
    /// sharp value.
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub mu_star: f64,
    pub a1_is_upper_bound: bool,
}

/// `G(a) = g(a, s_min(a)) = a⁻¹(a+1)^{1/(p−1)} − (a/p)^{1/(p−1)}(1 − 1/p)`,
/// strictly decreasing in `a`.
pub fn g_at_s_min(a: f64, p: u32) -> f64 {
    g(a, p, s_min(a, p))
}

fn first_sign_change(pred: impl Fn(f64) -> bool, start: f64, step: f64, max_steps: usize) -> Option<(f64, f64)> {
    let mut prev = start;
    for k in 1..=max_steps {
        let next = start * step.powi(k as i32);
        if pred(next) {
            return Some((prev, next));
        }
        prev = next;
    }
    None
}

/// `a₀`, `a₁`, `a₂ = (p−1)⁻¹`, `a₃ = max{a₁, a₂}` and `μ⋆`.
///
/// ```
/// let t = ncsoliton::soliton::compute_thresholds(3).unwrap();
/// assert!((t.a0 - 3.0).abs() < 1e-12);
/// assert_eq!(t.a2, 0.5);
/// ```
pub fn compute_thresholds(p: u32) -> Result<Thresholds> {
    if p < 2 {
        return Err(Error::Domain(format!("p must be >= 2, got {p}")));
    }
    let mut lo = 1e-3;
    while g_at_s_min(lo, p) <= 0.0 {
        lo *= 0.5;
    }
    let mut hi = 1.0;
    while g_at_s_min(hi, p) >= 0.0 {
        hi *= 2.0;
    }
    let a0 = bisect(|a| g_at_s_min(a, p), lo, hi);

    // s₋(a) < b₋(a), evaluated strictly above a₀ where s₋ exists.
    let holds = |a: f64| match bound_fixed_points(a, p) {
        Ok(b) => b.s_minus < b_minus(a, p),
        Err(_) => false,
    };
    let above = a0 * (1.0 + 1e-12);
    let a1 = if holds(above) {
        a0
    } else {
        let (lo, hi) = first_sign_change(holds, above, 1.05, 2000)
            .ok_or_else(|| Error::Domain(format!("no a1 found for p = {p}")))?;
        bisect(|a| if holds(a) { -1.0 } else { 1.0 }, lo, hi)
    };
    let a2 = 1.0 / (p as f64 - 1.0);
    let a3 = a1.max(a2);
    // μ⋆ is the smallest μ >= a3 at which the same predicate holds.
    let mu_star = if holds(a3.max(above)) {
        a3
    } else {
        let (lo, hi) = first_sign_change(holds, a3, 1.05, 2000)
            .ok_or_else(|| Error::Domain(format!("no mu_star found for p = {p}")))?;
        bisect(|a| if holds(a) { -1.0 } else { 1.0 }, lo, hi)
    };
    Ok(Thresholds { p, a0, a1, a2, a3, mu_star, a1_is_upper_bound: true })
}
