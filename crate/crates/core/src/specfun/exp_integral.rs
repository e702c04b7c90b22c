//! Generalized exponential integrals `E_p(a) = ∫_1^∞ e^{-at} t^{-p} dt` for `a > 0`.
//!
//! Everything is computed in the scaled form `e^a E_p(a)`, which stays in
//! `[1/(a+p), 1/(a+p-1)]` and never under- or overflows.

use crate::error::{ensure_positive, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_TERMS: usize = 10_000;
const TINY: f64 = 1e-300;

/// Relative error allowed to accumulate in the upward recurrence before an
/// entry is recomputed directly.
pub const RECURRENCE_GUARD: f64 = 1e-8;

/// `E_p(a)`.
///
/// ```
/// let e1 = ncsoliton::specfun::exp_integral(1, 1.0).unwrap();
/// assert!((e1 - 0.219_383_934_395_520_3).abs() < 1e-15);
/// ```
pub fn exp_integral(p: u32, a: f64) -> Result<f64> {
    Ok(scaled_exp_integral(p, a)? * (-a).exp())
}

/// `e^a E_p(a)`.
pub fn scaled_exp_integral(p: u32, a: f64) -> Result<f64> {
    if p < 1 {
        return Err(Error::Domain(format!("exponential integral order must be >= 1, got {p}")));
    }
    ensure_positive("a", a)?;
    if a > 1.0 {
        Ok(continued_fraction(p, a))
    } else {
        Ok(series(p, a) * a.exp())
    }
}

/// Modified Lentz evaluation of the continued fraction for `e^a E_p(a)`.
fn continued_fraction(p: u32, a: f64) -> f64 {
    let nm1 = f64::from(p - 1);
    let mut b = a + f64::from(p);
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        let an = -fi * (nm1 + fi);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

/// Power series for `E_p(a)`, `0 < a <= 1`.
fn series(p: u32, a: f64) -> f64 {
    let nm1 = (p - 1) as usize;
    let mut ans = if nm1 != 0 { 1.0 / nm1 as f64 } else { -a.ln() - EULER_GAMMA };
    let mut fact = 1.0;
    for i in 1..MAX_TERMS {
        fact *= -a / i as f64;
        let del = if i != nm1 {
            -fact / (i as f64 - nm1 as f64)
        } else {
            let digamma = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
            fact * (-a.ln() + digamma)
        };
        ans += del;
        if del.abs() < ans.abs() * f64::EPSILON * 0.5 {
            break;
        }
    }
    ans
}

/// `E_1(a), …, E_len(a)` by upward recurrence `n E_{n+1} = e^{-a} − a E_n`.
///
/// Each step multiplies the relative error by `a E_n / (n E_{n+1})`; once the
/// accumulated estimate passes [`RECURRENCE_GUARD`] the entry is recomputed
/// directly and the estimate reset.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpIntegralTable {
    a: f64,
    scaled: Vec<f64>,
    recomputed: usize,
}

impl ExpIntegralTable {
    pub fn new(a: f64, len: usize) -> Result<Self> {
        ensure_positive("a", a)?;
        if len == 0 {
            return Err(Error::Domain("table length must be positive".into()));
        }
        let mut scaled = Vec::with_capacity(len);
        scaled.push(scaled_exp_integral(1, a)?);
        let mut err = f64::EPSILON;
        let mut recomputed = 0;
        for n in 1..len {
            let prev = scaled[n - 1];
            let next = (1.0 - a * prev) / n as f64;
            err = err * (a * prev / (n as f64 * next)).abs() + f64::EPSILON;
            if err > RECURRENCE_GUARD || !(next > 0.0) {
                scaled.push(scaled_exp_integral(n as u32 + 1, a)?);
                err = f64::EPSILON;
                recomputed += 1;
            } else {
                scaled.push(next);
            }
        }
        Ok(Self { a, scaled, recomputed })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn len(&self) -> usize {
        self.scaled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaled.is_empty()
    }

    /// Entry `k` is `E_{k+1}(a)`.
    pub fn values(&self) -> Vec<f64> {
        let decay = (-self.a).exp();
        self.scaled.iter().map(|v| v * decay).collect()
    }

    /// Entry `k` is `e^a E_{k+1}(a)`.
    pub fn scaled_values(&self) -> &[f64] {
        &self.scaled
    }

    /// How many entries the guard forced to be recomputed directly.
    pub fn recomputed(&self) -> usize {
        self.recomputed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        // E_1(1), E_2(1), E_1(0.5), E_1(10) from standard tables.
        let cases = [
            (1, 1.0, 0.219_383_934_395_520_27),
            (2, 1.0, 0.148_495_506_775_922_05),
            (1, 0.5, 0.559_773_594_776_160_8),
            (1, 10.0, 4.156_968_929_685_324e-6),
        ];
        for (p, a, want) in cases {
            let got = exp_integral(p, a).unwrap();
            assert!(((got - want) / want).abs() < 1e-13, "E_{p}({a}) = {got}, want {want}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(exp_integral(0, 1.0).is_err());
        assert!(exp_integral(1, 0.0).is_err());
        assert!(exp_integral(1, -2.0).is_err());
        assert!(exp_integral(1, f64::NAN).is_err());
    }

    #[test]
    fn series_and_fraction_agree_at_the_switch() {
        for p in 1..8 {
            let s = series(p, 1.0) * 1f64.exp();
            let c = continued_fraction(p, 1.0);
            assert!(((s - c) / c).abs() < 1e-13, "p = {p}: {s} vs {c}");
        }
    }

    #[test]
    fn large_argument_asymptotics() {
        // e^a E_1(a) a → 1
        let mut prev = f64::INFINITY;
        for a in [10.0, 100.0, 1e3, 1e4] {
            let dev = (scaled_exp_integral(1, a).unwrap() * a - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn table_matches_direct_evaluation() {
        for a in [0.1, 1.0, 10.0] {
            let table = ExpIntegralTable::new(a, 60).unwrap();
            for (k, &v) in table.scaled_values().iter().enumerate() {
                let direct = scaled_exp_integral(k as u32 + 1, a).unwrap();
                assert!(((v - direct) / direct).abs() < 1e-7, "a = {a}, n = {}", k + 1);
            }
        }
    }

    #[test]
    fn guard_triggers_where_recurrence_amplifies() {
        // For n < a each step amplifies errors by about a/n.
        assert!(ExpIntegralTable::new(60.0, 60).unwrap().recomputed() > 0);
        assert_eq!(ExpIntegralTable::new(0.1, 60).unwrap().recomputed(), 0);
    }
}
