//! Gauss–Legendre rules.

use std::sync::OnceLock;

/// Points per panel in the composite rules used by this crate.
pub const PANEL_ORDER: usize = 64;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on `P_n` from the Tricomi initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Three-term recurrence for P_n(z) and P_{n-1}(z).
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub(crate) fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Composite rule on `[0, 1]` with `panels` equal panels: `(nodes, weights)`.
pub(crate) fn unit_interval_rule(panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = panel_rule();
    let h = 1.0 / panels as f64;
    let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
    let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(gw) {
            nodes.push(mid + 0.5 * h * x);
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_symmetric() {
        for n in [1, 2, 5, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        let (x, w) = gauss_legendre(PANEL_ORDER);
        // ∫_{-1}^{1} t^126 dt = 2/127
        let q: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(126)).sum();
        assert!((q - 2.0 / 127.0).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_integrates_exponential() {
        let (s, w) = unit_interval_rule(4);
        let q: f64 = s.iter().zip(&w).map(|(s, w)| w * (-s).exp()).sum();
        assert!((q - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }
}
