//! The Jacobi operator
//! `(L₀v)(x) = −(x+1)v(x+1) + (2x+1)v(x) − x v(x−1)` on the half-lattice and
//! its resolvent `R_{-a} = (L₀ + a)^{-1}`.
//!
//! The resolvent kernel is `R_{-a}(x₁, x₂) = φ_{-a}(min) ψ_{-a}(max)`, with the
//! pair normalized so that `(x+1)[φ(x+1)ψ(x) − φ(x)ψ(x+1)] = 1`. Applying it
//! costs O(X) through running sums taken in ratio form, so no entry of `φ`
//! or `ψ` is ever materialized on its own.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{ensure_positive, Error, Result};
use crate::lattice::LatticeVector;
use crate::specfun::{cached_psi, phi_profile_unchecked, psi_tail_l1_bound, EigenfunctionProfile};

/// Relative tolerance of the kernel normalization check in [`build_kernel`].
pub const WRONSKIAN_TOL: f64 = 1e-10;

/// Fraction of `‖v‖_∞` above which mass at the last site draws a warning.
const EDGE_MASS_WARN: f64 = 1e-12;

/// `L₀v` on the sites `0..X−1`.
///
/// Row `X` would read `v(X+1)`, which is not stored, so it is dropped; its
/// value under the zero extension, `(2X+1)v(X) − Xv(X−1)`, is returned as the
/// tail bound of the output. A nonzero bound means `v` has mass where the
/// truncation matters.
///
/// ```
/// use ncsoliton::{operator::apply_l0, LatticeVector};
/// let chi0 = LatticeVector::unit(0, 4, 1.0);
/// assert_eq!(apply_l0(&chi0).values(), &[1.0, -1.0, 0.0, 0.0]);
/// ```
pub fn apply_l0(v: &LatticeVector<f64>) -> LatticeVector<f64> {
    let x_max = v.truncation_len();
    let at = |x: usize| if x <= x_max { v[x] } else { 0.0 };
    let row = |x: usize| {
        let xf = x as f64;
        let left = if x > 0 { xf * at(x - 1) } else { 0.0 };
        -(xf + 1.0) * at(x + 1) + (2.0 * xf + 1.0) * at(x) - left
    };
    let rows = x_max.max(1);
    let values: Vec<f64> = (0..rows).map(row).collect();
    let dropped = if x_max >= 1 { row(x_max).abs() } else { 0.0 };
    LatticeVector::from_parts_unchecked(values, dropped)
}

/// `(φ_{-a}, ψ_{-a})` on `0..=X`, normalized and ready to apply.
#[derive(Debug, Clone)]
pub struct ResolventKernel {
    a: f64,
    phi: EigenfunctionProfile,
    psi: EigenfunctionProfile,
    truncation_len: usize,
    psi_tail: f64,
    wronskian_dev: f64,
}

impl ResolventKernel {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn phi(&self) -> &EigenfunctionProfile {
        &self.phi
    }

    pub fn psi(&self) -> &EigenfunctionProfile {
        &self.psi
    }

    pub fn truncation_len(&self) -> usize {
        self.truncation_len
    }

    /// Certified bound on `Σ_{x>X} ψ_{-a}(x)`.
    pub fn psi_tail_bound(&self) -> f64 {
        self.psi_tail
    }

    /// Largest relative deviation of the normalization seen at construction.
    pub fn wronskian_deviation(&self) -> f64 {
        self.wronskian_dev
    }

    /// `R_{-a}(x₁, x₂)`, formed in log space.
    pub fn entry(&self, x1: usize, x2: usize) -> f64 {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        (self.phi.log_value(lo) + self.psi.log_value(hi)).exp()
    }

    /// `ψ_{-a}` as a lattice vector, with its certified tail.
    pub fn psi_vector(&self) -> LatticeVector<f64> {
        LatticeVector::from_parts_unchecked(self.psi.values(), self.psi_tail)
    }

    /// `(x+1)[φ(x+1)ψ(x) − φ(x)ψ(x+1)]` for `0 <= x < X`.
    pub fn wronskian(&self) -> Vec<f64> {
        wronskian_products(&self.phi, &self.psi)
    }
}

fn wronskian_products(phi: &EigenfunctionProfile, psi: &EigenfunctionProfile) -> Vec<f64> {
    (0..phi.len() - 1)
        .map(|x| {
            let up = (phi.log_value(x + 1) + psi.log_value(x)).exp();
            let down = (phi.log_value(x) + psi.log_value(x + 1)).exp();
            (x as f64 + 1.0) * (up - down)
        })
        .collect()
}

/// Builds the kernel for `R_{-a}` on `0..=X` and checks its normalization
/// at every site.
///
/// Both profiles are held as logarithms, so large `a·X` does not overflow.
pub fn build_kernel(a: f64, x_max: usize) -> Result<ResolventKernel> {
    ensure_positive("a", a)?;
    if x_max < 1 {
        return Err(Error::Domain("kernel needs X >= 1".into()));
    }
    let phi = phi_profile_unchecked(a, x_max);
    let psi = (*cached_psi(a, x_max)?).clone();
    let mut worst = 0.0f64;
    for (x, w) in wronskian_products(&phi, &psi).into_iter().enumerate() {
        let dev = (w - 1.0).abs();
        if !(dev <= WRONSKIAN_TOL) {
            return Err(Error::Wronskian { x, value: w });
        }
        worst = worst.max(dev);
    }
    Ok(ResolventKernel {
        a,
        phi,
        psi,
        truncation_len: x_max,
        psi_tail: psi_tail_l1_bound(a, x_max)?,
        wronskian_dev: worst,
    })
}

/// `R_{-a} v`.
///
/// `(Rv)(x) = φ(x)ψ(x)[A(x) + B(x)]` with
/// `A(x) = Σ_{y≤x} (φ(y)/φ(x)) v(y)` and `B(x) = Σ_{y>x} (ψ(y)/ψ(x)) v(y)`;
/// every ratio is at most 1, so both sums are accumulated without overflow.
///
/// The output tail bound covers the part of `v` beyond `X` (through
/// `‖R_{-a}‖_{1→1} = a⁻¹`) and the mass `R_{-a}v` places beyond `X`.
pub fn apply_resolvent(k: &ResolventKernel, v: &LatticeVector<f64>) -> Result<LatticeVector<f64>> {
    let n = k.truncation_len + 1;
    if v.len() != n {
        return Err(Error::LengthMismatch(n, v.len()));
    }
    let vals = v.values();
    let sup = v.norm_sup();
    if sup > 0.0 && vals[n - 1].abs() > EDGE_MASS_WARN * sup {
        log::warn!("resolvent input has mass {:e} at the truncation edge X = {}", vals[n - 1].abs(), k.truncation_len);
    }
    let lphi = k.phi.log_values();
    let lpsi = k.psi.log_values();

    let mut prefix = vec![0.0; n];
    let mut acc = 0.0;
    for x in 0..n {
        if x > 0 {
            acc *= (lphi[x - 1] - lphi[x]).exp();
        }
        acc += vals[x];
        prefix[x] = acc;
    }
    let mut out = vec![0.0; n];
    let mut suffix = 0.0;
    for x in (0..n).rev() {
        if x + 1 < n {
            suffix = (suffix + vals[x + 1]) * (lpsi[x + 1] - lpsi[x]).exp();
        }
        out[x] = (lphi[x] + lpsi[x]).exp() * (prefix[x] + suffix);
    }
    let beyond = prefix[n - 1].abs() * (lphi[n - 1] + k.psi_tail.ln()).exp();
    let tail = v.tail_bound() / k.a + beyond;
    Ok(LatticeVector::from_parts_unchecked(out, tail))
}

/// `P R_{-a} v`: the resolvent with site 0 zeroed.
pub fn projected_resolvent(k: &ResolventKernel, v: &LatticeVector<f64>) -> Result<LatticeVector<f64>> {
    let mut out = apply_resolvent(k, v)?;
    out[0] = 0.0;
    Ok(out)
}

/// The `n × n` section of `L₀` (sites `0..n−1`).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Entry `x` couples sites `x` and `x+1`.
    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in self.diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        for (i, &e) in self.off.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        m
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::LengthMismatch(n, v.len()));
        }
        Ok((0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect())
    }

    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_dense()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Full decomposition `(eigenvalues, eigenvectors as columns)`, unsorted.
    pub fn eigen(&self) -> (DVector<f64>, DMatrix<f64>) {
        let e = SymmetricEigen::new(self.to_dense());
        (e.eigenvalues, e.eigenvectors)
    }
}

/// Diagonal `2x+1`, off-diagonal `−(x+1)`, on sites `0..n−1`.
///
/// ```
/// let m = ncsoliton::operator::truncated_matrix(2).unwrap();
/// assert_eq!(m.diagonal(), &[1.0, 3.0]);
/// assert_eq!(m.off_diagonal(), &[-1.0]);
/// ```
pub fn truncated_matrix(n: usize) -> Result<TridiagonalMatrix> {
    if n < 2 {
        return Err(Error::Domain(format!("truncated matrix needs dimension >= 2, got {n}")));
    }
    Ok(TridiagonalMatrix {
        diag: (0..n).map(|x| 2.0 * x as f64 + 1.0).collect(),
        off: (0..n - 1).map(|x| -(x as f64 + 1.0)).collect(),
    })
}

/// Sorted eigenvalues of the `n × n` section.
pub fn spectrum(n: usize) -> Result<Vec<f64>> {
    Ok(truncated_matrix(n)?.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::laguerre_phi;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plus_a(a: f64, v: &LatticeVector<f64>) -> Vec<f64> {
        apply_l0(v).values().iter().zip(v.values()).map(|(l, v)| l + a * v).collect()
    }

    #[test]
    fn l0_on_unit_vector() {
        let e0 = LatticeVector::unit(0, 5, 1.0);
        let out = apply_l0(&e0);
        assert_eq!(out.values(), &[1.0, -1.0, 0.0, 0.0, 0.0]);
        assert_eq!(out.tail_bound(), 0.0);
        let edge = apply_l0(&LatticeVector::unit(5, 5, 1.0));
        assert_eq!(edge.tail_bound(), 11.0);
    }

    #[test]
    fn phi_is_a_generalized_eigenfunction() {
        for a in [0.5, 1.0, 5.0, 20.0] {
            let phi = LatticeVector::new(laguerre_phi(a, 60).unwrap().values()).unwrap();
            let res = plus_a(a, &phi);
            let rel = res.iter().fold(0.0f64, |m, r| m.max(r.abs())) / phi.norm_sup();
            assert!(rel < 1e-10, "a = {a}: {rel:e}");
        }
    }

    #[test]
    fn psi_solves_the_boundary_problem() {
        let k = build_kernel(1.0, 80).unwrap();
        let res = plus_a(1.0, &k.psi_vector());
        assert!((res[0] - 1.0).abs() < 1e-13);
        assert!(res[1..].iter().all(|r| r.abs() < 1e-13));
    }

    #[test]
    fn kernel_normalization() {
        for a in [1.0, 10.0] {
            let k = build_kernel(a, 500).unwrap();
            assert!(k.wronskian().iter().all(|w| (w - 1.0).abs() < 1e-10));
        }
        // x = 0 by hand: 2ψ(0) − ψ(1)
        let k = build_kernel(1.0, 4).unwrap();
        let w0 = 2.0 * k.psi().value(0) - k.psi().value(1);
        assert!((w0 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn large_a_kernel_does_not_overflow() {
        let k = build_kernel(100.0, 3000).unwrap();
        assert!(k.entry(3000, 3000).is_finite());
        assert!(k.entry(0, 3000) >= 0.0);
    }

    #[test]
    fn resolvent_of_chi0_is_psi() {
        let k = build_kernel(2.0, 60).unwrap();
        let r = apply_resolvent(&k, &LatticeVector::unit(0, 60, 1.0)).unwrap();
        for x in 0..=60 {
            assert!((r[x] - k.psi().value(x)).abs() <= 1e-14 * k.psi().value(x).max(1e-300));
        }
        let hat = projected_resolvent(&k, &LatticeVector::unit(0, 60, 1.0)).unwrap();
        assert_eq!(hat[0], 0.0);
        assert_eq!(hat[1], r[1]);
    }

    #[test]
    fn resolvent_inverts_l0_plus_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = 1.5;
        let x_max = 120;
        let k = build_kernel(a, x_max).unwrap();
        for _ in 0..20 {
            let mut w = vec![0.0; x_max + 1];
            for wx in w.iter_mut().take(30) {
                *wx = rng.random_range(-1.0..1.0);
            }
            let w = LatticeVector::new(w).unwrap();
            let mut v = plus_a(a, &w);
            v.push(0.0);
            let back = apply_resolvent(&k, &LatticeVector::new(v).unwrap()).unwrap();
            for x in 0..=x_max {
                assert!((back[x] - w[x]).abs() < 1e-10, "x = {x}");
            }
        }
    }

    #[test]
    fn resolvent_is_an_l1_contraction_on_nonnegative_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k = build_kernel(0.7, 200).unwrap();
        for _ in 0..50 {
            let v: Vec<f64> = (0..=200).map(|x| if x < 100 { rng.random::<f64>() } else { 0.0 }).collect();
            let v = LatticeVector::new(v).unwrap();
            let r = apply_resolvent(&k, &v).unwrap();
            assert!(r.norm_l1() <= v.norm_l1() / 0.7);
            assert!(r.iter().all(|&y| y > 0.0));
        }
    }

    #[test]
    fn psi_hat_norm_bound() {
        for a in [0.5, 1.0, 5.0] {
            let x_max = crate::specfun::default_truncation(a).unwrap();
            let k = build_kernel(a, x_max).unwrap();
            let hat = projected_resolvent(&k, &LatticeVector::unit(0, x_max, 1.0)).unwrap();
            assert!(hat.norm_l1() + hat.tail_bound() < 1.0 / (a * (a + 1.0)));
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let k = build_kernel(1.0, 10).unwrap();
        assert!(matches!(apply_resolvent(&k, &LatticeVector::zeros(9)), Err(Error::LengthMismatch(11, 10))));
    }

    #[test]
    fn matrix_matches_operator() {
        let m = truncated_matrix(2).unwrap();
        assert_eq!(m.to_dense(), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 3.0]));
        assert!(truncated_matrix(1).is_err());

        let m = truncated_matrix(12).unwrap();
        let dense = m.to_dense();
        assert_eq!(dense, dense.transpose());
        let v: Vec<f64> = (0..12).map(|x| ((x * 7 % 5) as f64) - 2.0).collect();
        let mv = m.matvec(&v).unwrap();
        let l0 = apply_l0(&LatticeVector::new(v).unwrap());
        assert_eq!(&mv[..11], l0.values());
    }

    #[test]
    fn spectrum_is_nonnegative_and_bottom_approaches_zero() {
        let mut prev = f64::INFINITY;
        for n in [50, 200, 800] {
            let ev = spectrum(n).unwrap();
            assert!(ev[0] > 0.0);
            assert!(ev[0] < prev);
            prev = ev[0];
        }
        assert!(prev < 1e-2);
    }
}
