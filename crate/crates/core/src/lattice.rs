//! Finite truncations of sequences on the half-lattice.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalars a [`LatticeVector`] can hold.
pub trait Scalar: Copy + Default + PartialEq + std::fmt::Debug + Send + Sync {
    fn magnitude(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    #[inline]
    fn magnitude(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn magnitude(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Values on the sites `0..=X` plus an ℓ¹ bound on everything beyond `X`.
///
/// `X` is the truncation length; the vector holds `X + 1` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct LatticeVector<T = f64> {
    values: Vec<T>,
    #[serde(default)]
    tail_bound: f64,
}

impl<T: Scalar> LatticeVector<T> {
    /// Wraps `values`, rejecting non-finite entries and empty input.
    pub fn new(values: Vec<T>) -> Result<Self> {
        Self::with_tail(values, 0.0)
    }

    pub fn with_tail(values: Vec<T>, tail_bound: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("lattice vector needs at least one site".into()));
        }
        if let Some(x) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite entry at site {x}")));
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::Domain(format!("tail bound must be >= 0, got {tail_bound}")));
        }
        Ok(Self { values, tail_bound })
    }

    /// All-zero vector on `0..=truncation_len`.
    pub fn zeros(truncation_len: usize) -> Self {
        Self { values: vec![T::default(); truncation_len + 1], tail_bound: 0.0 }
    }

    /// The unit vector supported on site `x`.
    pub fn unit(x: usize, truncation_len: usize, one: T) -> Self {
        let mut v = Self::zeros(truncation_len);
        v.values[x] = one;
        v
    }

    pub(crate) fn from_parts_unchecked(values: Vec<T>, tail_bound: f64) -> Self {
        debug_assert!(!values.is_empty());
        Self { values, tail_bound }
    }

    /// Number of stored sites, `X + 1`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The last stored site `X`.
    pub fn truncation_len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn set_tail_bound(&mut self, bound: f64) {
        self.tail_bound = bound.max(0.0);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.values.iter()
    }

    /// ℓ¹ norm of the stored sites (the tail bound is not included).
    pub fn norm_l1(&self) -> f64 {
        self.values.iter().map(|v| v.magnitude()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v.magnitude().powi(2)).sum::<f64>().sqrt()
    }

    pub fn norm_sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.magnitude()))
    }

    /// The same values on `0..=truncation_len`, zero beyond the current
    /// truncation. The tail bound is kept, so it still covers the mass
    /// that was never stored.
    pub fn zero_extended(&self, truncation_len: usize) -> Result<Self> {
        if truncation_len < self.truncation_len() {
            return Err(Error::Domain(format!(
                "cannot extend truncation {} down to {truncation_len}",
                self.truncation_len()
            )));
        }
        let mut values = self.values.clone();
        values.resize(truncation_len + 1, T::default());
        Ok(Self { values, tail_bound: self.tail_bound })
    }

    /// `P v`: the same vector with site 0 zeroed.
    pub fn hat(&self) -> Self {
        let mut out = self.clone();
        out.values[0] = T::default();
        out
    }

    pub(crate) fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch(self.len(), other.len()))
        }
    }
}

impl LatticeVector<f64> {
    /// Pointwise `v(x)^p`. The tail bound is carried over as a bound on
    /// `Σ|v|^p`, valid when the tail entries are at most 1 in magnitude.
    pub fn powi(&self, p: u32) -> Self {
        let values = self.values.iter().map(|v| v.powi(p as i32)).collect();
        Self { values, tail_bound: self.tail_bound }
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_len(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { values, tail_bound: self.tail_bound.max(other.tail_bound) })
    }

    /// `self - other` entrywise.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_len(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { values, tail_bound: self.tail_bound + other.tail_bound })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| c * v).collect(), tail_bound: c.abs() * self.tail_bound }
    }

    pub fn to_complex(&self) -> LatticeVector<Complex64> {
        LatticeVector {
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            tail_bound: self.tail_bound,
        }
    }
}

impl<T> Index<usize> for LatticeVector<T> {
    type Output = T;
    fn index(&self, x: usize) -> &T {
        &self.values[x]
    }
}

impl<T> IndexMut<usize> for LatticeVector<T> {
    fn index_mut(&mut self, x: usize) -> &mut T {
        &mut self.values[x]
    }
}
