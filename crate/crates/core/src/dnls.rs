//! Time evolution of `i∂ₜw = L₀w − |w|^{p−1}w` on the truncated lattice.
//!
//! Strang splitting: a half-step of the pointwise phase rotation
//! `w ← w·exp(i·dt/2·|w|^{p−1})`, the exact linear step
//! `w ← exp(−i·dt·L₀)w` from the eigendecomposition of the truncated matrix,
//! and another half-step of the rotation. Both substeps are unitary, so the
//! ℓ² norm is conserved up to round-off.
//!
//! With `L₀α = −μα + αᵖ` the orbit is `w(t) = e^{iμt}α`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::operator::truncated_matrix;

/// Default threshold on `|w(X)| / ‖w‖_∞` during a run.
pub const DEFAULT_LEAK_TOL: f64 = 1e-8;

/// Initial data must satisfy `|w(X)| <= INITIAL_EDGE_TOL · ‖w‖_∞` (or the
/// run's leak threshold, if tighter).
pub const INITIAL_EDGE_TOL: f64 = 1e-12;

/// Largest phase increment between two samples that is still unwrapped.
pub const PHASE_JUMP_LIMIT: f64 = FRAC_PI_2;

/// Eigendecomposition of the `n × n` section of `L₀`, shareable across
/// propagators with the same `n`.
#[derive(Debug, Clone)]
pub struct Spectral {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl Spectral {
    pub fn new(n_sites: usize) -> Result<Arc<Self>> {
        let (eigenvalues, eigenvectors) = truncated_matrix(n_sites)?.eigen();
        Ok(Arc::new(Self { eigenvalues, eigenvectors }))
    }

    pub fn n_sites(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }
}

/// `exp(−i·dt·L₀)` on the truncated lattice, with `dt` of either sign.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectral: Arc<Spectral>,
    dt: f64,
    matrix: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(spectral: Arc<Spectral>, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::Domain(format!("time step must be finite and nonzero, got {dt}")));
        }
        let v = &spectral.eigenvectors;
        let n = spectral.n_sites();
        let phases: Vec<Complex64> =
            spectral.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * dt)).collect();
        let mut scaled = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] = phases[j] * v[(i, j)];
            }
        }
        let vt = v.transpose().map(|x| Complex64::new(x, 0.0));
        Ok(Self { spectral, dt, matrix: scaled * vt })
    }

    /// The propagator for `X + 1` sites.
    pub fn for_truncation(x_max: usize, dt: f64) -> Result<Self> {
        Self::new(Spectral::new(x_max + 1)?, dt)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_sites(&self) -> usize {
        self.spectral.n_sites()
    }

    /// `exp(+i·dt·L₀)`, undoing one step of `self`.
    pub fn reversed(&self) -> Self {
        // exp(−i dt L₀) is complex symmetric, so its inverse is its conjugate.
        Self { spectral: Arc::clone(&self.spectral), dt: -self.dt, matrix: self.matrix.map(|z| z.conj()) }
    }

    pub fn apply(&self, w: &mut [Complex64]) {
        let v = DVector::from_column_slice(w);
        let out = &self.matrix * v;
        w.copy_from_slice(out.as_slice());
    }
}

/// A state of the evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionState {
    pub w: LatticeVector<Complex64>,
    pub t: f64,
    /// Nonlinearity power `p = 2σ + 1`.
    pub power: u32,
    pub linear_only: bool,
    pub ell2_initial: f64,
    pub ell2_current: f64,
    pub leak_tol: f64,
}

impl EvolutionState {
    /// Starts at `t = 0`. Even `p` is accepted only for real data, where
    /// `|w|^{p−1}w` and `wᵖ` agree on positive profiles.
    pub fn new(w: LatticeVector<Complex64>, power: u32) -> Result<Self> {
        if power < 2 {
            return Err(Error::Domain(format!("p must be >= 2, got {power}")));
        }
        if power % 2 == 0 && w.iter().any(|z| z.im != 0.0) {
            return Err(Error::Domain(format!("even p = {power} requires real initial data")));
        }
        let ell2 = w.norm_l2();
        Ok(Self {
            w,
            t: 0.0,
            power,
            linear_only: false,
            ell2_initial: ell2,
            ell2_current: ell2,
            leak_tol: DEFAULT_LEAK_TOL,
        })
    }

    pub fn linear(mut self) -> Self {
        self.linear_only = true;
        self
    }

    pub fn with_leak_tol(mut self, leak_tol: f64) -> Self {
        self.leak_tol = leak_tol;
        self
    }

    /// `σ = (p − 1)/2`.
    pub fn sigma(&self) -> f64 {
        (self.power as f64 - 1.0) / 2.0
    }

    /// `|‖w(t)‖ − ‖w(0)‖| / ‖w(0)‖`.
    pub fn ell2_drift(&self) -> f64 {
        (self.ell2_current - self.ell2_initial).abs() / self.ell2_initial
    }

    /// [`Error::TailLeak`] if `|w(X)| > leak_tol · ‖w‖_∞`.
    pub fn check_leak(&self) -> Result<()> {
        self.check_edge(self.leak_tol)
    }

    fn check_edge(&self, tol: f64) -> Result<()> {
        let sup = self.w.norm_sup();
        let edge = self.w[self.w.truncation_len()].norm();
        if sup > 0.0 && edge > tol * sup {
            return Err(Error::TailLeak { edge, t: self.t });
        }
        Ok(())
    }

    fn rotate(&mut self, tau: f64) {
        if self.linear_only {
            return;
        }
        let k = self.power as i32 - 1;
        for z in self.w.values_mut() {
            *z *= Complex64::from_polar(1.0, tau * z.norm().powi(k));
        }
    }

    /// One Strang step of length `prop.dt()`.
    pub fn step(&mut self, prop: &Propagator) -> Result<()> {
        if prop.n_sites() != self.w.len() {
            return Err(Error::LengthMismatch(prop.n_sites(), self.w.len()));
        }
        let half = 0.5 * prop.dt();
        self.rotate(half);
        prop.apply(self.w.values_mut());
        self.rotate(half);
        self.t += prop.dt();
        self.ell2_current = self.w.norm_l2();
        self.check_leak()
    }
}

/// One row of the time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    /// `‖w(t)‖₂`.
    pub ell2: f64,
    /// `sup_x ||w(t,x)| − |w(0,x)||`.
    pub sup_amp_dev: f64,
    /// `arg w(t, 0)` in `(−π, π]`.
    pub phase0: f64,
}

/// Full profile at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub t_final: f64,
    pub dt: f64,
    pub record_every: usize,
    /// Take a snapshot every this many records; `None` for none.
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub records: Vec<Record>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: EvolutionState,
    pub steps: usize,
}

impl Evolution {
    pub fn max_amp_dev(&self) -> f64 {
        self.records.iter().map(|r| r.sup_amp_dev).fold(0.0, f64::max)
    }

    pub fn max_ell2_drift(&self) -> f64 {
        let l0 = self.final_state.ell2_initial;
        self.records.iter().map(|r| (r.ell2 - l0).abs() / l0).fold(0.0, f64::max)
    }
}

fn record(state: &EvolutionState, amp0: &[f64]) -> Record {
    let sup_amp_dev = state.w.iter().zip(amp0).map(|(z, a)| (z.norm() - a).abs()).fold(0.0, f64::max);
    Record { t: state.t, ell2: state.ell2_current, sup_amp_dev, phase0: state.w[0].arg() }
}

fn snapshot(state: &EvolutionState) -> Snapshot {
    Snapshot { t: state.t, re: state.w.iter().map(|z| z.re).collect(), im: state.w.iter().map(|z| z.im).collect() }
}

/// Steps `state` to `t_final`, recording every `record_every` steps
/// (the initial and final states are always recorded).
pub fn evolve(mut state: EvolutionState, prop: &Propagator, cfg: &EvolveConfig) -> Result<Evolution> {
    if !(cfg.t_final >= 0.0 && cfg.t_final.is_finite()) {
        return Err(Error::Domain(format!("final time must be >= 0, got {}", cfg.t_final)));
    }
    if cfg.record_every == 0 {
        return Err(Error::Domain("record_every must be >= 1".into()));
    }
    if prop.dt() != cfg.dt {
        return Err(Error::Domain(format!("propagator built for dt = {} but dt = {}", prop.dt(), cfg.dt)));
    }
    state.check_edge(state.leak_tol.min(INITIAL_EDGE_TOL))?;
    let steps = (cfg.t_final / cfg.dt.abs()).round() as usize;
    let amp0: Vec<f64> = state.w.iter().map(|z| z.norm()).collect();
    let mut records = vec![record(&state, &amp0)];
    let mut snapshots = Vec::new();
    let snap = |records: &Vec<Record>| cfg.snapshot_every.is_some_and(|k| k > 0 && (records.len() - 1) % k == 0);
    if snap(&records) {
        snapshots.push(snapshot(&state));
    }
    for n in 1..=steps {
        state.step(prop)?;
        if n % cfg.record_every == 0 || n == steps {
            records.push(record(&state, &amp0));
            if snap(&records) {
                snapshots.push(snapshot(&state));
            }
        }
    }
    Ok(Evolution { records, snapshots, final_state: state, steps })
}

fn wrap(phase: f64) -> f64 {
    let r = (phase + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Unwraps `phase0` along the records. Fails when two successive samples
/// differ by more than [`PHASE_JUMP_LIMIT`] modulo `2π`, where the true
/// increment can no longer be told apart from an alias.
pub fn unwrap_phase(records: &[Record]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(records.len());
    for (k, r) in records.iter().enumerate() {
        if k == 0 {
            out.push(r.phase0);
            continue;
        }
        let jump = wrap(r.phase0 - records[k - 1].phase0);
        if jump.abs() > PHASE_JUMP_LIMIT {
            return Err(Error::PhaseUnwrapFailure { jump, t: r.t });
        }
        out.push(out[k - 1] + jump);
    }
    Ok(out)
}

/// `ζ̂ = −d/dt arg w(t, 0)` by least squares over the records with
/// `t <= t_max`; for the soliton orbit `ζ̂ = −μ`.
pub fn phase_track(records: &[Record], t_max: f64) -> Result<f64> {
    let phase = unwrap_phase(records)?;
    let pts: Vec<(f64, f64)> =
        records.iter().zip(&phase).filter(|(r, _)| r.t <= t_max).map(|(r, &ph)| (r.t, ph)).collect();
    if pts.len() < 2 {
        return Err(Error::Domain("phase regression needs at least two samples".into()));
    }
    let m = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mp = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mp)).sum();
    Ok(-sxy / sxx)
}
