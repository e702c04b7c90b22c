use std::path::Path;

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::args::{
    Command, ConstructArgs, EvolveArgs, InitialKind, MuSpec, SolverArgs, SpecfunArgs, SpectrumArgs, SweepArgs,
    VerifyArgs, XmaxSpec,
};
use super::output::Sink;
use super::{CliError, RunConfig};
use crate::dnls::{evolve, phase_track, EvolutionState, EvolveConfig, Propagator};
use crate::lattice::LatticeVector;
use crate::operator::spectrum;
use crate::soliton::{compute_thresholds, construct_soliton, SolitonParams, SolitonResult, Truncation};
use crate::specfun::{default_truncation, phi_profile_unchecked, psi_tail_asymptote, resolvent_psi};
use crate::verify::verify_all;

/// Lattice used by `evolve` for data that does not carry its own.
const DEFAULT_EVOLVE_XMAX: usize = 200;

pub(crate) fn dispatch(run: &RunConfig) -> Result<(), CliError> {
    let out_dir = run.cli.out_dir.as_deref();
    match &run.cli.command {
        Command::Specfun(a) => cmd_specfun(a, out_dir),
        Command::Spectrum(a) => cmd_spectrum(a, out_dir),
        Command::Construct(a) => cmd_construct(a, out_dir),
        Command::Verify(a) => cmd_verify(a, out_dir),
        Command::Sweep(a) => cmd_sweep(a, out_dir),
        Command::Evolve(a) => cmd_evolve(a, run.cli.seed, out_dir),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecfunRow {
    pub x: usize,
    pub phi: f64,
    pub psi: f64,
    /// Empty at `x = 0`, where the closed form is undefined.
    pub asymptote: Option<f64>,
    pub log_phi: f64,
    pub log_psi: f64,
}

fn cmd_specfun(args: &SpecfunArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let x_max = match args.xmax {
        XmaxSpec::Auto => default_truncation(args.a)?,
        XmaxSpec::Fixed(x) => x,
    };
    let psi = resolvent_psi(args.a, x_max)?;
    let phi = phi_profile_unchecked(args.a, x_max);
    let rows: Vec<SpecfunRow> = (0..=x_max)
        .map(|x| SpecfunRow {
            x,
            phi: phi.value(x),
            psi: psi.value(x),
            asymptote: psi_tail_asymptote(args.a, x as f64).ok(),
            log_phi: phi.log_value(x),
            log_psi: psi.log_value(x),
        })
        .collect();
    Sink::resolve(args.out.as_deref(), out_dir, "specfun.csv").write_csv(&rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub eigenvalue: f64,
}

fn cmd_spectrum(args: &SpectrumArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let rows: Vec<SpectrumRow> = spectrum(args.n)?
        .into_iter()
        .enumerate()
        .map(|(index, eigenvalue)| SpectrumRow { index, eigenvalue })
        .collect();
    Sink::resolve(args.out.as_deref(), out_dir, "spectrum.csv").write_csv(&rows)
}

fn resolve_mu(mu: MuSpec, p: u32) -> Result<f64, CliError> {
    match mu {
        MuSpec::Value(v) => Ok(v),
        MuSpec::TimesThreshold(f) => Ok(f * compute_thresholds(p)?.mu_star),
    }
}

fn solver_params(mu: MuSpec, s: &SolverArgs) -> Result<SolitonParams, CliError> {
    let truncation = match s.xmax {
        XmaxSpec::Auto => Truncation::Auto,
        XmaxSpec::Fixed(x) => Truncation::Fixed(x),
    };
    let params = SolitonParams { max_iters: s.max_iters, ..SolitonParams::new(resolve_mu(mu, s.p)?, s.p) }
        .with_tolerances(s.iter_tol, s.root_tol)
        .with_truncation(truncation);
    Ok(params)
}

fn cmd_construct(args: &ConstructArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let params = solver_params(args.mu, &args.solver)?;
    let result = construct_soliton(&params)?;
    eprintln!(
        "mu = {}  p = {}  X = {}  b_star = {:.15}  residual = {:.3e}  iterations = {}",
        result.a(),
        result.p(),
        result.truncation_len(),
        result.b_star,
        result.residual_sup,
        result.iterations_used
    );
    Sink::resolve(args.out.as_deref(), out_dir, "soliton.json").write_json(&result)
}

fn read_soliton(path: &Path) -> Result<SolitonResult, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_verify(args: &VerifyArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let result = read_soliton(&args.input)?;
    let report = verify_all(&result);
    print!("{report}");
    let sink = match (&args.out, out_dir) {
        (None, None) => None,
        (out, dir) => Some(Sink::resolve(out.as_deref(), dir, "report.json")),
    };
    match sink {
        Some(s) => s.write_json(&report)?,
        None => Sink::Stdout.write_json(&report)?,
    }
    let failed = report.failures().count();
    if failed > 0 {
        return Err(CliError::VerificationFailed(failed));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mu: f64,
    pub b_star: f64,
    pub q: f64,
    pub s_minus: f64,
    /// `Σ_{x>=1} α(x)` over the stored sites.
    pub l1_tail: f64,
    pub residual: f64,
    pub iterations: usize,
    pub truncation: usize,
    pub verified: bool,
}

fn cmd_sweep(args: &SweepArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let params: Vec<SolitonParams> =
        args.mu.iter().map(|&m| solver_params(m, &args.solver)).collect::<Result<_, _>>()?;
    let rows: Vec<SweepRow> = params
        .par_iter()
        .map(|p| {
            let r = construct_soliton(p)?;
            let verified = verify_all(&r).passed();
            info!("mu = {} done, verified = {verified}", r.a());
            Ok(SweepRow {
                mu: r.a(),
                b_star: r.b_star,
                q: r.q_at_root,
                s_minus: r.s_star,
                l1_tail: r.alpha.hat().norm_l1(),
                residual: r.residual_sup,
                iterations: r.iterations_used,
                truncation: r.truncation_len(),
                verified,
            })
        })
        .collect::<Result<_, crate::Error>>()?;
    Sink::resolve(args.out.as_deref(), out_dir, "sweep.csv").write_csv(&rows)
}

/// Initial data, its power and the soliton frequency when there is one.
fn initial_data(args: &EvolveArgs, seed: u64) -> Result<(LatticeVector<f64>, u32, Option<f64>), CliError> {
    let (mut v, p, mu) = if let Some(path) = &args.from {
        let r = read_soliton(path)?;
        (r.alpha.clone(), r.p(), Some(r.a()))
    } else {
        let x_max = args.xmax.unwrap_or(DEFAULT_EVOLVE_XMAX);
        match args.initial.expect("validated: --from or --initial") {
            InitialKind::Soliton => {
                let params = SolitonParams::new(resolve_mu(args.mu, args.p)?, args.p);
                let r = construct_soliton(&params)?;
                (r.alpha.clone(), args.p, Some(r.a()))
            }
            InitialKind::Chi0 => (LatticeVector::unit(0, x_max, 1.0), args.p, None),
            InitialKind::Gaussian => {
                let vals = (0..=x_max).map(|x| (-(x as f64 / args.width).powi(2)).exp()).collect();
                (LatticeVector::new(vals)?, args.p, None)
            }
        }
    };
    v = v.scale(args.scale);
    if args.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for z in v.values_mut() {
            *z *= 1.0 + args.noise * rng.random_range(-1.0..=1.0);
        }
    }
    if let Some(x) = args.xmax {
        if x > v.truncation_len() {
            v = v.zero_extended(x)?;
        }
    }
    Ok((v, p, mu))
}

fn cmd_evolve(args: &EvolveArgs, seed: u64, out_dir: Option<&Path>) -> Result<(), CliError> {
    let (v, p, mu) = initial_data(args, seed)?;
    let dt = args.dt.unwrap_or_else(|| mu.map_or(1e-3, |m| 1e-3 / m));
    let t_final = args.t_final.unwrap_or_else(|| mu.map_or(1.0, |m| 10.0 / m));
    let mut state = EvolutionState::new(v.to_complex(), p)?.with_leak_tol(args.leak_tol);
    if args.linear_only {
        state = state.linear();
    }
    let prop = Propagator::for_truncation(v.truncation_len(), dt)?;
    let cfg = EvolveConfig {
        t_final,
        dt,
        record_every: args.record_every,
        snapshot_every: args.snapshots.as_ref().map(|_| args.snapshot_every),
    };
    let run = evolve(state, &prop, &cfg)?;

    eprintln!(
        "steps = {}  max_sup_amp_dev = {:.3e}  max_ell2_drift = {:.3e}",
        run.steps,
        run.max_amp_dev(),
        run.max_ell2_drift()
    );
    if let Some(m) = mu {
        match phase_track(&run.records, t_final) {
            Ok(z) => eprintln!("zeta_hat = {z:.12}  (orbit value {})", -m),
            Err(e) => eprintln!("zeta_hat unavailable: {e}"),
        }
    }
    Sink::resolve(args.out.as_deref(), out_dir, "evolve.csv").write_csv(&run.records)?;
    if let Some(path) = &args.snapshots {
        Sink::resolve(Some(path), out_dir, "snapshots.json").write_json(&run.snapshots)?;
    }
    Ok(())
}
