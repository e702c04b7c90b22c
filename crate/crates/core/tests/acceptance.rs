//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Runs without the libtest harness so the lines are always shown.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ncsoliton::dnls::{evolve, phase_track, EvolutionState, EvolveConfig, Propagator};
use ncsoliton::operator::{apply_l0, apply_resolvent, build_kernel};
use ncsoliton::soliton::{b_minus, b_plus, compute_thresholds, construct_soliton, SolitonParams, SolitonResult};
use ncsoliton::specfun::{
    default_truncation, psi_tail_l1_bound, resolvent_psi, resolvent_psi_recurrence, ExpIntegralTable,
};
use ncsoliton::verify::{check_decay, check_iteration, check_l1_scaling, check_shape, fit_profile, l1_scaling_sweep};
use ncsoliton::LatticeVector;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

struct Suite {
    failures: usize,
}

impl Suite {
    /// Runs `f` and prints its line. `budget` is part of the criterion.
    fn criterion(&mut self, id: u32, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) {
        self.criterion_with(id, name, budget, Duration::ZERO, f)
    }

    /// As [`Suite::criterion`], charging `carried` (shared setup done
    /// earlier) against the budget too.
    fn criterion_with(
        &mut self,
        id: u32,
        name: &str,
        budget: Option<Duration>,
        carried: Duration,
        f: impl FnOnce() -> Outcome,
    ) {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed() + carried;
        let in_budget = budget.map_or(true, |b| elapsed <= b);
        let passed = out.passed && in_budget;
        let budget_note = match budget {
            Some(b) if !in_budget => format!(" [over budget {:.1?} > {:.0?}]", elapsed, b),
            Some(b) => format!(" [{:.2?} of {:.0?}]", elapsed, b),
            None => format!(" [{:.2?}]", elapsed),
        };
        println!("{} {:>2} {}: {}{}", if passed { "PASS" } else { "FAIL" }, id, name, out.detail, budget_note);
        if !passed {
            self.failures += 1;
        }
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

/// `Σ_{y} R(x, y) v(y)` entry by entry, the O(X²) reference.
fn direct_resolvent(k: &ncsoliton::operator::ResolventKernel, v: &[f64]) -> Vec<f64> {
    (0..v.len()).map(|x| (0..v.len()).map(|y| k.entry(x, y) * v[y]).sum()).collect()
}

fn construct_grid(mus: &[f64]) -> Vec<ncsoliton::Result<SolitonResult>> {
    mus.par_iter().map(|&mu| construct_soliton(&SolitonParams::new(mu, 3))).collect()
}

fn main() {
    let mut suite = Suite { failures: 0 };
    let mu_star = compute_thresholds(3).expect("thresholds").mu_star;

    suite.criterion(1, "psi l1 norm equals 1/a", secs(1), || {
        let mut worst = 0.0f64;
        let mut detail = Vec::new();
        for a in [0.5, 1.0, 5.0, 20.0] {
            let x = default_truncation(a).unwrap();
            let psi = resolvent_psi(a, x).unwrap();
            let total = psi.values().iter().sum::<f64>() + psi_tail_l1_bound(a, x).unwrap();
            let rel = (total * a - 1.0).abs();
            worst = worst.max(rel);
            detail.push(format!("a={a}: X={x} rel={rel:.1e}"));
        }
        Outcome::new(worst <= 1e-8, format!("{} (tol 1e-8)", detail.join(", ")))
    });

    suite.criterion(2, "exponential integral sandwich", secs(1), || {
        let mut ok = true;
        let mut min_margin = f64::INFINITY;
        for a in [0.1, 1.0, 10.0] {
            let t = ExpIntegralTable::new(a, 60).unwrap();
            for (k, &s) in t.scaled_values().iter().enumerate() {
                let n = k as f64 + 1.0;
                let (lo, hi) = (1.0 / (a + n), 1.0 / (a + n - 1.0));
                ok &= lo < s && s <= hi;
                min_margin = min_margin.min(((s - lo) / lo).min((hi - s) / hi));
            }
        }
        Outcome::new(ok, format!("n <= 60, a in {{0.1, 1, 10}}; smallest relative margin {min_margin:.2e}"))
    });

    suite.criterion(3, "Wronskian normalization", secs(1), || {
        let mut worst = 0.0f64;
        for a in [1.0, 10.0] {
            let k = build_kernel(a, 501).unwrap();
            worst = k.wronskian()[..=500].iter().fold(worst, |m, w| m.max((w - 1.0).abs()));
        }
        Outcome::new(worst <= 1e-10, format!("max |(x+1)W - 1| = {worst:.2e} over x <= 500 (tol 1e-10)"))
    });

    suite.criterion(4, "resolvent identity", secs(5), || {
        let x_max = 400;
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
        let mut worst = 0.0f64;
        for trial in 0..100 {
            let a = [0.5, 1.0, 5.0, 20.0][trial % 4];
            let k = build_kernel(a, x_max).unwrap();
            let v: Vec<f64> = (0..=x_max).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let v = LatticeVector::new(v).unwrap();
            let u = apply_resolvent(&k, &v).unwrap();
            let lu = apply_l0(&u);
            let err = (0..x_max).map(|x| (lu[x] + a * u[x] - v[x]).abs()).fold(0.0, f64::max);
            worst = worst.max(err / v.norm_sup());
        }
        Outcome::new(worst <= 1e-8, format!("100 seeded vectors, X = 400: max rel residual {worst:.2e} (tol 1e-8)"))
    });

    // Shared constructions for criteria 5..10.
    let grid5: Vec<f64> = [1.5, 2.0, 4.0, 8.0].iter().map(|f| f * mu_star).collect();
    let grid7: Vec<f64> = [2.0, 4.0, 8.0, 16.0].iter().map(|f| f * mu_star).collect();
    let start = Instant::now();
    let built5 = construct_grid(&grid5);
    let build5_time = start.elapsed();
    let start = Instant::now();
    let built7 = construct_grid(&grid7);
    let build7_time = start.elapsed();

    let ok5: Vec<&SolitonResult> = built5.iter().filter_map(|r| r.as_ref().ok()).collect();
    let ok7: Vec<SolitonResult> = built7.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let all: Vec<&SolitonResult> = ok5.iter().copied().chain(ok7.iter()).collect();
    let construction_errors: Vec<String> =
        built5.iter().chain(&built7).filter_map(|r| r.as_ref().err().map(|e| e.to_string())).collect();

    suite.criterion_with(5, "soliton residual", secs(30), build5_time, || {
        let worst = ok5.iter().map(|r| r.residual_sup).fold(0.0, f64::max);
        let desc: Vec<String> = ok5.iter().map(|r| format!("mu={}: {:.1e}", r.a(), r.residual_sup)).collect();
        Outcome::new(
            construction_errors.is_empty() && ok5.len() == 4 && worst <= 1e-6,
            format!(
                "{} (tol 1e-6){}",
                desc.join(", "),
                if construction_errors.is_empty() {
                    String::new()
                } else {
                    format!("; errors: {construction_errors:?}")
                }
            ),
        )
    });

    suite.criterion(6, "positive, strictly decreasing, summable", None, || {
        let mut ok = !all.is_empty();
        let mut pos = f64::INFINITY;
        let mut diff = f64::NEG_INFINITY;
        let mut tail = 0.0f64;
        for r in &all {
            for c in check_shape(r) {
                ok &= c.passed;
                match c.name.as_str() {
                    "positivity" => pos = pos.min(c.measured),
                    "strict_decrease" => diff = diff.max(c.measured),
                    "l1_tail" => tail = tail.max(c.measured),
                    _ => {}
                }
            }
        }
        Outcome::new(
            ok,
            format!("min alpha {pos:.2e} > 0, max step {diff:.2e} < 0, max certified tail {tail:.2e} < 1e-10"),
        )
    });

    suite.criterion_with(7, "l1 norm of the tail", secs(60), build7_time, || {
        let mut ok = ok7.len() == 4;
        for r in &all {
            ok &= check_l1_scaling(r).map(|cs| cs.iter().all(|c| c.passed)).unwrap_or(false);
        }
        match l1_scaling_sweep(&ok7) {
            Ok(sweep) => {
                ok &= sweep.checks.iter().all(|c| c.passed);
                let ratios: Vec<String> =
                    sweep.a.iter().zip(&sweep.ratio).map(|(a, r)| format!("mu={a}: {r:.4}")).collect();
                Outcome::new(
                    ok,
                    format!(
                        "||alpha_hat||_1 <= s_minus everywhere; ratio {} <= 1 + 5/mu; fitted C = {:.3}, envelope C = {:.3}",
                        ratios.join(", "),
                        sweep.fitted_c,
                        sweep.envelope_c
                    ),
                )
            }
            Err(e) => Outcome::new(false, e.to_string()),
        }
    });

    suite.criterion(8, "bracket containment", None, || {
        let mut ok = !all.is_empty();
        let mut margin = f64::INFINITY;
        for r in &all {
            let (lo, hi) = (b_minus(r.a(), 3), b_plus(r.a(), 3));
            ok &= lo < r.b_star && r.b_star < hi;
            margin = margin.min((r.b_star - lo).min(hi - r.b_star));
        }
        Outcome::new(ok, format!("{} points, smallest distance to an end {margin:.3e}", all.len()))
    });

    suite.criterion(9, "decay envelope and fit calibration", secs(10), || {
        let mut ok = !all.is_empty();
        let mut worst_ratio = 0.0f64;
        for r in &all {
            match check_decay(r) {
                Ok((_, env, checks)) => {
                    ok &= checks.iter().all(|c| c.passed);
                    worst_ratio = worst_ratio.max(env.max_ratio);
                }
                Err(_) => ok = false,
            }
        }
        let psi = resolvent_psi(1.0, 400).unwrap();
        let fit = fit_profile(&psi, (100, 400), 0.25).unwrap();
        let rel = (fit.c1 - 2.0).abs() / 2.0;
        ok &= rel <= 0.05;
        Outcome::new(
            ok,
            format!(
                "max alpha/envelope {worst_ratio:.4} <= 1; psi_-1 fit c1 = {:.4} vs 2 (rel {rel:.2e}, tol 5%)",
                fit.c1
            ),
        )
    });

    suite.criterion(10, "monotone tail iteration", None, || {
        let mut ok = !all.is_empty();
        let mut inc = f64::INFINITY;
        let mut margin = f64::INFINITY;
        let mut steps = 0;
        for r in &all {
            for c in check_iteration(r) {
                ok &= c.passed;
            }
            inc = inc.min(r.all_runs.min_increment);
            margin = margin.min(r.all_runs.min_bound_margin);
            steps += r.all_runs.iterations;
        }
        Outcome::new(
            ok,
            format!("{steps} steps checked; min increment {inc:.2e} > 0; min s_n - ||u_n||_1 {margin:.2e} >= 0"),
        )
    });

    suite.criterion(11, "DNLS stationarity", secs(120), || {
        let mu = 2.0 * mu_star;
        let r = match construct_soliton(&SolitonParams::new(mu, 3)) {
            Ok(r) => r,
            Err(e) => return Outcome::new(false, e.to_string()),
        };
        let dt = 1e-3 / mu;
        let t_final = 10.0 / mu;
        let cfg = EvolveConfig { t_final, dt, record_every: 10, snapshot_every: None };
        let prop = Propagator::for_truncation(r.truncation_len(), dt).unwrap();
        let run = evolve(EvolutionState::new(r.alpha.to_complex(), 3).unwrap(), &prop, &cfg);
        let run = match run {
            Ok(run) => run,
            Err(e) => return Outcome::new(false, e.to_string()),
        };
        let dev = run.max_amp_dev();
        let drift = run.max_ell2_drift();
        let zeta = phase_track(&run.records, t_final).unwrap_or(f64::NAN);
        let zeta_rel = (zeta + mu).abs() / mu;

        // Half the soliton disperses, so it runs on a wider lattice.
        const CONTROL_XMAX: usize = 200;
        let control = r.alpha.scale(0.5).zero_extended(CONTROL_XMAX).unwrap();
        let prop_c = Propagator::for_truncation(CONTROL_XMAX, dt).unwrap();
        let control_dev = evolve(EvolutionState::new(control.to_complex(), 3).unwrap(), &prop_c, &cfg)
            .map(|run| run.max_amp_dev());
        let control_ok = matches!(control_dev, Ok(d) if d > 1e-2);

        Outcome::new(
            dev <= 1e-6 && drift <= 1e-9 && zeta_rel <= 1e-4 && control_ok,
            format!(
                "mu={mu}, X={}: amp dev {dev:.2e} (tol 1e-6), l2 drift {drift:.2e} (tol 1e-9), zeta_hat {zeta:.9} rel {zeta_rel:.1e} (tol 1e-4); 0.5 alpha on X={CONTROL_XMAX}: dev {} (> 1e-2)",
                r.truncation_len(),
                match &control_dev {
                    Ok(d) => format!("{d:.3}"),
                    Err(e) => e.to_string(),
                }
            ),
        )
    });

    suite.criterion(12, "oracle equivalence", None, || {
        let x_max = 200;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst_kernel = 0.0f64;
        for a in [0.5, 1.0, 5.0, 20.0] {
            let k = build_kernel(a, x_max).unwrap();
            let v: Vec<f64> = (0..=x_max).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let fast = apply_resolvent(&k, &LatticeVector::new(v.clone()).unwrap()).unwrap();
            let slow = direct_resolvent(&k, &v);
            let scale = slow.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            let err = fast.values().iter().zip(&slow).map(|(f, s)| (f - s).abs()).fold(0.0, f64::max);
            worst_kernel = worst_kernel.max(err / scale);
        }
        let mut worst_psi = 0.0f64;
        for a in [0.5, 1.0, 5.0, 20.0] {
            let q = resolvent_psi(a, 500).unwrap();
            let b = resolvent_psi_recurrence(a, 500).unwrap();
            for x in 0..=500 {
                worst_psi = worst_psi.max((q.value(x) / b.value(x) - 1.0).abs());
            }
        }
        Outcome::new(
            worst_kernel <= 1e-12 && worst_psi <= 1e-9,
            format!(
                "prefix vs direct kernel, X=200: {worst_kernel:.2e} (tol 1e-12); quadrature vs recurrence psi, x <= 500: {worst_psi:.2e} (tol 1e-9)"
            ),
        )
    });

    if suite.failures > 0 {
        println!("{} criterion/criteria failed", suite.failures);
        std::process::exit(1);
    }
    println!("all 12 criteria passed");
}
