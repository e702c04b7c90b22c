use num_complex::Complex64;
use proptest::prelude::*;

use ncsoliton::dnls::{evolve, EvolutionState, EvolveConfig, Propagator};
use ncsoliton::operator::{apply_l0, apply_resolvent, build_kernel};
use ncsoliton::soliton::{construct_soliton, dh_ds, s_min, SolitonParams};
use ncsoliton::specfun::{laguerre_phi, resolvent_psi, ExpIntegralTable};
use ncsoliton::verify::check_residual;
use ncsoliton::LatticeVector;

fn gaussian(x_max: usize, width: f64, amp: f64) -> LatticeVector<Complex64> {
    let v = (0..=x_max).map(|x| Complex64::new(amp * (-(x as f64 / width).powi(2)).exp(), 0.0)).collect();
    LatticeVector::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_integral_sandwich(a in 1e-3f64..60.0, len in 1usize..120) {
        let t = ExpIntegralTable::new(a, len).unwrap();
        for (k, &s) in t.scaled_values().iter().enumerate() {
            let n = k as f64 + 1.0;
            prop_assert!(1.0 / (a + n) < s, "a={} n={} s={}", a, n, s);
            prop_assert!(s <= 1.0 / (a + n - 1.0), "a={} n={} s={}", a, n, s);
        }
    }

    #[test]
    fn exp_integral_table_decreases_in_order_and_argument(a in 1e-2f64..30.0, da in 1e-3f64..1.0) {
        let t = ExpIntegralTable::new(a, 50).unwrap().values();
        let u = ExpIntegralTable::new(a + da, 50).unwrap().values();
        prop_assert!(t.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(t.iter().zip(&u).all(|(x, y)| y < x));
    }

    #[test]
    fn psi_positive_decreasing_phi_increasing(a in 0.05f64..40.0) {
        let psi = resolvent_psi(a, 200).unwrap();
        let l = psi.log_values();
        prop_assert!(l.iter().all(|v| v.is_finite()));
        prop_assert!(l.windows(2).all(|w| w[1] < w[0]));
        let phi = laguerre_phi(a, 60).unwrap().values();
        prop_assert!(phi[0] == 1.0 && phi.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn resolvent_inverts_l0_plus_a(
        a in 0.1f64..30.0,
        v in prop::collection::vec(-1.0f64..1.0, 40..160),
    ) {
        let x_max = v.len() - 1;
        let k = build_kernel(a, x_max).unwrap();
        let v = LatticeVector::new(v).unwrap();
        let u = apply_resolvent(&k, &v).unwrap();
        let lu = apply_l0(&u);
        let scale = v.norm_sup().max(f64::MIN_POSITIVE);
        for x in 0..x_max {
            prop_assert!((lu[x] + a * u[x] - v[x]).abs() <= 1e-10 * scale, "x={}", x);
        }
    }

    #[test]
    fn resolvent_preserves_positivity_and_contracts_l1(
        a in 0.1f64..30.0,
        v in prop::collection::vec(0.0f64..1.0, 40..160),
    ) {
        let k = build_kernel(a, v.len() - 1).unwrap();
        let v = LatticeVector::new(v).unwrap();
        let u = apply_resolvent(&k, &v).unwrap();
        prop_assert!(u.iter().all(|&x| x >= 0.0));
        prop_assert!(u.norm_l1() <= v.norm_l1() / a * (1.0 + 1e-12));
    }

    #[test]
    fn majorant_contracts_below_s_min(a in 3.01f64..200.0, frac in 0.0f64..1.0, p in 3u32..7) {
        let s = frac * s_min(a, p);
        let d = dh_ds(a, p, s);
        prop_assert!((0.0..1.0).contains(&d), "dh/ds = {}", d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// The residual guarantee is `10 (iter_tol + root_tol)`, so halving both
    /// tolerances halves what the result is held to.
    #[test]
    fn residual_bound_tracks_tolerances(mu in 4.0f64..30.0, tol_exp in -10.0f64..-6.0) {
        let tol = 10f64.powf(tol_exp);
        for t in [tol, tol / 2.0] {
            let r = construct_soliton(&SolitonParams::new(mu, 3).with_tolerances(t, t)).unwrap();
            let c = check_residual(&r);
            prop_assert!(c.passed, "mu={} tol={:e}: residual {:e} > {:e}", mu, t, c.measured, c.bound);
            prop_assert!(c.bound == 20.0 * t);
        }
    }

    #[test]
    fn forward_then_reversed_returns(amp in 0.1f64..1.5, width in 1.0f64..4.0, steps in 10usize..200) {
        let w0 = gaussian(40, width, amp);
        let dt = 1e-3;
        let prop = Propagator::for_truncation(40, dt).unwrap();
        let back = prop.reversed();
        let mut s = EvolutionState::new(w0.clone(), 3).unwrap();
        for _ in 0..steps {
            s.step(&prop).unwrap();
        }
        for _ in 0..steps {
            s.step(&back).unwrap();
        }
        let err = s.w.iter().zip(w0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12, "err = {:e}", err);
        prop_assert!(s.t.abs() < 1e-12);
    }
}

#[test]
fn unitarity_over_1e5_steps() {
    let w0 = gaussian(100, 2.0, 1.2);
    let dt = 1e-5;
    let prop = Propagator::for_truncation(100, dt).unwrap();
    let cfg = EvolveConfig { t_final: 1.0, dt, record_every: 1000, snapshot_every: None };
    let run = evolve(EvolutionState::new(w0, 3).unwrap(), &prop, &cfg).unwrap();
    assert_eq!(run.steps, 100_000);
    assert!(run.max_ell2_drift() < 1e-10, "drift {:e}", run.max_ell2_drift());
}

/// Error against a fine reference at `T = 1/μ`; halving `dt` divides it by 4.
#[test]
fn strang_splitting_is_second_order() {
    let r = construct_soliton(&SolitonParams::new(6.0, 3)).unwrap();
    let w0 = r.alpha.scale(0.8).to_complex();
    let x_max = r.truncation_len();
    let tf = 1.0 / 6.0;
    let run_with = |n: usize| {
        let dt = tf / n as f64;
        let prop = Propagator::for_truncation(x_max, dt).unwrap();
        let mut s = EvolutionState::new(w0.clone(), 3).unwrap().with_leak_tol(1.0);
        for _ in 0..n {
            s.step(&prop).unwrap();
        }
        s.w
    };
    let reference = run_with(4096);
    let errs: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| run_with(n).iter().zip(reference.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..2.2).contains(&order), "observed order {order} from {errs:?}");
    }
}

#[test]
fn construction_is_deterministic() {
    let p = SolitonParams::new(7.5, 3);
    let a = construct_soliton(&p).unwrap();
    let b = construct_soliton(&p).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
