//! Invariants checked over randomly drawn inputs.

use proptest::prelude::*;

use firmdyn::analysis::{measure_rates, tfp_path};
use firmdyn::config::RunConfig;
use firmdyn::equilibrium::{step_measure, tfp, FirmMeasure};
use firmdyn::firm::{labor_policy, static_profit, FirmSolution};
use firmdyn::output::fmt12;
use firmdyn::stochproc::{binomial_half, chain_stationary, rouwenhorst, AR1Spec, LognormalSpec};

fn solution(survive: Vec<f64>, entry: Vec<f64>) -> FirmSolution {
    let k = survive.len();
    FirmSolution {
        value: vec![1.0; k],
        labor: vec![1.0; k],
        profit: vec![0.0; k],
        exit_threshold: vec![0.0; k],
        entry_threshold: vec![0.0; k],
        continuation_prob: survive,
        entry_prob: entry,
        iterations: 0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rouwenhorst_is_stochastic_with_binomial_ergodic_law(
        rho in -0.95f64..0.999, sd in 0.001f64..0.5, mean in -2.0f64..2.0, k in 2usize..40,
    ) {
        let chain = rouwenhorst(&AR1Spec::new(rho, sd, mean).unwrap(), k).unwrap();
        let p = chain.transition();
        for i in 0..k {
            let row: f64 = (0..k).map(|j| p[(i, j)]).sum();
            prop_assert!((row - 1.0).abs() < 1e-12);
            prop_assert!((0..k).all(|j| p[(i, j)] >= 0.0));
        }
        let q = binomial_half(k - 1);
        let pushed = chain.push_forward(&q);
        for (a, b) in pushed.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        if rho.abs() < 0.99 {
            let pi = chain_stationary(p).unwrap();
            for (a, b) in pi.iter().zip(&q) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
        let grid = chain.grid();
        prop_assert!(((grid[0] + grid[k - 1]) / 2.0 - mean).abs() < 1e-12);
    }

    #[test]
    fn gain_threshold_inverts_option_value(mu in -8.0f64..2.0, sigma in 0.1f64..5.0, g in -20.0f64..5.0) {
        let spec = LognormalSpec::new(mu, sigma).unwrap();
        let gain = g.exp();
        let c = spec.gain_threshold(gain);
        prop_assert!(((spec.expected_gain(c) - gain) / gain).abs() < 1e-9);
        prop_assert!(spec.expected_gain(c * 1.01) > spec.expected_gain(c));
    }

    #[test]
    fn labour_demand_is_homogeneous_of_degree_zero(
        z in 0.1f64..10.0, p in 0.2f64..2.0, w in 0.2f64..2.0, nu in 0.05f64..0.95, s in 0.1f64..10.0,
    ) {
        let n = labor_policy(z, p, w, nu);
        prop_assert!((labor_policy(z, s * p, s * w, nu) / n - 1.0).abs() < 1e-10);
        // first-order condition and profit share
        prop_assert!((nu * p * z * n.powf(nu - 1.0) / w - 1.0).abs() < 1e-10);
        prop_assert!((static_profit(z, p, w, nu) / (p * z * n.powf(nu)) - (1.0 - nu)).abs() < 1e-10);
    }

    #[test]
    fn measure_without_exit_or_entry_keeps_its_mass(
        masses in prop::collection::vec(0.0f64..1.0, 7), rho in 0.0f64..0.99,
    ) {
        let chain = rouwenhorst(&AR1Spec::new(rho, 0.1, 0.0).unwrap(), 7).unwrap();
        let mu = FirmMeasure::new(masses.clone(), 0.3).unwrap();
        let next = step_measure(&mu, &[1.0; 7], &[0.0; 7], &chain, false);
        prop_assert!((next.total() - mu.total()).abs() < 1e-12);
        let delayed = step_measure(&mu, &[1.0; 7], &[0.5; 7], &chain, true);
        prop_assert!((delayed.total() - mu.total() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn tfp_is_homogeneous_in_the_measure(
        masses in prop::collection::vec(0.01f64..1.0, 5), nu in 0.1f64..0.95, s in 0.1f64..10.0,
    ) {
        let levels = [0.5, 0.8, 1.0, 1.3, 2.0];
        let (a, idx) = tfp(&masses, &levels, nu);
        let scaled: Vec<f64> = masses.iter().map(|m| s * m).collect();
        let (a2, idx2) = tfp(&scaled, &levels, nu);
        prop_assert!((a2 / a - s.powf(1.0 - nu)).abs() < 1e-10 * s.powf(1.0 - nu));
        prop_assert!((idx2 / idx - 1.0).abs() < 1e-12);
        let path = tfp_path(std::slice::from_ref(&masses), &levels, nu);
        let gamma: f64 = masses.iter().sum();
        prop_assert!((path.tfp[0] - (gamma * path.productivity_index[0]).powf(1.0 - nu)).abs() < 1e-12 * path.tfp[0]);
    }

    #[test]
    fn rates_follow_from_masses(
        m0 in prop::collection::vec(0.01f64..1.0, 3),
        m1 in prop::collection::vec(0.01f64..1.0, 3),
        s in prop::collection::vec(0.5f64..1.0, 3),
        entrants in 0.0f64..0.2, before in 0.5f64..3.0,
    ) {
        let sols = vec![solution(s.clone(), vec![0.0; 3]), solution(s.clone(), vec![0.0; 3])];
        let rates = measure_rates(&[m0.clone(), m1.clone()], &sols, &[entrants, 0.0], before, (0.0, 0.0)).unwrap();
        let g0: f64 = m0.iter().sum();
        let g1: f64 = m1.iter().sum();
        let exits: f64 = m0.iter().zip(&s).map(|(m, c)| m * (1.0 - c)).sum();
        prop_assert_eq!(rates.exit_rate[0], exits / (0.5 * (g0 + g1)));
        prop_assert_eq!(rates.entry_rate[0], entrants / (0.5 * (before + g0)));
        prop_assert_eq!(rates.firm_mass[0], g0);
    }

    #[test]
    fn twelve_digit_output_is_accurate(x in -1e12f64..1e12, e in -9i32..9) {
        let v = x * 10f64.powi(e);
        let back: f64 = fmt12(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-12 * v.abs().max(1e-300));
    }

    #[test]
    fn config_round_trips(
        nu in 0.1f64..0.95, phi in 1.01f64..3.0, mu_c in -8.0f64..0.0, horizon in 1usize..400,
        variant in prop::sample::select(vec!["baseline", "labor_cost", "delayed_entry", "risk_neutral", "free_entry"]),
    ) {
        let text = format!("variant = {variant}\nnu = {nu}\nphi = {phi}\nmu_c = {mu_c}\nirf_horizon = {horizon}\n");
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(RunConfig::parse(&cfg.render()).unwrap(), cfg);
    }
}

#[test]
fn zero_entry_gives_zero_entry_rate() {
    let sols = vec![solution(vec![0.9; 2], vec![0.0; 2]); 3];
    let m = vec![vec![0.5, 0.5], vec![0.45, 0.45], vec![0.4, 0.4]];
    let rates = measure_rates(&m, &sols, &[0.0; 3], 1.0, (0.1, 0.0)).unwrap();
    assert!(rates.entry_rate.iter().all(|r| *r == 0.0));
    // exits of 0.1 out of masses 1.0 and 0.9
    assert!((rates.exit_rate[0] - 0.1 / 0.95).abs() < 1e-15);
    assert!((rates.exit_bp()[1] - 1e4 * (0.09 / 0.85 - 0.1)).abs() < 1e-9);
}

#[test]
fn non_positive_mass_is_rejected() {
    let sols = vec![solution(vec![0.9; 2], vec![0.0; 2]); 2];
    let m = vec![vec![0.0, 0.0], vec![0.5, 0.5]];
    assert!(measure_rates(&m, &sols, &[0.0; 2], 1.0, (0.0, 0.0)).is_err());
}
