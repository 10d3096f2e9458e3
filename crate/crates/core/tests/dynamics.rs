use std::sync::OnceLock;

use approx::assert_relative_eq;
use nalgebra::DVector;

use firmdyn::dynamics::{
    linearize, solve_linear_re, DynamicsOptions, HfModel, HfSystem, LinearSolution, LinearSystem, Normalization,
    ResidualSystem, Series, SolverOptions,
};
use firmdyn::equilibrium::{solve_stationary_equilibrium, Moments};
use firmdyn::params::ModelParams;
use firmdyn::rfmodel::{solve_rf, RFParams, RfSystem};
use firmdyn::variants::{build_named, VariantConfig};
use firmdyn::Error;

fn baseline() -> &'static HfModel {
    static MODEL: OnceLock<HfModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let ss = solve_stationary_equilibrium(&ModelParams::baseline()).unwrap();
        HfModel::build(&ss, &DynamicsOptions::default()).unwrap()
    })
}

/// Max-abs residual of `A x_{t+1} + B x_t + C x_{t-1} + D eps_t` along a
/// simulated unit-shock path.
fn path_residual(sys: &LinearSystem, sol: &LinearSolution, len: usize) -> f64 {
    let states = firmdyn::dynamics::simulate(sol, len + 1, 1.0);
    let zero = DVector::zeros(sys.dim());
    let mut worst = 0.0f64;
    let mut eps = 1.0;
    for t in 0..len {
        let lag = if t == 0 { &zero } else { &states[t - 1] };
        let r = &sys.lead * &states[t + 1] + &sys.current * &states[t] + &sys.lag * lag + &sys.shock * eps;
        worst = worst.max(r.amax());
        eps *= sol.shock_persistence;
    }
    worst
}

#[test]
fn generic_solver_reproduces_closed_form_benchmark() {
    let params = RFParams::from_model(&ModelParams::baseline());
    let closed = solve_rf(&params).unwrap();
    let sys = linearize(&RfSystem { params }, 1e-6).unwrap();
    let sol = solve_linear_re(&sys, params.rho_m, &SolverOptions::default()).unwrap();
    assert!(sol.transition.amax() < 1e-9);
    assert_relative_eq!(sol.impact[0], closed.a_y, epsilon = 1e-9);
    assert_relative_eq!(sol.impact[1], closed.a_pi, epsilon = 1e-9);
    assert_relative_eq!(sol.impact[2], closed.a_nominal, epsilon = 1e-9);
}

#[test]
fn passive_policy_is_indeterminate_in_both_models() {
    let mut params = ModelParams::baseline();
    params.phi = 0.9;
    assert!(matches!(solve_rf(&RFParams::from_model(&params)), Err(Error::Indeterminate(_))));
    let ss = solve_stationary_equilibrium(&params).unwrap();
    match HfModel::build(&ss, &DynamicsOptions::default()) {
        Err(Error::Indeterminate(d)) => assert!(d.unstable_forward >= 1, "{d}"),
        other => panic!("expected indeterminacy, got {:?}", other.map(|m| m.solution.diagnostics)),
    }
}

#[test]
fn baseline_solution_is_determinate_and_accurate() {
    let m = baseline();
    assert_eq!(m.linear.dim(), 107);
    assert!(m.solution.is_determinate());
    assert!(m.solution.spectral_radius() < 1.0);
    assert!(m.solution.residual < 1e-9);
    assert!(path_residual(&m.linear, &m.solution, 60) < 1e-9);
}

#[test]
fn responses_are_linear_in_the_shock() {
    let m = baseline();
    let a = m.irf(20, Normalization::Innovation(0.001)).unwrap();
    let b = m.irf(20, Normalization::Innovation(0.003)).unwrap();
    for s in Series::ALL {
        for (x, y) in a.get(s).iter().zip(b.get(s)) {
            assert!((3.0 * x - y).abs() <= 1e-12 * y.abs().max(1e-6), "{}", s.name());
        }
    }
    let zero = m.irf(20, Normalization::Innovation(0.0)).unwrap();
    assert!(Series::ALL.iter().all(|s| zero.get(*s).iter().all(|v| *v == 0.0)));
}

#[test]
fn contraction_has_textbook_signs() {
    let irf = baseline().irf(8, Normalization::default()).unwrap();
    assert_relative_eq!(irf.impact(Series::RealRate), 1.0, epsilon = 1e-12);
    assert!(irf.impact(Series::NominalRate) > 0.0);
    for s in [Series::Output, Series::Employment, Series::Inflation, Series::RealWage, Series::RelPrice] {
        assert!(irf.impact(s) < 0.0, "{}", s.name());
    }
    assert!(irf.impact(Series::ExitRateBp) > 0.0);
    assert!(irf.impact(Series::EntryRateBp) < 0.0);
    assert!(irf.get(Series::Gamma)[8] < 0.0);
    // Taylor rule in deviations: R = phi pi + eps
    let scale = irf.shock_scale * 100.0;
    assert_relative_eq!(
        irf.impact(Series::NominalRate),
        1.5 * irf.impact(Series::Inflation) + scale,
        epsilon = 1e-6
    );
}

#[test]
fn reordering_variables_leaves_the_solution_unchanged() {
    let m = baseline();
    let n = m.linear.dim();
    let perm: Vec<usize> = (0..n).map(|i| (i * 37 + 11) % n).collect();
    let sol = solve_linear_re(&m.linear.permuted(&perm), 0.5, &SolverOptions::default()).unwrap();
    for (i, &p) in perm.iter().enumerate() {
        assert!((sol.impact[i] - m.solution.impact[p]).abs() < 1e-8);
    }
}

#[test]
fn finite_difference_step_does_not_matter() {
    let ss = &baseline().steady;
    let coarse = HfModel::build(
        ss,
        &DynamicsOptions {
            fd_step: 1e-5,
            ..Default::default()
        },
    )
    .unwrap();
    let a = baseline().irf(4, Normalization::default()).unwrap();
    let b = coarse.irf(4, Normalization::default()).unwrap();
    assert!((a.impact(Series::Output) - b.impact(Series::Output)).abs() < 1e-4);
    assert!((a.impact(Series::ExitRateBp) - b.impact(Series::ExitRateBp)).abs() < 1e-2);
    assert!((a.impact(Series::EntryRateBp) - b.impact(Series::EntryRateBp)).abs() < 1e-2);
}

#[test]
fn all_flags_off_is_the_baseline_system() {
    let m = baseline();
    let mut params = ModelParams::baseline();
    params.variant = VariantConfig::named("baseline").unwrap();
    let ss = solve_stationary_equilibrium(&params).unwrap();
    let other = HfSystem::new(&ss).unwrap();
    let x: Vec<f64> = m.system.steady_state().iter().map(|v| v * (1.0 + 1e-3)).collect();
    let a = m.system.residuals(&x, &x, &x, 0.002);
    let b = other.residuals(&x, &x, &x, 0.002);
    assert_eq!(a, b);
}

#[test]
fn delayed_entrants_do_not_react_on_impact() {
    let base = ModelParams::baseline();
    let m = build_named("delayed_entry", &base, &Moments::baseline_targets(), &DynamicsOptions::default()).unwrap();
    let irf = m.irf(4, Normalization::default()).unwrap();
    assert!(irf.impact(Series::EntryRateBp).abs() < 1e-9);
    assert!(irf.get(Series::EntryRateBp)[1] < 0.0);
}

#[test]
fn free_entry_condition_holds_along_the_path() {
    let base = ModelParams::baseline();
    let m = build_named("free_entry", &base, &Moments::baseline_targets(), &DynamicsOptions::default()).unwrap();
    assert!(m.system.layout.entrants().is_some());
    assert!(path_residual(&m.linear, &m.solution, 60) < 1e-9);
    let ss = m.system.steady_state();
    let r = m.system.residuals(&ss, &ss, &ss, 0.0);
    assert!(r[m.system.layout.entrants().unwrap()].abs() < 1e-9);
}
