//! Recalibrates the economy at lower returns to scale and compares impact
//! responses with the representative-firm benchmark at the same `nu`.

use std::time::Instant;

use firmdyn::dynamics::{DynamicsOptions, HfModel, Normalization, Series};
use firmdyn::equilibrium::{solve_stationary_equilibrium, Moments};
use firmdyn::params::ModelParams;
use firmdyn::rfmodel::{rf_irf, solve_rf, RFParams};
use firmdyn::variants::recalibrate_nu;

fn main() -> firmdyn::Result<()> {
    let base = ModelParams::baseline();
    let targets = Moments::baseline_targets();
    let grid: Vec<f64> = match std::env::args().nth(1) {
        Some(s) => s.split(',').map(|x| x.parse().expect("nu values")).collect(),
        None => vec![0.9, 0.5, 0.1],
    };
    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>9} {:>9} {:>7}",
        "nu", "mu_c", "sigma_c", "exit bp", "entry bp", "HF-RF pp", "secs"
    );
    for nu in grid {
        let t0 = Instant::now();
        let cal = recalibrate_nu(&base, nu, &targets, 0.1)?;
        let ss = solve_stationary_equilibrium(&cal.params)?;
        let hf = HfModel::build(&ss, &DynamicsOptions::default())?.irf(0, Normalization::default())?;
        let rf = rf_irf(&solve_rf(&RFParams::from_model(&cal.params))?, 0, Normalization::default())?;
        println!(
            "{:>5.2} {:>9.4} {:>9.4} {:>9.3} {:>9.3} {:>9.4} {:>7.1}",
            nu,
            cal.params.operating_cost.location,
            cal.params.operating_cost.scale,
            hf.impact(Series::ExitRateBp),
            hf.impact(Series::EntryRateBp),
            hf.impact(Series::Output) - rf.impact(Series::Output),
            t0.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
