//! Operating and entry costs that move with the real rate, with
//! sensitivities chosen to hit given impact responses of exit and entry.

use firmdyn::dynamics::{DynamicsOptions, Normalization, Series};
use firmdyn::equilibrium::solve_stationary_equilibrium;
use firmdyn::params::ModelParams;
use firmdyn::rfmodel::{rf_irf, solve_rf, RFParams};
use firmdyn::variants::calibrate_interest_sensitivity;

fn main() -> firmdyn::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric target")).collect();
    let (exit_bp, entry_bp) = match args[..] {
        [x, e] => (x, e),
        _ => (10.0, -4.5),
    };
    let params = ModelParams::baseline();
    let ss = solve_stationary_equilibrium(&params)?;
    let fit = calibrate_interest_sensitivity(&ss, exit_bp, entry_bp, 0.01, &DynamicsOptions::default())?;
    println!(
        "alpha_c {:.4}, alpha_e {:.4} after {} iterations: exit {:.3}bp, entry {:.3}bp",
        fit.alpha_c, fit.alpha_e, fit.iterations, fit.exit_bp, fit.entry_bp
    );
    let hf = fit.model.irf(12, Normalization::default())?;
    let rf = rf_irf(&solve_rf(&RFParams::from_model(&params))?, 12, Normalization::default())?;
    println!("{:>3} {:>9} {:>9} {:>9} {:>9}", "h", "Y hf", "Y rf", "gap pp", "Gamma");
    for h in 0..=12 {
        let (a, b) = (hf.get(Series::Output)[h], rf.get(Series::Output)[h]);
        println!("{h:>3} {a:>9.4} {b:>9.4} {:>9.4} {:>9.4}", a - b, hf.get(Series::Gamma)[h]);
    }
    Ok(())
}
