//! Impulse responses of the heterogeneous-firm and representative-firm
//! economies to a contractionary monetary policy shock that raises the
//! quarterly real rate by one percentage point on impact.

use std::time::Instant;

use firmdyn::dynamics::{DynamicsOptions, HfModel, Normalization, Series};
use firmdyn::equilibrium::solve_stationary_equilibrium;
use firmdyn::params::ModelParams;
use firmdyn::rfmodel::{rf_irf, solve_rf, RFParams};

fn main() -> firmdyn::Result<()> {
    let params = ModelParams::baseline();
    let t0 = Instant::now();
    let ss = solve_stationary_equilibrium(&params)?;
    let model = HfModel::build(&ss, &DynamicsOptions::default())?;
    println!(
        "solved {} variables in {:.1?}: rho(P) = {:.4}, rho(F) = {:.4}",
        model.linear.dim(),
        t0.elapsed(),
        model.solution.diagnostics.transition_radius,
        model.solution.diagnostics.forward_radius
    );
    let hf = model.irf(40, Normalization::default())?;
    let rf = rf_irf(&solve_rf(&RFParams::from_model(&params))?, 40, Normalization::default())?;

    println!("{:<20} {:>10} {:>10} {:>8} {:>8}", "series", "HF impact", "RF impact", "HF ac4", "RF ac4");
    for s in Series::ALL {
        println!(
            "{:<20} {:>10.4} {:>10.4} {:>8.4} {:>8.4}",
            s.name(),
            hf.impact(s),
            rf.impact(s),
            hf.ac4(s),
            rf.ac4(s)
        );
    }
    let fmt = |s: Series| {
        hf.get(s)[..6]
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("exit rate (bp), h=0..5:  {}", fmt(Series::ExitRateBp));
    println!("entry rate (bp), h=0..5: {}", fmt(Series::EntryRateBp));
    println!("firm mass at h=20: {:.4}%", hf.get(Series::Gamma)[20]);
    Ok(())
}
