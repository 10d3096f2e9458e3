//! Impact responses of output and the entry and exit rates across model
//! variants, each built from the baseline calibration.

use std::time::Instant;

use firmdyn::dynamics::{DynamicsOptions, Normalization, Series};
use firmdyn::equilibrium::Moments;
use firmdyn::params::ModelParams;
use firmdyn::rfmodel::{rf_irf, solve_rf, RFParams};
use firmdyn::variants::{build_named, VARIANT_NAMES};

fn main() -> firmdyn::Result<()> {
    let base = ModelParams::baseline();
    let targets = Moments::baseline_targets();
    let opts = DynamicsOptions::default();
    let rf = rf_irf(&solve_rf(&RFParams::from_model(&base))?, 0, Normalization::default())?;
    let names: Vec<String> = std::env::args().skip(1).collect();
    let selected: Vec<&str> = if names.is_empty() {
        VARIANT_NAMES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    println!(
        "{:<22} {:>9} {:>9} {:>9} {:>11} {:>8}",
        "variant", "exit bp", "entry bp", "output %", "HF-RF pp", "secs"
    );
    for name in selected {
        let t0 = Instant::now();
        let model = build_named(name, &base, &targets, &opts)?;
        let irf = model.irf(0, Normalization::default())?;
        let y = irf.impact(Series::Output);
        println!(
            "{:<22} {:>9.3} {:>9.3} {:>9.4} {:>11.4} {:>8.1}",
            name,
            irf.impact(Series::ExitRateBp),
            irf.impact(Series::EntryRateBp),
            y,
            y - rf.impact(Series::Output),
            t0.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
