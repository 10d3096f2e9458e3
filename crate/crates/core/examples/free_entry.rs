//! Free entry with a congestion externality in the entry cost, recalibrated
//! to the baseline moments, across congestion elasticities.

use firmdyn::dynamics::{DynamicsOptions, HfModel};
use firmdyn::equilibrium::Moments;
use firmdyn::params::ModelParams;
use firmdyn::variants::{rate_impacts, recalibrate, solve_free_entry_stationary, VariantConfig};

fn main() -> firmdyn::Result<()> {
    let alphas: Vec<f64> = match std::env::args().nth(1) {
        Some(list) => list.split(',').map(|s| s.trim().parse().expect("numeric alpha")).collect(),
        None => vec![15.0, 5.0, 1.0],
    };
    let targets = Moments::baseline_targets();
    let variant = VariantConfig::named("free_entry")?;
    let cal = recalibrate(&ModelParams::baseline(), &variant, &targets)?;
    let p = &cal.params;
    println!(
        "recalibrated: mu_c {:.4}, sigma_c {:.4}, a_z {:.4}",
        p.operating_cost.location, p.operating_cost.scale, p.productivity.mean
    );
    println!("{:>8} {:>10} {:>10} {:>12}", "alpha", "exit bp", "entry bp", "entrants");
    for alpha in alphas {
        let ss = solve_free_entry_stationary(p, targets.employment, alpha)?;
        let (x, e) = rate_impacts(&HfModel::build(&ss, &DynamicsOptions::default())?)?;
        println!("{alpha:>8.3} {x:>10.3} {e:>10.3} {:>12.4e}", ss.params.entrant_mass);
    }
    Ok(())
}
