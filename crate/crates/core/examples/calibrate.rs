//! Calibrates the operating-cost distribution and the productivity mean to
//! the baseline moments, then recovers perturbed parameters from moments the
//! model itself generates.

use firmdyn::equilibrium::{calibrate, unit_wage_moments, Moments};
use firmdyn::params::ModelParams;

fn main() -> firmdyn::Result<()> {
    let base = ModelParams::baseline();
    let cal = calibrate(&Moments::baseline_targets(), &base)?;
    let p = &cal.params;
    println!("baseline targets ({} iterations, residual {:.1e})", cal.iterations, cal.residual);
    println!("  mu_c {:.6}  sigma_c {:.6}  a_z {:.6}", p.operating_cost.location, p.operating_cost.scale, p.productivity.mean);
    println!("  M {:.6e}  kappa0 {:.6}", p.entrant_mass, p.kappa0);
    println!("  achieved {:?}", cal.achieved);

    let mut truth = base.clone();
    truth.operating_cost.location -= 0.5;
    truth.productivity.mean += 0.05;
    let (targets, _) = unit_wage_moments(&truth)?;
    let back = calibrate(&Moments { employment: 0.6, ..targets }, &base)?;
    println!("round trip from generated moments");
    println!("  mu_c {:.9} (true {:.9})", back.params.operating_cost.location, truth.operating_cost.location);
    println!("  sigma_c {:.9} (true {:.9})", back.params.operating_cost.scale, truth.operating_cost.scale);
    println!("  a_z {:.9} (true {:.9})", back.params.productivity.mean, truth.productivity.mean);
    Ok(())
}
