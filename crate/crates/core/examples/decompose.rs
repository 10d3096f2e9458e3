//! Exit and entry responses when only one price follows its equilibrium
//! path, the employment gap under representative-firm prices, and the
//! shift of the productivity distribution after the shock.

use firmdyn::analysis::{distribution_shift, employment_gap_rf_prices, price_contributions, PriceKind, PF_HORIZON};
use firmdyn::dynamics::{DynamicsOptions, HfModel, Normalization};
use firmdyn::equilibrium::solve_stationary_equilibrium;
use firmdyn::params::ModelParams;
use firmdyn::rfmodel::{rf_irf, solve_rf, RFParams};

fn main() -> firmdyn::Result<()> {
    let params = ModelParams::baseline();
    let ss = solve_stationary_equilibrium(&params)?;
    let model = HfModel::build(&ss, &DynamicsOptions::default())?;
    let hf = model.irf(PF_HORIZON, Normalization::default())?;
    let rf = rf_irf(&solve_rf(&RFParams::from_model(&params))?, PF_HORIZON, Normalization::default())?;

    let c = price_contributions(&hf, &ss, PF_HORIZON)?;
    let row = |name: &str, v: Vec<f64>| {
        let s: Vec<String> = v[..6].iter().map(|x| format!("{x:8.3}")).collect();
        println!("{name:<8} {}", s.join(" "));
    };
    println!("exit rate (bp), h=0..5");
    row("all", c.total.exit_bp());
    for k in PriceKind::ALL {
        row(k.name(), c.get(k).exit_bp());
    }
    println!("entry rate (bp), h=0..5");
    row("all", c.total.entry_bp());
    for k in PriceKind::ALL {
        row(k.name(), c.get(k).entry_bp());
    }

    let gaps = employment_gap_rf_prices(&rf, &hf, &ss, PF_HORIZON)?;
    println!("employment gap (pp), h=0..5");
    row("rf_px", gaps.rf_prices);
    row("equil", gaps.equilibrium);

    let horizons = [0, 4, 20];
    let shifts = distribution_shift(&model.system, &hf, &horizons)?;
    for (h, d) in horizons.iter().zip(&shifts) {
        let sum: f64 = d.iter().sum();
        println!(
            "h={h:>2}: low-z delta {:+.3e}, high-z delta {:+.3e}, sum {:+.1e}",
            d[0],
            d[d.len() - 1],
            sum
        );
    }
    Ok(())
}
