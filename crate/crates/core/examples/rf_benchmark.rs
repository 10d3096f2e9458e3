//! Representative-firm benchmark: closed form against the generic
//! rational-expectations solver, and its impulse responses.

use firmdyn::dynamics::{linearize, solve_linear_re, Normalization, Series, SolverOptions};
use firmdyn::params::ModelParams;
use firmdyn::rfmodel::{rf_irf, solve_rf, RFParams, RfSystem};

fn main() -> firmdyn::Result<()> {
    let params = RFParams::from_model(&ModelParams::baseline());
    let closed = solve_rf(&params)?;
    let sol = solve_linear_re(&linearize(&RfSystem { params }, 1e-6)?, params.rho_m, &SolverOptions::default())?;
    println!("impact coefficients   closed form        generic solver");
    for (name, a, b) in [
        ("output", closed.a_y, sol.impact[0]),
        ("inflation", closed.a_pi, sol.impact[1]),
        ("nominal rate", closed.a_nominal, sol.impact[2]),
    ] {
        println!("{name:<14} {a:>18.12} {b:>18.12}");
    }
    let irf = rf_irf(&closed, 8, Normalization::default())?;
    println!("response to a 1pp real-rate increase (percent)");
    for s in [Series::Output, Series::Inflation, Series::NominalRate, Series::RealWage] {
        let v: Vec<String> = irf.get(s).iter().map(|x| format!("{x:7.3}")).collect();
        println!("{:<14} {}", s.name(), v.join(" "));
    }
    println!("output four-quarter autocorrelation {:.6}", irf.ac4(Series::Output));
    Ok(())
}
