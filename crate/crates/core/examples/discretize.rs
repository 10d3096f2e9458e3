//! Quarterly productivity process implied by the annual employment process,
//! and its Rouwenhorst discretization.

use firmdyn::params::{ANNUAL_EMPLOYMENT_PERSISTENCE, ANNUAL_EMPLOYMENT_SD};
use firmdyn::stochproc::{binomial_half, chain_stationary, quarterly_from_annual, rouwenhorst, AR1Spec};

fn main() -> firmdyn::Result<()> {
    let nu: f64 = std::env::args().nth(1).map_or(Ok(0.9), |s| s.parse()).expect("nu must be a number");
    let (rho, sd) = quarterly_from_annual(ANNUAL_EMPLOYMENT_PERSISTENCE, ANNUAL_EMPLOYMENT_SD, nu)?;
    println!("nu = {nu}: rho_z = {rho:.6}, sigma_z = {sd:.6}");
    let spec = AR1Spec::new(rho, sd, 0.0)?;
    let chain = rouwenhorst(&spec, 50)?;
    let pi = chain_stationary(chain.transition())?;
    let dev = pi.iter().zip(binomial_half(49)).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let grid = chain.grid();
    println!("grid [{:.4}, {:.4}], unconditional sd {:.4}", grid[0], grid[49], spec.unconditional_sd());
    println!("max |stationary - binomial(49, 1/2)| = {dev:.2e}");
    Ok(())
}
