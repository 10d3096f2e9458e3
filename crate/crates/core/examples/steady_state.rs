//! Stationary equilibrium at the baseline calibration.

use firmdyn::equilibrium::solve_stationary_equilibrium;
use firmdyn::params::ModelParams;

fn main() -> firmdyn::Result<()> {
    let ss = solve_stationary_equilibrium(&ModelParams::baseline())?;
    let a = &ss.aggregates;
    println!("relative price p      {:.6}", ss.prices.p);
    println!("real wage w           {:.8}", ss.prices.w);
    println!("employment N          {:.6}", a.employment);
    println!("output Y              {:.6}", a.output);
    println!("firm mass             {:.6}", a.firm_mass);
    println!("annual exit rate      {:.4}%", 100.0 * a.annual_exit_rate);
    println!("quarterly exit rate   {:.4}%", 100.0 * a.quarterly_exit_rate);
    println!("quarterly entry rate  {:.4}%", 100.0 * a.entry_rate);
    println!("incumbent size        {:.3}", a.incumbent_size);
    println!("exiting size          {:.3}", a.exiting_size);
    println!("TFP                   {:.6}", a.tfp);
    println!("dividends             {:.6}", a.dividends);
    println!("transfers             {:.6}", a.transfers);
    println!("labour-supply residual {:.2e}", ss.labor_supply_residual());
    println!("goods residual         {:.2e}", ss.goods_residual());
    Ok(())
}
