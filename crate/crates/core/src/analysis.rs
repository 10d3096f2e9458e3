//! Diagnostics built on the solved model: entry and exit rates measured as
//! masses over the average of adjacent firm counts, the TFP decomposition,
//! perfect-foresight price-by-price decompositions, the employment gap
//! between the two models, and shifts of the productivity distribution.

use crate::dynamics::{HfSystem, IrfSet, Series};
use crate::equilibrium::{entrant_masses, tfp, SteadyState};
use crate::error::{Error, Result};
use crate::firm::{labor_policy, solve_perfect_foresight, solve_firm_stationary, FirmSolution, Prices};
use crate::stochproc::MarkovChain;

/// Default perfect-foresight horizon in quarters.
pub const PF_HORIZON: usize = 200;

/// Entry and exit rates along a path of measures.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePath {
    /// Exiting mass over `(Gamma_t + Gamma_{t+1}) / 2`.
    pub exit_rate: Vec<f64>,
    /// Entering mass over `(Gamma_{t-1} + Gamma_t) / 2`.
    pub entry_rate: Vec<f64>,
    pub exit_mass: Vec<f64>,
    pub entrant_mass: Vec<f64>,
    pub firm_mass: Vec<f64>,
    pub stationary_exit_rate: f64,
    pub stationary_entry_rate: f64,
}

impl RatePath {
    pub fn exit_bp(&self) -> Vec<f64> {
        self.exit_rate.iter().map(|r| 1e4 * (r - self.stationary_exit_rate)).collect()
    }

    pub fn entry_bp(&self) -> Vec<f64> {
        self.entry_rate.iter().map(|r| 1e4 * (r - self.stationary_entry_rate)).collect()
    }
}

/// Rates for periods `0..len-1` from measures `mu_0..mu_{len-1}`, the policies
/// of the same periods, and the firm mass in the period before the path.
/// `entrants[t]` is the mass of firms operating for the first time in `t`.
pub fn measure_rates(
    measures: &[Vec<f64>],
    solutions: &[FirmSolution],
    entrants: &[f64],
    mass_before: f64,
    stationary: (f64, f64),
) -> Result<RatePath> {
    let len = measures.len();
    if solutions.len() != len || entrants.len() != len || len < 2 {
        return Err(Error::DimensionMismatch("measure, policy and entrant paths must align".into()));
    }
    let firm_mass: Vec<f64> = measures.iter().map(|m| m.iter().sum()).collect();
    if firm_mass.iter().any(|g| !(*g > 0.0)) || !(mass_before > 0.0) {
        return Err(Error::Divergence("non-positive firm mass on the path".into()));
    }
    let exit_mass: Vec<f64> = measures
        .iter()
        .zip(solutions)
        .map(|(m, s)| m.iter().zip(&s.continuation_prob).map(|(mu, c)| mu * (1.0 - c)).sum())
        .collect();
    let n = len - 1;
    let exit_rate = (0..n)
        .map(|t| exit_mass[t] / (0.5 * (firm_mass[t] + firm_mass[t + 1])))
        .collect();
    let entry_rate = (0..n)
        .map(|t| {
            let before = if t == 0 { mass_before } else { firm_mass[t - 1] };
            entrants[t] / (0.5 * (before + firm_mass[t]))
        })
        .collect();
    Ok(RatePath {
        exit_rate,
        entry_rate,
        exit_mass: exit_mass[..n].to_vec(),
        entrant_mass: entrants[..n].to_vec(),
        firm_mass: firm_mass[..n].to_vec(),
        stationary_exit_rate: stationary.0,
        stationary_entry_rate: stationary.1,
    })
}

/// `A_t = [Gamma_t E_z(z^(1/(1-nu)))]^(1-nu)` and its two components.
#[derive(Debug, Clone, PartialEq)]
pub struct TfpPath {
    pub firm_mass: Vec<f64>,
    pub productivity_index: Vec<f64>,
    pub tfp: Vec<f64>,
}

pub fn tfp_path(measures: &[Vec<f64>], levels: &[f64], nu: f64) -> TfpPath {
    let mut out = TfpPath {
        firm_mass: Vec::with_capacity(measures.len()),
        productivity_index: Vec::with_capacity(measures.len()),
        tfp: Vec::with_capacity(measures.len()),
    };
    for m in measures {
        let (a, idx) = tfp(m, levels, nu);
        out.firm_mass.push(m.iter().sum());
        out.productivity_index.push(idx);
        out.tfp.push(a);
    }
    out
}

/// Log deviations (fractions, not percent) of the prices entering the firm
/// problem, indexed by quarter; missing quarters are at the stationary value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PricePath {
    pub rel_price: Vec<f64>,
    pub wage: Vec<f64>,
    pub real_rate: Vec<f64>,
}

impl PricePath {
    /// Relative price, wage and real-rate responses of an impulse-response set.
    pub fn from_irf(irf: &IrfSet) -> Self {
        let frac = |s: Series| irf.get(s).iter().map(|v| v / 100.0).collect();
        Self {
            rel_price: frac(Series::RelPrice),
            wage: frac(Series::RealWage),
            real_rate: frac(Series::RealRate),
        }
    }

    pub fn only(&self, which: PriceKind) -> Self {
        let mut out = PricePath::default();
        match which {
            PriceKind::RealRate => out.real_rate = self.real_rate.clone(),
            PriceKind::Wage => out.wage = self.wage.clone(),
            PriceKind::RelPrice => out.rel_price = self.rel_price.clone(),
        }
        out
    }

    fn at(v: &[f64], t: usize) -> f64 {
        v.get(t).copied().unwrap_or(0.0)
    }

    fn tail(&self) -> f64 {
        [&self.rel_price, &self.wage, &self.real_rate]
            .iter()
            .filter_map(|v| v.last())
            .fold(0.0f64, |a, b| a.max(b.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let s = |v: &Vec<f64>| v.iter().map(|x| x * factor).collect();
        Self {
            rel_price: s(&self.rel_price),
            wage: s(&self.wage),
            real_rate: s(&self.real_rate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceKind {
    RealRate,
    Wage,
    RelPrice,
}

impl PriceKind {
    pub const ALL: [PriceKind; 3] = [PriceKind::RealRate, PriceKind::Wage, PriceKind::RelPrice];

    pub fn name(&self) -> &'static str {
        match self {
            PriceKind::RealRate => "r",
            PriceKind::Wage => "w",
            PriceKind::RelPrice => "p",
        }
    }
}

/// Firm policies and measures along a perfect-foresight price path.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfectForesight {
    pub solutions: Vec<FirmSolution>,
    pub measures: Vec<Vec<f64>>,
    pub entrants: Vec<f64>,
    pub employment: Vec<f64>,
    pub rates: RatePath,
}

/// Solves the firm problem backward from the stationary solution at
/// `horizon` and pushes the measure forward from the stationary measure.
/// The discount factor follows `sdf_t = beta exp(-r_t)`.
pub fn perfect_foresight(ss: &SteadyState, path: &PricePath, horizon: usize) -> Result<PerfectForesight> {
    if ss.env.variant.free_entry().is_some() {
        return Err(Error::ConflictingVariant(
            "perfect-foresight decomposition holds the entrant mass fixed; not defined under free entry".into(),
        ));
    }
    if horizon < 2 {
        return Err(Error::HorizonTooShort(format!("horizon {horizon} < 2")));
    }
    let env = &ss.env;
    let base = ss.prices;
    let beta = ss.params.beta;
    let prices: Vec<Prices> = (0..=horizon)
        .map(|t| {
            let dr = PricePath::at(&path.real_rate, t);
            Prices {
                p: base.p * PricePath::at(&path.rel_price, t).exp(),
                w: base.w * PricePath::at(&path.wage, t).exp(),
                sdf: beta * (-dr).exp(),
                real_rate: dr.exp() / beta,
            }
        })
        .collect();
    let solutions = solve_perfect_foresight(env, &prices, &ss.firm)?;
    let chain = &env.chain;
    let m = ss.measure.entrant_scale;
    let delayed = env.variant.delayed_entry;
    let mut measures: Vec<Vec<f64>> = Vec::with_capacity(horizon + 1);
    let mut entrants = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let (prev_mu, prev_sol) = if t == 0 {
            (&ss.measure.mass, &ss.firm)
        } else {
            (&measures[t - 1], &solutions[t - 1])
        };
        let survivors: Vec<f64> = prev_mu.iter().zip(&prev_sol.continuation_prob).map(|(a, b)| a * b).collect();
        let new = if delayed {
            entrant_masses(&prev_sol.entry_prob, chain, m, true)
        } else {
            entrant_masses(&solutions[t].entry_prob, chain, m, false)
        };
        let mut mu = chain.push_forward(&survivors);
        mu.iter_mut().zip(&new).for_each(|(a, b)| *a += b);
        entrants.push(new.iter().sum());
        measures.push(mu);
    }
    let employment = measures
        .iter()
        .zip(&solutions)
        .map(|(mu, s)| mu.iter().zip(&s.labor).map(|(a, n)| a * n).sum())
        .collect();
    let stationary = (ss.aggregates.quarterly_exit_rate, stationary_entry_rate(ss));
    let rates = measure_rates(&measures, &solutions, &entrants, ss.measure.total(), stationary)?;
    Ok(PerfectForesight {
        solutions,
        measures,
        entrants,
        employment,
        rates,
    })
}

/// Entry rate in the stationary equilibrium under the average-mass convention.
pub fn stationary_entry_rate(ss: &SteadyState) -> f64 {
    ss.aggregates.entrant_mass / ss.measure.total()
}

/// Entry/exit responses (basis points) when only one price follows its
/// equilibrium path, plus the response with all three moving.
#[derive(Debug, Clone, PartialEq)]
pub struct Contributions {
    pub total: RatePath,
    pub real_rate: RatePath,
    pub wage: RatePath,
    pub rel_price: RatePath,
}

impl Contributions {
    pub fn get(&self, which: PriceKind) -> &RatePath {
        match which {
            PriceKind::RealRate => &self.real_rate,
            PriceKind::Wage => &self.wage,
            PriceKind::RelPrice => &self.rel_price,
        }
    }
}

pub fn price_contributions(irf: &IrfSet, ss: &SteadyState, horizon: usize) -> Result<Contributions> {
    let path = PricePath::from_irf(irf);
    if path.tail() > 1e-6 {
        return Err(Error::HorizonTooShort(format!(
            "prices still {:.2e} away from the stationary equilibrium at the last horizon",
            path.tail()
        )));
    }
    let run = |p: &PricePath| perfect_foresight(ss, p, horizon).map(|r| r.rates);
    Ok(Contributions {
        total: run(&path)?,
        real_rate: run(&path.only(PriceKind::RealRate))?,
        wage: run(&path.only(PriceKind::Wage))?,
        rel_price: run(&path.only(PriceKind::RelPrice))?,
    })
}

/// Employment gaps between the two economies, in percentage points.
#[derive(Debug, Clone, PartialEq)]
pub struct EmploymentGaps {
    /// Heterogeneous-firm labour demand at the representative-firm price
    /// paths, minus representative-firm employment.
    pub rf_prices: Vec<f64>,
    /// Heterogeneous-firm minus representative-firm equilibrium employment.
    pub equilibrium: Vec<f64>,
}

pub fn employment_gap_rf_prices(
    rf: &IrfSet,
    hf: &IrfSet,
    ss: &SteadyState,
    horizon: usize,
) -> Result<EmploymentGaps> {
    let pf = perfect_foresight(ss, &PricePath::from_irf(rf), horizon)?;
    let n_ss = ss.aggregates.employment;
    let len = rf.horizon().min(hf.horizon()) + 1;
    let rf_n = rf.get(Series::Employment);
    let hf_n = hf.get(Series::Employment);
    Ok(EmploymentGaps {
        rf_prices: (0..len).map(|t| 100.0 * (pf.employment[t] / n_ss).ln() - rf_n[t]).collect(),
        equilibrium: (0..len).map(|t| hf_n[t] - rf_n[t]).collect(),
    })
}

/// `mu_h / Gamma_h - mu / Gamma` at the requested horizons of a
/// heterogeneous-firm impulse response.
pub fn distribution_shift(system: &HfSystem, irf: &IrfSet, horizons: &[usize]) -> Result<Vec<Vec<f64>>> {
    let ss = crate::dynamics::ResidualSystem::steady_state(system);
    let base = normalized(&system.masses(&ss));
    horizons
        .iter()
        .map(|&h| {
            let dev = irf
                .states
                .get(h)
                .ok_or_else(|| Error::HorizonTooShort(format!("horizon {h} beyond impulse response")))?;
            if dev.len() != ss.len() {
                return Err(Error::DimensionMismatch("impulse response states do not match the system".into()));
            }
            let x: Vec<f64> = ss.iter().zip(dev).map(|(a, b)| a + b).collect();
            Ok(normalized(&system.masses(&x))
                .iter()
                .zip(&base)
                .map(|(a, b)| a - b)
                .collect())
        })
        .collect()
}

fn normalized(m: &[f64]) -> Vec<f64> {
    let g: f64 = m.iter().sum();
    m.iter().map(|x| x / g).collect()
}

/// Exit and entry probabilities by productivity at the stationary prices
/// and after permanent one-percent increases in `w`, `p` and the real rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityProfiles {
    pub log_z: Vec<f64>,
    pub exit_prob: Vec<f64>,
    pub entry_prob: Vec<f64>,
    pub exit_prob_wage_up: Vec<f64>,
    pub exit_prob_price_up: Vec<f64>,
    pub exit_prob_rate_up: Vec<f64>,
}

pub fn probability_profiles(ss: &SteadyState, bump: f64) -> Result<ProbabilityProfiles> {
    let env = &ss.env;
    let base = ss.prices;
    let exit_at = |prices: Prices| -> Result<Vec<f64>> { Ok(solve_firm_stationary(env, &prices)?.exit_prob()) };
    let mut wage = base;
    wage.w *= 1.0 + bump;
    let mut price = base;
    price.p *= 1.0 + bump;
    let mut rate = base;
    rate.sdf /= 1.0 + bump;
    rate.real_rate *= 1.0 + bump;
    Ok(ProbabilityProfiles {
        log_z: env.chain.grid().to_vec(),
        exit_prob: ss.firm.exit_prob(),
        entry_prob: ss.firm.entry_prob.clone(),
        exit_prob_wage_up: exit_at(wage)?,
        exit_prob_price_up: exit_at(price)?,
        exit_prob_rate_up: exit_at(rate)?,
    })
}

/// Firm counts and exit rates by employment size class.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeClass {
    /// Lower bound of the class in employees (inclusive).
    pub lower: f64,
    /// Upper bound (exclusive; infinite for the top class).
    pub upper: f64,
    pub firm_share: f64,
    pub employment_share: f64,
    pub exit_rate: f64,
    pub entrant_share: f64,
}

/// Default class bounds: 1-4, 5-9, 10-19, 20-49, 50-99, 100-249, 250-499, 500+.
pub const SIZE_CLASS_BOUNDS: [f64; 8] = [0.0, 5.0, 10.0, 20.0, 50.0, 100.0, 250.0, 500.0];

pub fn size_profile(ss: &SteadyState, bounds: &[f64]) -> Vec<SizeClass> {
    let mu = &ss.measure.mass;
    let n = &ss.firm.labor;
    let gamma = ss.measure.total();
    let emp = ss.aggregates.employment;
    let entrants = entrant_masses(&ss.firm.entry_prob, &ss.env.chain, ss.measure.entrant_scale, ss.env.variant.delayed_entry);
    (0..bounds.len())
        .map(|c| {
            let lower = bounds[c];
            let upper = bounds.get(c + 1).copied().unwrap_or(f64::INFINITY);
            let mut mass = 0.0;
            let mut jobs = 0.0;
            let mut exits = 0.0;
            let mut new = 0.0;
            for i in 0..mu.len() {
                if n[i] >= lower && n[i] < upper {
                    mass += mu[i];
                    jobs += mu[i] * n[i];
                    exits += mu[i] * (1.0 - ss.firm.continuation_prob[i]);
                    new += entrants[i];
                }
            }
            SizeClass {
                lower,
                upper,
                firm_share: mass / gamma,
                employment_share: jobs / emp,
                exit_rate: if mass > 0.0 { exits / mass } else { f64::NAN },
                entrant_share: if mass > 0.0 { new / mass } else { f64::NAN },
            }
        })
        .collect()
}

/// Employment change (percent of stationary employment) accounted for by
/// entry and exit: `(d entry_rate * entrant_size - d exit_rate * exiting_size) * Gamma / N`,
/// with rate changes in basis points.
pub fn extensive_margin_employment(
    entry_bp: f64,
    exit_bp: f64,
    entrant_size: f64,
    exiting_size: f64,
    firm_mass: f64,
    employment: f64,
) -> f64 {
    100.0 * (entry_bp * entrant_size - exit_bp * exiting_size) * 1e-4 * firm_mass / employment
}

/// Labour demand of a firm at productivity level `z` at stationary prices.
pub fn firm_size(ss: &SteadyState, z: f64) -> f64 {
    labor_policy(z, ss.prices.p, ss.prices.w, ss.env.nu)
}

/// Helper for callers that want survival paths without the full
/// perfect-foresight machinery.
pub fn survival_after(mass: &[f64], survive: &[f64], chain: &MarkovChain, quarters: usize) -> f64 {
    crate::equilibrium::survival_share(mass, survive, chain, quarters)
}
