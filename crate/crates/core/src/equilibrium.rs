//! Stationary equilibrium: the firm measure, aggregation, market clearing and
//! moment-matching calibration.

use nalgebra::{DMatrix, DVector};
use roots::{find_root_brent, SimpleConvergency};

use crate::error::{Error, Result};
use crate::firm::{solve_firm_stationary, FirmEnv, FirmSolution, Prices};
use crate::params::ModelParams;
use crate::stochproc::MarkovChain;
use crate::variants::EntryRegime;

/// Mass of operating firms at each grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmMeasure {
    pub mass: Vec<f64>,
    /// Mass of potential entrants `M` (or of actual entrants under free entry).
    pub entrant_scale: f64,
}

impl FirmMeasure {
    pub fn new(mass: Vec<f64>, entrant_scale: f64) -> Result<Self> {
        if mass.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::invalid("mass", "firm masses must be finite and non-negative"));
        }
        if !(entrant_scale >= 0.0) || !entrant_scale.is_finite() {
            return Err(Error::invalid("entrant_scale", "must be finite and non-negative"));
        }
        Ok(Self { mass, entrant_scale })
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Total mass of firms `Gamma`.
    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `mu / Gamma`.
    pub fn distribution(&self) -> Vec<f64> {
        let g = self.total();
        self.mass.iter().map(|m| m / g).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mass: self.mass.iter().map(|m| m * factor).collect(),
            entrant_scale: self.entrant_scale * factor,
        }
    }
}

/// Mass of new firms that operate in the period after a decision round:
/// `M G_e(e*) q`, passed once through the transition when entry is delayed.
pub fn entrant_masses(entry_prob: &[f64], chain: &MarkovChain, scale: f64, delayed: bool) -> Vec<f64> {
    let direct: Vec<f64> = entry_prob
        .iter()
        .zip(chain.entrant())
        .map(|(e, q)| scale * e * q)
        .collect();
    if delayed {
        chain.push_forward(&direct)
    } else {
        direct
    }
}

/// One step of the law of motion
/// `mu'(z_i) = sum_j G_c(c*(z_j)) P_ji mu(z_j) + M G_e(e*'(z_i)) q(z_i)`.
pub fn step_measure(
    measure: &FirmMeasure,
    survive: &[f64],
    entry_prob: &[f64],
    chain: &MarkovChain,
    delayed: bool,
) -> FirmMeasure {
    let survivors: Vec<f64> = measure.mass.iter().zip(survive).map(|(m, s)| m * s).collect();
    let mut mass = chain.push_forward(&survivors);
    for (m, e) in mass
        .iter_mut()
        .zip(entrant_masses(entry_prob, chain, measure.entrant_scale, delayed))
    {
        *m += e;
    }
    FirmMeasure {
        mass,
        entrant_scale: measure.entrant_scale,
    }
}

/// Stationary measure for a firm solution, solved directly from
/// `(I - P' diag(s)) mu = entrants` and checked against one step of the law
/// of motion.
pub fn stationary_measure(
    firm: &FirmSolution,
    chain: &MarkovChain,
    entrant_scale: f64,
    delayed: bool,
) -> Result<FirmMeasure> {
    let k = chain.len();
    let s = &firm.continuation_prob;
    if s.len() != k || firm.entry_prob.len() != k {
        return Err(Error::DimensionMismatch("firm solution vs chain".into()));
    }
    if s.iter().all(|&x| x >= 1.0) {
        return Err(Error::Divergence("no firm ever exits".into()));
    }
    let p = chain.transition();
    let lhs = DMatrix::from_fn(k, k, |i, j| f64::from(u8::from(i == j)) - p[(j, i)] * s[j]);
    let rhs = DVector::from_vec(entrant_masses(&firm.entry_prob, chain, entrant_scale, delayed));
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Divergence("survival operator has a unit eigenvalue".into()))?;
    let total: f64 = sol.iter().sum();
    let floor = -1e-10 * total.abs().max(f64::MIN_POSITIVE);
    if sol.iter().any(|m| !m.is_finite() || *m < floor) {
        return Err(Error::Divergence("stationary measure is not a non-negative fixed point".into()));
    }
    let measure = FirmMeasure {
        mass: sol.iter().map(|m| m.max(0.0)).collect(),
        entrant_scale,
    };
    let next = step_measure(&measure, s, &firm.entry_prob, chain, delayed);
    let scale = measure.mass.iter().fold(0.0f64, |a, b| a.max(*b));
    let gap = next
        .mass
        .iter()
        .zip(&measure.mass)
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    if scale > 0.0 && gap > 1e-12 * scale {
        return Err(Error::Divergence(format!("fixed-point residual {gap:.3e}")));
    }
    Ok(measure)
}

/// Stationary measure by repeated application of [`step_measure`] from
/// `start`. Slow when survival is close to one; mainly a cross-check.
pub fn iterate_measure(
    start: &FirmMeasure,
    firm: &FirmSolution,
    chain: &MarkovChain,
    delayed: bool,
    tolerance: f64,
    max_iterations: usize,
) -> Result<FirmMeasure> {
    let mut mu = start.clone();
    let mut gap = f64::INFINITY;
    for _ in 0..max_iterations {
        let next = step_measure(&mu, &firm.continuation_prob, &firm.entry_prob, chain, delayed);
        let scale = next.mass.iter().fold(0.0f64, |a, b| a.max(*b));
        if !scale.is_finite() || scale > 1e300 {
            return Err(Error::Divergence("total mass grows without bound".into()));
        }
        gap = next
            .mass
            .iter()
            .zip(&mu.mass)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        mu = next;
        if gap <= tolerance * scale.max(f64::MIN_POSITIVE) {
            return Ok(mu);
        }
    }
    Err(Error::NonConvergence {
        what: "measure iteration",
        iterations: max_iterations,
        residual: gap,
    })
}

/// Aggregate quantities and firm-dynamics moments of a stationary
/// equilibrium (zero inflation, so consumption equals output).
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub output: f64,
    pub employment: f64,
    pub consumption: f64,
    /// Profit of production firms net of fixed costs, `Omega`.
    pub production_profit: f64,
    /// Profit of intermediate-goods firms, `Upsilon`.
    pub intermediate_profit: f64,
    pub dividends: f64,
    /// Fixed operating and entry costs remitted to households.
    pub transfers: f64,
    pub tfp: f64,
    /// `E_z(z^(1/(1-nu)))` under `mu / Gamma`.
    pub productivity_index: f64,
    pub firm_mass: f64,
    /// Mass of firms in their first period of operation.
    pub entrant_mass: f64,
    pub entrant_employment: f64,
    pub incumbent_size: f64,
    pub exiting_size: f64,
    pub quarterly_exit_rate: f64,
    pub annual_exit_rate: f64,
    pub entry_rate: f64,
}

/// Aggregate TFP `[Gamma E_z(z^(1/(1-nu)))]^(1-nu)` and the productivity index.
pub fn tfp(mass: &[f64], levels: &[f64], nu: f64) -> (f64, f64) {
    let gamma: f64 = mass.iter().sum();
    let e = 1.0 / (1.0 - nu);
    let index = mass
        .iter()
        .zip(levels)
        .map(|(m, z)| m * z.powf(e))
        .sum::<f64>()
        / gamma;
    ((gamma * index).powf(1.0 - nu), index)
}

/// Share of an initial mass still operating after `quarters` applications of
/// survival and the productivity transition.
pub fn survival_share(mass: &[f64], survive: &[f64], chain: &MarkovChain, quarters: usize) -> f64 {
    let total: f64 = mass.iter().sum();
    let mut x = mass.to_vec();
    for _ in 0..quarters {
        let surv: Vec<f64> = x.iter().zip(survive).map(|(m, s)| m * s).collect();
        x = chain.push_forward(&surv);
    }
    x.iter().sum::<f64>() / total
}

pub fn compute_aggregates(
    measure: &FirmMeasure,
    firm: &FirmSolution,
    prices: &Prices,
    env: &FirmEnv,
) -> Aggregates {
    let mu = &measure.mass;
    let z = env.chain.levels();
    let nu = env.nu;
    let scale = measure.entrant_scale;
    let delayed = env.variant.delayed_entry;
    let output: f64 = mu.iter().zip(&z).zip(&firm.labor).map(|((m, z), n)| m * z * n.powf(nu)).sum();
    let employment: f64 = mu.iter().zip(&firm.labor).map(|(m, n)| m * n).sum();
    let gamma = measure.total();

    let op = env.operating_cost_at(prices);
    let operating: f64 = mu
        .iter()
        .zip(&firm.exit_threshold)
        .map(|(m, c)| m * op.partial_expectation(*c))
        .sum();
    let entry_costs = match env.variant.entry {
        EntryRegime::PotentialEntrants => {
            let en = env.entry_cost_at(prices);
            scale
                * env
                    .chain
                    .entrant()
                    .iter()
                    .zip(&firm.entry_threshold)
                    .map(|(q, e)| q * en.partial_expectation(*e))
                    .sum::<f64>()
        }
        EntryRegime::Free(fe) => scale * fe.entry_cost,
    };
    let transfers = operating + entry_costs;

    let entrants = entrant_masses(&firm.entry_prob, &env.chain, scale, delayed);
    let entrant_mass: f64 = entrants.iter().sum();
    let entrant_employment: f64 = entrants.iter().zip(&firm.labor).map(|(m, n)| m * n).sum();

    let exiting: Vec<f64> = mu.iter().zip(&firm.continuation_prob).map(|(m, s)| m * (1.0 - s)).collect();
    let exit_mass: f64 = exiting.iter().sum();
    let exiting_size = exiting.iter().zip(&firm.labor).map(|(m, n)| m * n).sum::<f64>() / exit_mass;

    let (tfp, productivity_index) = tfp(mu, &z, nu);
    let production_profit = prices.p * output - prices.w * employment - transfers;
    let intermediate_profit = (1.0 - prices.p) * output;

    Aggregates {
        output,
        employment,
        consumption: output,
        production_profit,
        intermediate_profit,
        dividends: production_profit + intermediate_profit,
        transfers,
        tfp,
        productivity_index,
        firm_mass: gamma,
        entrant_mass,
        entrant_employment,
        incumbent_size: (employment - entrant_employment) / (gamma - entrant_mass),
        exiting_size,
        quarterly_exit_rate: exit_mass / gamma,
        annual_exit_rate: 1.0 - survival_share(mu, &firm.continuation_prob, &env.chain, 4),
        entry_rate: entrant_mass / gamma,
    }
}

/// The four calibration targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub annual_exit_rate: f64,
    pub incumbent_size: f64,
    pub exiting_size: f64,
    /// Employment-to-population ratio `N`.
    pub employment: f64,
}

impl Moments {
    /// 8.6 per cent annual exit, 19.2 and 7.7 employees per incumbent and
    /// exiting firm, employment ratio 0.6.
    pub fn baseline_targets() -> Self {
        Self {
            annual_exit_rate: 0.086,
            incumbent_size: 19.2,
            exiting_size: 7.7,
            employment: 0.6,
        }
    }

    pub fn from_aggregates(a: &Aggregates) -> Self {
        Self {
            annual_exit_rate: a.annual_exit_rate,
            incumbent_size: a.incumbent_size,
            exiting_size: a.exiting_size,
            employment: a.employment,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.annual_exit_rate > 0.0 && self.annual_exit_rate < 1.0) {
            return Err(Error::Infeasible(format!(
                "annual exit rate {} outside (0,1); lognormal costs imply positive exit",
                self.annual_exit_rate
            )));
        }
        for (name, v) in [
            ("incumbent size", self.incumbent_size),
            ("exiting size", self.exiting_size),
            ("employment", self.employment),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Infeasible(format!("{name} target must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// A solved stationary equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub params: ModelParams,
    pub env: FirmEnv,
    /// `p`, `w`, and `sdf = beta`.
    pub prices: Prices,
    /// Gross nominal rate `1 / beta`.
    pub nominal_rate: f64,
    /// Gross inflation, one.
    pub inflation: f64,
    pub firm: FirmSolution,
    pub measure: FirmMeasure,
    pub aggregates: Aggregates,
}

impl SteadyState {
    /// `kappa0 C^sigma N^kappa1 / w - 1`.
    pub fn labor_supply_residual(&self) -> f64 {
        let p = &self.params;
        let a = &self.aggregates;
        p.kappa0 * a.consumption.powf(p.sigma) * a.employment.powf(p.kappa1) / self.prices.w - 1.0
    }

    /// `(C + xi/2 (Pi - 1)^2 Y - Y) / Y`.
    pub fn goods_residual(&self) -> f64 {
        let a = &self.aggregates;
        let adj = 0.5 * self.params.xi * (self.inflation - 1.0).powi(2) * a.output;
        (a.consumption + adj - a.output) / a.output
    }

    pub fn moments(&self) -> Moments {
        Moments::from_aggregates(&self.aggregates)
    }

    /// Expected value of a new firm before its productivity draw.
    pub fn entrant_value(&self) -> f64 {
        self.firm
            .value
            .iter()
            .zip(self.env.chain.entrant())
            .map(|(v, q)| v * q)
            .sum()
    }
}

/// Firm problem, measure and aggregates at given stationary prices.
pub fn solve_at_prices(
    env: &FirmEnv,
    prices: &Prices,
    entrant_scale: f64,
) -> Result<(FirmSolution, FirmMeasure, Aggregates)> {
    let firm = solve_firm_stationary(env, prices)?;
    let measure = stationary_measure(&firm, &env.chain, entrant_scale, env.variant.delayed_entry)?;
    let agg = compute_aggregates(&measure, &firm, prices, env);
    Ok((firm, measure, agg))
}

fn stationary_prices(params: &ModelParams, w: f64) -> Result<Prices> {
    Prices::new(params.stationary_relative_price(), w, params.beta)
}

fn assemble(params: &ModelParams, env: FirmEnv, w: f64) -> Result<SteadyState> {
    let prices = stationary_prices(params, w)?;
    let (firm, measure, aggregates) = solve_at_prices(&env, &prices, params.entrant_mass)?;
    Ok(SteadyState {
        params: params.clone(),
        env,
        prices,
        nominal_rate: 1.0 / params.beta,
        inflation: 1.0,
        firm,
        measure,
        aggregates,
    })
}

/// Log excess supply of goods `ln Y(w) - ln C(w)`, with `C` read off the
/// labour supply condition.
pub fn goods_gap(params: &ModelParams, env: &FirmEnv, w: f64) -> Result<f64> {
    let prices = stationary_prices(params, w)?;
    let (_, _, agg) = solve_at_prices(env, &prices, params.entrant_mass)?;
    let ln_c = (w.ln() - params.kappa0.ln() - params.kappa1 * agg.employment.ln()) / params.sigma;
    Ok(agg.output.ln() - ln_c)
}

/// Goods-market gap on a wage grid, for checking that the stationary
/// equilibrium is unique on that range.
pub fn goods_gap_profile(params: &ModelParams, wages: &[f64]) -> Result<Vec<f64>> {
    let env = params.firm_env()?;
    wages.iter().map(|&w| goods_gap(params, &env, w)).collect()
}

fn brent(lo: f64, hi: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut failure = None;
    let mut conv = SimpleConvergency {
        eps: 1e-15,
        max_iter: 200,
    };
    let root = find_root_brent(
        lo,
        hi,
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        &mut conv,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    root.map_err(|e| Error::NonConvergence {
        what: "wage root search",
        iterations: 200,
        residual: match e {
            roots::SearchError::NoBracketing => f64::INFINITY,
            _ => f64::NAN,
        },
    })
}

/// Expands `[lo, hi]` geometrically around one until `f` changes sign.
fn bracket(mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (0.8, 1.25);
    let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
    for _ in 0..12 {
        if flo * fhi <= 0.0 {
            return Ok((lo, hi));
        }
        if flo.abs() < fhi.abs() {
            lo *= 0.7;
            flo = f(lo)?;
        } else {
            hi /= 0.7;
            fhi = f(hi)?;
        }
    }
    Err(Error::MarketClearing {
        market: "goods (no wage bracket)",
        residual: flo.abs().min(fhi.abs()),
    })
}

/// Stationary equilibrium with zero inflation: `p = (gamma-1)/gamma`,
/// `R = 1/beta`, and the wage clears the goods market given labour supply.
/// Under free entry the wage is pinned by the free-entry condition instead
/// and the entrant mass clears the goods market.
pub fn solve_stationary_equilibrium(params: &ModelParams) -> Result<SteadyState> {
    let env = params.firm_env()?;
    if let EntryRegime::Free(fe) = params.variant.entry {
        return solve_free_entry_equilibrium(params, env, fe.entry_cost);
    }
    let gap = |w: f64| goods_gap(params, &env, w);
    let (lo, hi) = bracket(gap)?;
    let w = brent(lo, hi, |w| goods_gap(params, &env, w))?;
    let ss = assemble(params, env, w)?;
    check_clearing(&ss)?;
    Ok(ss)
}

fn check_clearing(ss: &SteadyState) -> Result<()> {
    let labor = ss.labor_supply_residual();
    if !(labor.abs() < 1e-8) {
        return Err(Error::MarketClearing {
            market: "labour",
            residual: labor,
        });
    }
    let goods = ss.goods_residual();
    if !(goods.abs() < 1e-8) {
        return Err(Error::MarketClearing {
            market: "goods",
            residual: goods,
        });
    }
    Ok(())
}

fn solve_free_entry_equilibrium(params: &ModelParams, env: FirmEnv, entry_cost: f64) -> Result<SteadyState> {
    if !(entry_cost > 0.0) {
        return Err(Error::invalid("free_entry_cost", "must be positive to solve the equilibrium"));
    }
    let entry_gap = |w: f64| -> Result<f64> {
        let prices = stationary_prices(params, w)?;
        let firm = solve_firm_stationary(&env, &prices)?;
        let ve: f64 = firm.value.iter().zip(env.chain.entrant()).map(|(v, q)| v * q).sum();
        Ok(ve.ln() - entry_cost.ln())
    };
    let (lo, hi) = bracket(entry_gap)?;
    let w = brent(lo, hi, entry_gap)?;
    let prices = stationary_prices(params, w)?;
    let (_, _, unit) = solve_at_prices(&env, &prices, 1.0)?;
    // Y = C with Y, N linear in the entrant mass
    let m = (w / (params.kappa0 * unit.employment.powf(params.kappa1) * unit.output.powf(params.sigma)))
        .powf(1.0 / (params.sigma + params.kappa1));
    let mut p = params.clone();
    p.entrant_mass = m;
    let ss = assemble(&p, env, w)?;
    check_clearing(&ss)?;
    Ok(ss)
}

/// Sets `kappa0` so that the stationary wage equals one at the current
/// firm-side parameters.
pub fn normalize_unit_wage(params: &ModelParams) -> Result<ModelParams> {
    let env = params.firm_env()?;
    let prices = stationary_prices(params, 1.0)?;
    let (_, _, agg) = solve_at_prices(&env, &prices, params.entrant_mass)?;
    let mut out = params.clone();
    out.kappa0 = 1.0 / (agg.consumption.powf(params.sigma) * agg.employment.powf(params.kappa1));
    Ok(out)
}

/// Moments at `w = 1`, where the scale-free moments do not depend on `M`.
pub fn unit_wage_moments(params: &ModelParams) -> Result<(Moments, Aggregates)> {
    let env = params.firm_env()?;
    let prices = stationary_prices(params, 1.0)?;
    let (_, _, agg) = solve_at_prices(&env, &prices, params.entrant_mass)?;
    Ok((Moments::from_aggregates(&agg), agg))
}

/// Result of [`calibrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub params: ModelParams,
    pub targets: Moments,
    pub achieved: Moments,
    pub iterations: usize,
    /// Largest absolute log deviation of a scale-free moment from its target.
    pub residual: f64,
}

fn with_coords(base: &ModelParams, theta: &[f64; 3]) -> ModelParams {
    let mut p = base.clone();
    p.operating_cost.location = theta[0];
    p.operating_cost.scale = theta[1].exp();
    p.productivity.mean = theta[2];
    p.entrant_mass = 1.0;
    p
}

fn log_gaps(base: &ModelParams, theta: &[f64; 3], targets: &Moments) -> Result<[f64; 3]> {
    let (m, _) = unit_wage_moments(&with_coords(base, theta))?;
    let r = [
        (m.annual_exit_rate / targets.annual_exit_rate).ln(),
        (m.incumbent_size / targets.incumbent_size).ln(),
        (m.exiting_size / targets.exiting_size).ln(),
    ];
    if r.iter().all(|x| x.is_finite()) {
        Ok(r)
    } else {
        Err(Error::DegeneratePrices("non-finite moment".into()))
    }
}

fn sup(r: &[f64; 3]) -> f64 {
    r.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Joint calibration of `(mu_c, sigma_c, a_z)` to the annual exit rate and the
/// two size moments at `w = 1`, followed by `M` from the employment target
/// (measure homogeneity) and `kappa0` from labour supply.
///
/// The operating-cost location and scale and the productivity mean in
/// `start` are the initial guess; all other parameters are held fixed.
pub fn calibrate(targets: &Moments, start: &ModelParams) -> Result<Calibration> {
    targets.validate()?;
    start.validate()?;
    let mut theta = [
        start.operating_cost.location,
        start.operating_cost.scale.ln(),
        start.productivity.mean,
    ];
    let mut r = log_gaps(start, &theta, targets)?;
    let tol = 1e-11;
    let max_iter = 100;
    let mut iterations = 0;
    while sup(&r) > tol {
        if iterations == max_iter {
            return Err(Error::NonConvergence {
                what: "calibration",
                iterations,
                residual: sup(&r),
            });
        }
        iterations += 1;
        let h = 1e-5;
        let mut jac = DMatrix::zeros(3, 3);
        for j in 0..3 {
            let mut up = theta;
            let mut dn = theta;
            up[j] += h;
            dn[j] -= h;
            let (ru, rd) = (log_gaps(start, &up, targets)?, log_gaps(start, &dn, targets)?);
            for i in 0..3 {
                jac[(i, j)] = (ru[i] - rd[i]) / (2.0 * h);
            }
        }
        let step = jac
            .lu()
            .solve(&DVector::from_row_slice(&r))
            .ok_or_else(|| Error::Infeasible("moment Jacobian is singular".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let trial = [
                theta[0] - lambda * step[0],
                theta[1] - lambda * step[1],
                theta[2] - lambda * step[2],
            ];
            if let Ok(rt) = log_gaps(start, &trial, targets) {
                if sup(&rt) < sup(&r) {
                    theta = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if sup(&r) < 1e-8 {
                break;
            }
            return Err(Error::Infeasible(format!(
                "no improving step; residual stuck at {:.3e}",
                sup(&r)
            )));
        }
    }

    let unit = with_coords(start, &theta);
    let (_, agg) = unit_wage_moments(&unit)?;
    let mut params = unit;
    params.entrant_mass = targets.employment / agg.employment;
    let consumption = agg.output * params.entrant_mass;
    params.kappa0 = 1.0 / (consumption.powf(params.sigma) * targets.employment.powf(params.kappa1));
    let (achieved, _) = unit_wage_moments(&params)?;
    Ok(Calibration {
        params,
        targets: *targets,
        achieved,
        iterations,
        residual: sup(&r),
    })
}
