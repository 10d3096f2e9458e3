//! Production-firm problem: static labour choice, the Bellman equation with
//! stochastic fixed operating costs, entry/exit thresholds, and backward
//! induction along a perfect-foresight price path.
//!
//! With a lognormal cost `c ~ G_c`, the continuation term
//! `E[max(c* - c, 0)] = (c* - E[c | c <= c*]) G_c(c*)` is evaluated in closed
//! form, so the Bellman operator on the grid is
//! `V(z_i) = pi(z_i) + H(disc * sum_j P_ij V(z_j))`.

use crate::error::{Error, Result};
use crate::stochproc::{LognormalSpec, MarkovChain};
use crate::variants::{CostDenomination, EntryRegime, VariantConfig};

/// Prices faced by production firms in one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prices {
    /// Relative price of the undifferentiated good.
    pub p: f64,
    /// Real wage.
    pub w: f64,
    /// One-period stochastic discount factor between this period and the next.
    pub sdf: f64,
    /// Gross ex ante real interest rate; only the interest-sensitive cost
    /// variant reads it.
    pub real_rate: f64,
}

impl Prices {
    pub fn new(p: f64, w: f64, sdf: f64) -> Result<Self> {
        let prices = Self {
            p,
            w,
            sdf,
            real_rate: 1.0 / sdf,
        };
        prices.validate()?;
        Ok(prices)
    }

    pub fn with_real_rate(mut self, real_rate: f64) -> Self {
        self.real_rate = real_rate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(Error::DegeneratePrices(format!("p = {}", self.p)));
        }
        if !(self.w > 0.0) || !self.w.is_finite() {
            return Err(Error::DegeneratePrices(format!("w = {}", self.w)));
        }
        if !(self.sdf >= 0.0 && self.sdf < 1.5) {
            return Err(Error::DegeneratePrices(format!("sdf = {}", self.sdf)));
        }
        Ok(())
    }
}

/// Convergence controls for value function iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VfiOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for VfiOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100_000,
        }
    }
}

/// Optimal labour input `n = (w / (nu p z))^(1 / (nu - 1))`.
pub fn labor_policy(z: f64, p: f64, w: f64, nu: f64) -> f64 {
    (w / (nu * p * z)).powf(1.0 / (nu - 1.0))
}

/// Period profit `p z n^nu - w n` at the optimal labour input.
pub fn static_profit(z: f64, p: f64, w: f64, nu: f64) -> f64 {
    let n = labor_policy(z, p, w, nu);
    p * z * n.powf(nu) - w * n
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirmEnv {
    pub chain: MarkovChain,
    pub nu: f64,
    /// Household discount factor; the risk-neutral variant discounts with it.
    pub beta: f64,
    pub operating_cost: LognormalSpec,
    pub entry_cost: LognormalSpec,
    pub variant: VariantConfig,
    pub vfi: VfiOptions,
}

impl FirmEnv {
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Labour demand and profit at every grid point.
    pub fn static_choices(&self, prices: &Prices) -> (Vec<f64>, Vec<f64>) {
        let z = self.chain.levels();
        let labor: Vec<f64> = z
            .iter()
            .map(|&z| labor_policy(z, prices.p, prices.w, self.nu))
            .collect();
        let profit = z
            .iter()
            .zip(&labor)
            .map(|(&z, &n)| prices.p * z * n.powf(self.nu) - prices.w * n)
            .collect();
        (labor, profit)
    }

    /// Discount factor used by the firm between this period and the next.
    pub fn discount(&self, prices: &Prices) -> f64 {
        if self.variant.risk_neutral {
            self.beta
        } else {
            prices.sdf
        }
    }

    fn cost_shift(&self, prices: &Prices, sensitivity: f64) -> f64 {
        let unit = match self.variant.cost_denomination {
            CostDenomination::FinalGood => 0.0,
            CostDenomination::Labor => prices.w.ln(),
            CostDenomination::ProductionGood => prices.p.ln(),
        };
        unit + sensitivity * (prices.real_rate - 1.0 / self.beta)
    }

    /// Operating-cost distribution in final-good units at these prices.
    pub fn operating_cost_at(&self, prices: &Prices) -> LognormalSpec {
        self.operating_cost
            .shifted(self.cost_shift(prices, self.variant.alpha_c))
    }

    /// Entry-cost distribution in final-good units at these prices.
    pub fn entry_cost_at(&self, prices: &Prices) -> LognormalSpec {
        self.entry_cost
            .shifted(self.cost_shift(prices, self.variant.alpha_e))
    }

    /// One application of the Bellman operator given next period's values.
    pub fn bellman_step(&self, prices: &Prices, next_value: &[f64]) -> Vec<f64> {
        let (_, profit) = self.static_choices(prices);
        let cost = self.operating_cost_at(prices);
        let disc = self.discount(prices);
        let expected = self.chain.expect(next_value);
        profit
            .iter()
            .zip(expected)
            .map(|(&pi, ev)| pi + cost.expected_gain(disc * ev))
            .collect()
    }

    /// Packs the policy objects implied by this period's value and next
    /// period's value.
    pub fn assemble(&self, prices: &Prices, value: Vec<f64>, next_value: &[f64]) -> FirmSolution {
        let (labor, profit) = self.static_choices(prices);
        let disc = self.discount(prices);
        let delayed = self.variant.delayed_entry;
        let (exit_threshold, entry_threshold) = thresholds_with(&value, next_value, disc, &self.chain, delayed);
        let op = self.operating_cost_at(prices);
        let en = self.entry_cost_at(prices);
        let continuation_prob = exit_threshold.iter().map(|&c| op.cdf(c)).collect();
        let entry_prob = match self.variant.entry {
            EntryRegime::PotentialEntrants => entry_threshold.iter().map(|&e| en.cdf(e)).collect(),
            EntryRegime::Free(_) => vec![1.0; self.len()],
        };
        FirmSolution {
            value,
            labor,
            profit,
            exit_threshold,
            entry_threshold,
            continuation_prob,
            entry_prob,
            iterations: 0,
        }
    }
}

/// Per-grid-point firm policies.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmSolution {
    pub value: Vec<f64>,
    pub labor: Vec<f64>,
    pub profit: Vec<f64>,
    /// Exit threshold `c*`: operating costs below it are paid.
    pub exit_threshold: Vec<f64>,
    /// Entry threshold `e*`.
    pub entry_threshold: Vec<f64>,
    /// `G_c(c*)`.
    pub continuation_prob: Vec<f64>,
    /// `G_e(e*)`; identically one under free entry.
    pub entry_prob: Vec<f64>,
    pub iterations: usize,
}

impl FirmSolution {
    pub fn exit_prob(&self) -> Vec<f64> {
        self.continuation_prob.iter().map(|s| 1.0 - s).collect()
    }
}

/// Exit and entry thresholds for a stationary value function:
/// `c*(z_i) = sdf sum_j P_ij V(z_j)` and `e*(z_i) = V(z_i)`, or
/// `e* = c*` when entrants only start producing next period.
pub fn thresholds(value: &[f64], sdf: f64, chain: &MarkovChain, delayed_entry: bool) -> (Vec<f64>, Vec<f64>) {
    thresholds_with(value, value, sdf, chain, delayed_entry)
}

fn thresholds_with(
    value: &[f64],
    next_value: &[f64],
    disc: f64,
    chain: &MarkovChain,
    delayed_entry: bool,
) -> (Vec<f64>, Vec<f64>) {
    let exit: Vec<f64> = chain.expect(next_value).into_iter().map(|ev| disc * ev).collect();
    let entry = if delayed_entry { exit.clone() } else { value.to_vec() };
    (exit, entry)
}

/// Value function iteration at constant prices.
pub fn solve_firm_stationary(env: &FirmEnv, prices: &Prices) -> Result<FirmSolution> {
    solve_firm_stationary_from(env, prices, None)
}

/// Value function iteration starting from `guess` (falls back to the
/// discounted static profit).
pub fn solve_firm_stationary_from(env: &FirmEnv, prices: &Prices, guess: Option<&[f64]>) -> Result<FirmSolution> {
    prices.validate()?;
    let disc = env.discount(prices);
    let (_, profit) = env.static_choices(prices);
    let mut value: Vec<f64> = match guess {
        Some(g) if g.len() == env.len() => g.to_vec(),
        _ => profit.iter().map(|pi| pi / (1.0 - disc.min(0.999_999))).collect(),
    };
    let opts = env.vfi;
    let mut delta = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let next = env.bellman_step(prices, &value);
        delta = next
            .iter()
            .zip(&value)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        value = next;
        if value.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::DegeneratePrices(
                "negative or non-finite firm value".into(),
            ));
        }
        if delta < opts.tolerance {
            let mut sol = env.assemble(prices, value.clone(), &value);
            sol.iterations = it;
            return Ok(sol);
        }
    }
    Err(Error::NonConvergence {
        what: "value function iteration",
        iterations: opts.max_iterations,
        residual: delta,
    })
}

/// Backward induction along `path[0..=T]`, starting from `V_T = terminal`.
/// Entry `t` of the result holds period-`t` policies; the last entry is the
/// terminal solution.
pub fn solve_perfect_foresight(env: &FirmEnv, path: &[Prices], terminal: &FirmSolution) -> Result<Vec<FirmSolution>> {
    if path.len() < 2 {
        return Err(Error::HorizonTooShort(format!(
            "perfect-foresight path needs T >= 1, got {} periods",
            path.len()
        )));
    }
    if terminal.value.len() != env.len() {
        return Err(Error::DimensionMismatch("terminal solution grid size".into()));
    }
    for prices in path {
        prices.validate()?;
    }
    let horizon = path.len() - 1;
    let mut out = vec![terminal.clone(); path.len()];
    for t in (0..horizon).rev() {
        let next = out[t + 1].value.clone();
        let value = env.bellman_step(&path[t], &next);
        out[t] = env.assemble(&path[t], value, &next);
    }
    Ok(out)
}
