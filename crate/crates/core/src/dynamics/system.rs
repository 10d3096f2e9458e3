//! The discrete-grid equilibrium system of the heterogeneous-firm economy.
//!
//! Variables, in order: `V(z_1..z_k)`, `mu(z_1..z_k)`, `N, C, w, R, Pi, p, Y`,
//! then the ex ante real rate `r` when costs are interest-sensitive and the
//! entrant mass `M~` under free entry. Values and aggregates enter in logs;
//! masses enter in levels relative to the stationary firm mass.
//!
//! The measure row for period `t` needs last period's survival
//! probabilities `G_c(c*_{t-1})`. Writing the Bellman equation as
//! `V_{t-1} - pi_{t-1} = H_{t-1}(c*_{t-1})` with `H(c) = E[max(c - x, 0)]`,
//! which is strictly increasing wherever `G_c > 0`, gives
//! `c*_{t-1} = H_{t-1}^{-1}(V_{t-1} - pi_{t-1})`, so the row depends on dated
//! variables only and no auxiliary threshold variables are needed.

use crate::equilibrium::SteadyState;
use crate::error::{Error, Result};
use crate::firm::{FirmEnv, Prices};
use crate::params::ModelParams;
use crate::stochproc::LognormalSpec;
use crate::variants::FreeEntry;

use super::linear::ResidualSystem;

/// Positions of the variables in the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub k: usize,
    pub interest_sensitive: bool,
    pub free_entry: bool,
}

impl Layout {
    pub fn value(&self, i: usize) -> usize {
        i
    }
    pub fn mass(&self, i: usize) -> usize {
        self.k + i
    }
    pub fn employment(&self) -> usize {
        2 * self.k
    }
    pub fn consumption(&self) -> usize {
        2 * self.k + 1
    }
    pub fn wage(&self) -> usize {
        2 * self.k + 2
    }
    pub fn nominal_rate(&self) -> usize {
        2 * self.k + 3
    }
    pub fn inflation(&self) -> usize {
        2 * self.k + 4
    }
    pub fn rel_price(&self) -> usize {
        2 * self.k + 5
    }
    pub fn output(&self) -> usize {
        2 * self.k + 6
    }
    pub fn real_rate(&self) -> Option<usize> {
        self.interest_sensitive.then_some(2 * self.k + 7)
    }
    pub fn entrants(&self) -> Option<usize> {
        self.free_entry
            .then_some(2 * self.k + 7 + usize::from(self.interest_sensitive))
    }
    pub fn dim(&self) -> usize {
        2 * self.k + 7 + usize::from(self.interest_sensitive) + usize::from(self.free_entry)
    }

    pub fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = (0..self.k).map(|i| format!("V{i}")).collect();
        out.extend((0..self.k).map(|i| format!("mu{i}")));
        out.extend(["N", "C", "w", "R", "Pi", "p", "Y"].map(String::from));
        if self.interest_sensitive {
            out.push("r".into());
        }
        if self.free_entry {
            out.push("M_tilde".into());
        }
        out
    }
}

/// Number of entries returned by [`HfSystem::derived`].
pub const DERIVED_LEN: usize = 7;

/// Economy-wide quantities computed from `(x_{t-1}, x_t, x_{t+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    /// `ln R_t - ln Pi_{t+1}`.
    pub log_real_rate: f64,
    /// Exiting mass over the average of `Gamma_t` and `Gamma_{t+1}`.
    pub exit_rate: f64,
    /// Entering mass over the average of `Gamma_{t-1}` and `Gamma_t`.
    pub entry_rate: f64,
    pub firm_mass: f64,
    pub tfp: f64,
    pub dividends: f64,
    pub productivity_index: f64,
}

impl Derived {
    pub fn to_array(self) -> [f64; DERIVED_LEN] {
        [
            self.log_real_rate,
            self.exit_rate,
            self.entry_rate,
            self.firm_mass,
            self.tfp,
            self.dividends,
            self.productivity_index,
        ]
    }
}

struct Point {
    v: Vec<f64>,
    mu: Vec<f64>,
    n: f64,
    c: f64,
    w: f64,
    r_nom: f64,
    pi: f64,
    p: f64,
    y: f64,
    real_rate: f64,
    entrants: f64,
}

struct Period {
    labor: Vec<f64>,
    profit: Vec<f64>,
    op: LognormalSpec,
    en: LognormalSpec,
}

/// The equilibrium system around a stationary equilibrium.
#[derive(Debug, Clone)]
pub struct HfSystem {
    pub layout: Layout,
    pub env: FirmEnv,
    pub params: ModelParams,
    ss: Vec<f64>,
    value_ss: Vec<f64>,
    gamma_ss: f64,
    dividends_ss: f64,
    /// `M`, or the stationary entrant mass under free entry.
    entrant_scale: f64,
    free: Option<FreeEntry>,
    levels: Vec<f64>,
}

impl HfSystem {
    pub fn new(ss: &SteadyState) -> Result<Self> {
        let env = ss.env.clone();
        let variant = &env.variant;
        let free = variant.free_entry();
        if let Some(fe) = free {
            if !(fe.entry_cost > 0.0) {
                return Err(Error::invalid(
                    "free_entry_cost",
                    "solve the free-entry stationary equilibrium first",
                ));
            }
        }
        let layout = Layout {
            k: env.len(),
            interest_sensitive: variant.interest_sensitive(),
            free_entry: free.is_some(),
        };
        let gamma_ss = ss.measure.total();
        let a = &ss.aggregates;
        let mut x = vec![0.0; layout.dim()];
        for i in 0..layout.k {
            if !(ss.firm.value[i] > 0.0) {
                return Err(Error::DegeneratePrices(format!(
                    "stationary firm value at grid point {i} is not positive"
                )));
            }
            x[layout.value(i)] = ss.firm.value[i].ln();
            x[layout.mass(i)] = ss.measure.mass[i] / gamma_ss;
        }
        x[layout.employment()] = a.employment.ln();
        x[layout.consumption()] = a.consumption.ln();
        x[layout.wage()] = ss.prices.w.ln();
        x[layout.nominal_rate()] = ss.nominal_rate.ln();
        x[layout.inflation()] = ss.inflation.ln();
        x[layout.rel_price()] = ss.prices.p.ln();
        x[layout.output()] = a.output.ln();
        if let Some(i) = layout.real_rate() {
            x[i] = (ss.nominal_rate / ss.inflation).ln();
        }
        if let Some(i) = layout.entrants() {
            x[i] = ss.measure.entrant_scale.ln();
        }
        let levels = env.chain.levels();
        let mut sys = Self {
            layout,
            env,
            params: ss.params.clone(),
            ss: x,
            value_ss: ss.firm.value.clone(),
            gamma_ss,
            dividends_ss: 1.0,
            entrant_scale: ss.measure.entrant_scale,
            free,
            levels,
        };
        let x = sys.ss.clone();
        sys.dividends_ss = sys.derived_levels(&x, &x, &x).dividends;
        Ok(sys)
    }

    pub fn firm_mass_ss(&self) -> f64 {
        self.gamma_ss
    }

    pub fn dividends_ss(&self) -> f64 {
        self.dividends_ss
    }

    /// Firm masses `mu` from a state vector.
    pub fn masses(&self, x: &[f64]) -> Vec<f64> {
        (0..self.layout.k)
            .map(|i| x[self.layout.mass(i)] * self.gamma_ss)
            .collect()
    }

    /// Firm values `V` from a state vector.
    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.layout.k).map(|i| x[self.layout.value(i)].exp()).collect()
    }

    fn unpack(&self, x: &[f64]) -> Point {
        let l = &self.layout;
        Point {
            v: self.values(x),
            mu: self.masses(x),
            n: x[l.employment()].exp(),
            c: x[l.consumption()].exp(),
            w: x[l.wage()].exp(),
            r_nom: x[l.nominal_rate()].exp(),
            pi: x[l.inflation()].exp(),
            p: x[l.rel_price()].exp(),
            y: x[l.output()].exp(),
            real_rate: l.real_rate().map_or(1.0 / self.params.beta, |i| x[i].exp()),
            entrants: l.entrants().map_or(self.entrant_scale, |i| x[i].exp()),
        }
    }

    fn period(&self, pt: &Point) -> Period {
        let prices = Prices {
            p: pt.p,
            w: pt.w,
            sdf: self.params.beta,
            real_rate: pt.real_rate,
        };
        let (labor, profit) = self.env.static_choices(&prices);
        Period {
            labor,
            profit,
            op: self.env.operating_cost_at(&prices),
            en: self.env.entry_cost_at(&prices),
        }
    }

    /// Exit thresholds recovered from `V - pi = H(c*)`.
    fn thresholds(&self, pt: &Point, per: &Period) -> Vec<f64> {
        pt.v.iter()
            .zip(&per.profit)
            .map(|(v, pi)| per.op.gain_threshold(v - pi))
            .collect()
    }

    /// Masses of firms operating for the first time in the period of `cur`.
    fn entrant_masses(&self, lag: (&Point, &Period), cur: (&Point, &Period)) -> Vec<f64> {
        let q = self.env.chain.entrant();
        if self.free.is_some() {
            return q.iter().map(|qi| cur.0.entrants * qi).collect();
        }
        if self.env.variant.delayed_entry {
            let cstar = self.thresholds(lag.0, lag.1);
            let decided: Vec<f64> = cstar
                .iter()
                .zip(q)
                .map(|(c, qi)| self.entrant_scale * lag.1.en.cdf(*c) * qi)
                .collect();
            self.env.chain.push_forward(&decided)
        } else {
            cur.0
                .v
                .iter()
                .zip(q)
                .map(|(v, qi)| self.entrant_scale * cur.1.en.cdf(*v) * qi)
                .collect()
        }
    }

    fn discount(&self, cur: &Point, lead: &Point) -> f64 {
        let household = self.params.beta * (lead.c / cur.c).powf(-self.params.sigma);
        if self.env.variant.risk_neutral {
            self.params.beta
        } else {
            household
        }
    }

    /// Derived quantities in levels.
    pub fn derived_levels(&self, lag: &[f64], cur: &[f64], lead: &[f64]) -> Derived {
        let (l, c, f) = (self.unpack(lag), self.unpack(cur), self.unpack(lead));
        let (pl, pc) = (self.period(&l), self.period(&c));
        let cstar = self.thresholds(&c, &pc);
        let gamma_l: f64 = l.mu.iter().sum();
        let gamma: f64 = c.mu.iter().sum();
        let gamma_f: f64 = f.mu.iter().sum();
        let exit_mass: f64 = c
            .mu
            .iter()
            .zip(&cstar)
            .map(|(m, cs)| m * (1.0 - pc.op.cdf(*cs)))
            .sum();
        let entrants: f64 = self.entrant_masses((&l, &pl), (&c, &pc)).iter().sum();

        let operating: f64 = c
            .mu
            .iter()
            .zip(&cstar)
            .map(|(m, cs)| m * pc.op.partial_expectation(*cs))
            .sum();
        let q = self.env.chain.entrant();
        let entry_costs = match self.free {
            Some(fe) => {
                c.entrants * fe.entry_cost * (fe.congestion * (c.entrants / self.entrant_scale - 1.0)).exp()
            }
            None => {
                let thresholds = if self.env.variant.delayed_entry { &cstar } else { &c.v };
                self.entrant_scale
                    * q.iter()
                        .zip(thresholds)
                        .map(|(qi, e)| qi * pc.en.partial_expectation(*e))
                        .sum::<f64>()
            }
        };
        let employment: f64 = c.mu.iter().zip(&pc.labor).map(|(m, n)| m * n).sum();
        let output: f64 = c
            .mu
            .iter()
            .zip(&self.levels)
            .zip(&pc.labor)
            .map(|((m, z), n)| m * z * n.powf(self.env.nu))
            .sum();
        let adj = 0.5 * self.params.xi * (c.pi - 1.0).powi(2);
        let dividends = output * (1.0 - adj) - c.w * employment - (operating + entry_costs);
        let (tfp, productivity_index) = crate::equilibrium::tfp(&c.mu, &self.levels, self.env.nu);
        Derived {
            log_real_rate: c.r_nom.ln() - f.pi.ln(),
            exit_rate: exit_mass / (0.5 * (gamma + gamma_f)),
            entry_rate: entrants / (0.5 * (gamma + gamma_l)),
            firm_mass: gamma,
            tfp,
            dividends,
            productivity_index,
        }
    }

    /// Derived quantities in the coordinates whose deviations are reported:
    /// logs of the real rate, firm mass, TFP and productivity index; rates in
    /// levels; dividends relative to their stationary level.
    pub fn derived(&self, lag: &[f64], cur: &[f64], lead: &[f64]) -> [f64; DERIVED_LEN] {
        let d = self.derived_levels(lag, cur, lead);
        [
            d.log_real_rate,
            d.exit_rate,
            d.entry_rate,
            d.firm_mass.ln(),
            d.tfp.ln(),
            d.dividends / self.dividends_ss.abs(),
            d.productivity_index.ln(),
        ]
    }
}

impl ResidualSystem for HfSystem {
    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn steady_state(&self) -> Vec<f64> {
        self.ss.clone()
    }

    fn variable_names(&self) -> Vec<String> {
        self.layout.names()
    }

    fn residuals(&self, lag: &[f64], cur: &[f64], lead: &[f64], shock: f64) -> Vec<f64> {
        let lay = &self.layout;
        let pr = &self.params;
        let (l, c, f) = (self.unpack(lag), self.unpack(cur), self.unpack(lead));
        let (pl, pc) = (self.period(&l), self.period(&c));
        let k = lay.k;
        let mut out = vec![0.0; lay.dim()];

        let disc = self.discount(&c, &f);
        let continuation = self.env.chain.expect(&f.v);
        for i in 0..k {
            let v = pc.profit[i] + pc.op.expected_gain(disc * continuation[i]);
            out[lay.value(i)] = (v - c.v[i]) / self.value_ss[i];
        }

        let cstar_l = self.thresholds(&l, &pl);
        let survivors: Vec<f64> = l
            .mu
            .iter()
            .zip(&cstar_l)
            .map(|(m, cs)| m * pl.op.cdf(*cs))
            .collect();
        let moved = self.env.chain.push_forward(&survivors);
        let entrants = self.entrant_masses((&l, &pl), (&c, &pc));
        for i in 0..k {
            out[lay.mass(i)] = (moved[i] + entrants[i] - c.mu[i]) / self.gamma_ss;
        }

        let employment: f64 = c.mu.iter().zip(&pc.labor).map(|(m, n)| m * n).sum();
        let output: f64 = c
            .mu
            .iter()
            .zip(&self.levels)
            .zip(&pc.labor)
            .map(|((m, z), n)| m * z * n.powf(self.env.nu))
            .sum();
        let sdf = pr.beta * (f.c / c.c).powf(-pr.sigma);
        out[lay.employment()] = (employment - c.n) / c.n;
        out[lay.consumption()] = pr.kappa0 * c.c.powf(pr.sigma) * c.n.powf(pr.kappa1) / c.w - 1.0;
        out[lay.wage()] = sdf * c.r_nom / f.pi - 1.0;
        out[lay.nominal_rate()] = c.pi.powf(pr.phi) * shock.exp() - c.r_nom * pr.beta;
        out[lay.inflation()] = (1.0 - pr.gamma) + pr.gamma * c.p - pr.xi * (c.pi - 1.0) * c.pi
            + pr.xi * sdf * (f.pi - 1.0) * f.pi * f.y / c.y;
        out[lay.rel_price()] = (output - c.y) / c.y;
        out[lay.output()] = (c.c + 0.5 * pr.xi * (c.pi - 1.0).powi(2) * c.y - c.y) / c.y;
        if let Some(i) = lay.real_rate() {
            out[i] = c.real_rate.ln() - c.r_nom.ln() + f.pi.ln();
        }
        if let (Some(i), Some(fe)) = (lay.entrants(), self.free) {
            let ve: f64 = c.v.iter().zip(self.env.chain.entrant()).map(|(v, q)| v * q).sum();
            out[i] = ve.ln() - fe.entry_cost.ln() - fe.congestion * (c.entrants / self.entrant_scale - 1.0);
        }
        out
    }
}
