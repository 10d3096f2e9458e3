//! Representative-firm benchmark: the three-equation log-linear model
//!
//! ```text
//! y_t  = E_t y_{t+1} - (1/sigma) (R_t - E_t pi_{t+1})
//! pi_t = beta E_t pi_{t+1} + kappa y_t
//! R_t  = phi pi_t + eps_t,      eps_t = rho eps_{t-1} + eta_t
//! ```
//!
//! with `kappa = ((gamma - 1)/xi) (sigma + (kappa1 + 1)/nu - 1)`, solved by
//! undetermined coefficients.

use crate::dynamics::irf::{IrfSet, Normalization, Series, LONG_HORIZON};
use crate::dynamics::linear::ResidualSystem;
use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RFParams {
    pub beta: f64,
    pub sigma: f64,
    pub kappa1: f64,
    pub nu: f64,
    pub gamma: f64,
    pub xi: f64,
    pub phi: f64,
    pub rho_m: f64,
}

impl RFParams {
    /// The representative-firm economy with the heterogeneous-firm parameter values.
    pub fn from_model(p: &ModelParams) -> Self {
        Self {
            beta: p.beta,
            sigma: p.sigma,
            kappa1: p.kappa1,
            nu: p.nu,
            gamma: p.gamma,
            xi: p.xi,
            phi: p.phi,
            rho_m: p.rho_m,
        }
    }

    /// Phillips-curve slope.
    pub fn kappa(&self) -> f64 {
        (self.gamma - 1.0) / self.xi * (self.sigma + (self.kappa1 + 1.0) / self.nu - 1.0)
    }

    /// Stationary relative price of the undifferentiated good.
    pub fn rel_price(&self) -> f64 {
        (self.gamma - 1.0) / self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beta", self.beta),
            ("sigma", self.sigma),
            ("kappa1", self.kappa1),
            ("gamma", self.gamma),
            ("xi", self.xi),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::invalid("nu", "must lie in (0,1]"));
        }
        if !(self.rho_m >= 0.0 && self.rho_m < 1.0) {
            return Err(Error::invalid("rho_m", "must lie in [0,1)"));
        }
        Ok(())
    }
}

/// Impact coefficients per unit of the policy shock; every path is
/// `coefficient * rho^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RFSolution {
    pub params: RFParams,
    pub kappa: f64,
    pub a_y: f64,
    pub a_pi: f64,
    /// Nominal rate.
    pub a_nominal: f64,
    /// Ex ante real rate `R_t - E_t pi_{t+1}`.
    pub a_real: f64,
}

pub fn solve_rf(params: &RFParams) -> Result<RFSolution> {
    params.validate()?;
    if !(params.phi > 1.0) {
        return Err(Error::Indeterminate(crate::error::RootDiagnostics {
            transition_radius: 0.0,
            forward_radius: f64::NAN,
            unstable_backward: 0,
            unstable_forward: 1,
        }));
    }
    let (b, s, rho, phi) = (params.beta, params.sigma, params.rho_m, params.phi);
    let kappa = params.kappa();
    let a_y = -1.0 / (s * ((1.0 - rho) + (phi - rho) * kappa / (s * (1.0 - b * rho))));
    let a_pi = kappa * a_y / (1.0 - b * rho);
    let a_nominal = phi * a_pi + 1.0;
    let a_real = a_nominal - rho * a_pi;
    Ok(RFSolution {
        params: *params,
        kappa,
        a_y,
        a_pi,
        a_nominal,
        a_real,
    })
}

impl RFSolution {
    /// Impact responses (log deviations) per unit shock, in [`Series::ALL`]
    /// order. Firm-dynamics series are identically zero.
    pub fn impact_coefficients(&self) -> [f64; 14] {
        let p = &self.params;
        let y = self.a_y;
        let n = y / p.nu;
        let w = p.sigma * y + p.kappa1 * n;
        let rel = w + (1.0 - p.nu) * n;
        let vp = p.nu * p.rel_price();
        let d = y - vp * rel / (1.0 - vp);
        [
            y, y, n, w, rel, self.a_pi, self.a_nominal, self.a_real, 0.0, 0.0, 0.0, 0.0, d, 0.0,
        ]
    }

    /// Residuals of the three equations at horizon `t` of the path
    /// `c rho^t` for a unit shock.
    pub fn equation_residuals(&self, t: i32) -> [f64; 3] {
        let p = &self.params;
        let g = p.rho_m.powi(t);
        let (y, pi, r) = (self.a_y * g, self.a_pi * g, self.a_nominal * g);
        let (y1, pi1) = (y * p.rho_m, pi * p.rho_m);
        [
            y - y1 + (r - pi1) / p.sigma,
            pi - p.beta * pi1 - self.kappa * y,
            r - p.phi * pi - g,
        ]
    }
}

/// Geometric impulse responses scaled to `normalization`.
pub fn rf_irf(sol: &RFSolution, horizon: usize, normalization: Normalization) -> Result<IrfSet> {
    let scale = match normalization {
        Normalization::RealRate(target) => target / sol.a_real,
        Normalization::Innovation(e) => e,
    };
    let coeffs = sol.impact_coefficients();
    let len = horizon.max(LONG_HORIZON) + 1;
    let decay: Vec<f64> = (0..len).map(|t| sol.params.rho_m.powi(t as i32)).collect();
    let unit = |s: Series| -> f64 {
        match s {
            Series::EntryRateBp | Series::ExitRateBp => 1e4,
            _ => 100.0,
        }
    };
    let long: Vec<Vec<f64>> = Series::ALL
        .iter()
        .zip(coeffs)
        .map(|(s, c)| decay.iter().map(|g| unit(*s) * scale * c * g).collect())
        .collect();
    let states: Vec<Vec<f64>> = decay
        .iter()
        .take(horizon + 1)
        .map(|g| vec![scale * sol.a_y * g, scale * sol.a_pi * g, scale * sol.a_nominal * g])
        .collect();
    IrfSet::from_long_paths("rf", "baseline", normalization, scale, long, states, horizon)
}

/// The representative-firm model as a generic residual system in `(y, pi, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfSystem {
    pub params: RFParams,
}

impl ResidualSystem for RfSystem {
    fn dim(&self) -> usize {
        3
    }

    fn steady_state(&self) -> Vec<f64> {
        vec![0.0; 3]
    }

    fn variable_names(&self) -> Vec<String> {
        vec!["y".into(), "pi".into(), "R".into()]
    }

    fn residuals(&self, _lag: &[f64], cur: &[f64], lead: &[f64], shock: f64) -> Vec<f64> {
        let p = &self.params;
        vec![
            cur[0] - lead[0] + (cur[2] - lead[1]) / p.sigma,
            cur[1] - p.beta * lead[1] - p.kappa() * cur[0],
            cur[2] - p.phi * cur[1] - shock,
        ]
    }
}
