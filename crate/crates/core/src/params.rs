//! Model parameters and the baseline calibration.

use crate::error::{Error, Result};
use crate::firm::{FirmEnv, VfiOptions};
use crate::stochproc::{quarterly_from_annual, rouwenhorst, AR1Spec, LognormalSpec};
use crate::variants::VariantConfig;

/// Annual persistence of log firm employment used to pin down the quarterly
/// productivity process.
pub const ANNUAL_EMPLOYMENT_PERSISTENCE: f64 = 0.9771;
/// Annual innovation standard deviation of log firm employment.
pub const ANNUAL_EMPLOYMENT_SD: f64 = 0.2676;

/// Full parameter set of the heterogeneous-firm economy.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Household discount factor (quarterly).
    pub beta: f64,
    /// Inverse elasticity of intertemporal substitution.
    pub sigma: f64,
    /// Labour disutility scale.
    pub kappa0: f64,
    /// Inverse Frisch elasticity.
    pub kappa1: f64,
    /// Returns to scale in production.
    pub nu: f64,
    /// Elasticity of substitution between intermediate goods.
    pub gamma: f64,
    /// Rotemberg price adjustment cost.
    pub xi: f64,
    /// Taylor-rule inflation response.
    pub phi: f64,
    /// Persistence of the monetary policy shock.
    pub rho_m: f64,
    /// Mass of potential entrants.
    pub entrant_mass: f64,
    pub productivity: AR1Spec,
    pub grid_size: usize,
    pub operating_cost: LognormalSpec,
    /// `None` ties the entry-cost distribution to the operating-cost one.
    pub entry_cost: Option<LognormalSpec>,
    pub variant: VariantConfig,
    pub vfi: VfiOptions,
}

impl ModelParams {
    /// Baseline quarterly calibration: annual real rate of 4 per cent, log
    /// utility, unit Frisch elasticity, 20 per cent markup, Phillips-curve
    /// slope factor of 0.1 and the jointly calibrated firm-side parameters.
    pub fn baseline() -> Self {
        let (rho_z, sigma_z) =
            quarterly_from_annual(ANNUAL_EMPLOYMENT_PERSISTENCE, ANNUAL_EMPLOYMENT_SD, 0.9)
                .expect("baseline productivity mapping");
        Self {
            beta: 1.04f64.powf(-0.25),
            sigma: 1.0,
            kappa0: 2.083,
            kappa1: 1.0,
            nu: 0.9,
            gamma: 6.0,
            xi: 50.0,
            phi: 1.5,
            rho_m: 0.5,
            entrant_mass: 7.483e-4,
            productivity: AR1Spec {
                persistence: rho_z,
                innovation_sd: sigma_z,
                mean: 0.439,
            },
            grid_size: 50,
            operating_cost: LognormalSpec {
                location: -6.216,
                scale: 4.537,
            },
            entry_cost: None,
            variant: VariantConfig::default(),
            vfi: VfiOptions::default(),
        }
    }

    pub fn entry_cost(&self) -> LognormalSpec {
        self.entry_cost.unwrap_or(self.operating_cost)
    }

    /// Relative price of the undifferentiated good in a zero-inflation
    /// stationary equilibrium, `(gamma - 1) / gamma`.
    pub fn stationary_relative_price(&self) -> f64 {
        (self.gamma - 1.0) / self.gamma
    }

    /// Re-derives the productivity process from the annual employment
    /// process for the current `nu`, keeping the mean.
    pub fn with_nu(mut self, nu: f64) -> Result<Self> {
        let (rho, sd) =
            quarterly_from_annual(ANNUAL_EMPLOYMENT_PERSISTENCE, ANNUAL_EMPLOYMENT_SD, nu)?;
        self.nu = nu;
        self.productivity.persistence = rho;
        self.productivity.innovation_sd = sd;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("beta", self.beta),
            ("sigma", self.sigma),
            ("kappa0", self.kappa0),
            ("kappa1", self.kappa1),
            ("xi", self.xi),
            ("phi", self.phi),
            ("entrant_mass", self.entrant_mass),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.beta < 1.0) {
            return Err(Error::invalid("beta", "must be below one"));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::invalid("nu", format!("must lie in (0,1), got {}", self.nu)));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::invalid("gamma", "must exceed one"));
        }
        if !(self.rho_m >= 0.0 && self.rho_m < 1.0) {
            return Err(Error::invalid("rho_m", "must lie in [0,1)"));
        }
        if self.grid_size < 2 {
            return Err(Error::invalid("grid_size", "need at least 2 points"));
        }
        self.productivity.validate()?;
        self.operating_cost.validate()?;
        self.entry_cost().validate()?;
        self.variant.validate()?;
        Ok(())
    }

    /// Firm-side environment (discretized productivity, cost distributions).
    pub fn firm_env(&self) -> Result<FirmEnv> {
        self.validate()?;
        let chain = rouwenhorst(&self.productivity, self.grid_size)?;
        Ok(FirmEnv {
            chain,
            nu: self.nu,
            beta: self.beta,
            operating_cost: self.operating_cost,
            entry_cost: self.entry_cost(),
            variant: self.variant.clone(),
            vfi: self.vfi,
        })
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::baseline()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_is_valid() {
        let p = ModelParams::baseline();
        p.validate().unwrap();
        assert!((p.stationary_relative_price() - 5.0 / 6.0).abs() < 1e-15);
        assert!((p.beta.powi(-4) - 1.04).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut p = ModelParams::baseline();
        p.nu = 1.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::baseline();
        p.beta = 1.01;
        assert!(p.validate().is_err());
    }
}
