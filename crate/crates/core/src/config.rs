//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored; every other line must be a
//! known key. Parameters not mentioned keep their baseline values. Setting
//! `nu` re-derives the productivity process from the annual employment
//! process unless `rho_z` and `sigma_z` are also given.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dynamics::{DynamicsOptions, Normalization};
use crate::equilibrium::Moments;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::stochproc::LognormalSpec;
use crate::variants::{CostDenomination, EntryRegime, FreeEntry, VariantConfig};

/// Every accepted key, in the order [`RunConfig::render`] writes them.
pub const KEYS: &[&str] = &[
    "beta",
    "sigma",
    "kappa0",
    "kappa1",
    "nu",
    "gamma",
    "xi",
    "phi",
    "rho_m",
    "entrant_mass",
    "rho_z",
    "sigma_z",
    "a_z",
    "grid_size",
    "mu_c",
    "sigma_c",
    "mu_e",
    "sigma_e",
    "variant",
    "cost_denomination",
    "delayed_entry",
    "risk_neutral",
    "alpha_c",
    "alpha_e",
    "free_entry",
    "free_entry_cost",
    "free_entry_alpha",
    "target_exit_rate",
    "target_incumbent_size",
    "target_exiting_size",
    "target_employment",
    "vfi_tol",
    "vfi_max_iter",
    "re_tol",
    "re_max_iter",
    "fd_step",
    "irf_horizon",
    "normalization",
    "shock_size",
    "output_dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub targets: Moments,
    pub dynamics: DynamicsOptions,
    pub irf_horizon: usize,
    pub normalization: Normalization,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::baseline(),
            targets: Moments::baseline_targets(),
            dynamics: DynamicsOptions::default(),
            irf_horizon: 40,
            normalization: Normalization::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("`{key}`: must be finite")));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}`: expected a non-negative integer, got `{v}`")))
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("`{key}`: expected true or false, got `{v}`"))),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", n + 1)));
            }
            if entries.iter().any(|(_, key, _)| key == k) {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", n + 1)));
            }
            entries.push((n + 1, k.to_string(), v.to_string()));
        }
        let get = |k: &str| entries.iter().find(|(_, key, _)| key == k).map(|(_, _, v)| v.as_str());

        let mut cfg = RunConfig::default();
        // the variant preset and nu go first; explicit keys below refine them
        if let Some(v) = get("variant") {
            cfg.params.variant = VariantConfig::named(v)?;
        }
        if let Some(v) = get("nu") {
            cfg.params = cfg.params.clone().with_nu(num("nu", v)?)?;
        }
        let p = &mut cfg.params;
        let mut entry_cost: Option<LognormalSpec> = None;
        let mut free = p.variant.free_entry();
        for (line, k, v) in &entries {
            let v = v.as_str();
            let k = k.as_str();
            match k {
                "variant" | "nu" => {}
                "beta" => p.beta = num(k, v)?,
                "sigma" => p.sigma = num(k, v)?,
                "kappa0" => p.kappa0 = num(k, v)?,
                "kappa1" => p.kappa1 = num(k, v)?,
                "gamma" => p.gamma = num(k, v)?,
                "xi" => p.xi = num(k, v)?,
                "phi" => p.phi = num(k, v)?,
                "rho_m" => p.rho_m = num(k, v)?,
                "entrant_mass" => p.entrant_mass = num(k, v)?,
                "rho_z" => p.productivity.persistence = num(k, v)?,
                "sigma_z" => p.productivity.innovation_sd = num(k, v)?,
                "a_z" => p.productivity.mean = num(k, v)?,
                "grid_size" => p.grid_size = count(k, v)?,
                "mu_c" => p.operating_cost.location = num(k, v)?,
                "sigma_c" => p.operating_cost.scale = num(k, v)?,
                "mu_e" => entry_cost.get_or_insert(p.operating_cost).location = num(k, v)?,
                "sigma_e" => entry_cost.get_or_insert(p.operating_cost).scale = num(k, v)?,
                "cost_denomination" => p.variant.cost_denomination = CostDenomination::parse(v)?,
                "delayed_entry" => p.variant.delayed_entry = flag(k, v)?,
                "risk_neutral" => p.variant.risk_neutral = flag(k, v)?,
                "alpha_c" => p.variant.alpha_c = num(k, v)?,
                "alpha_e" => p.variant.alpha_e = num(k, v)?,
                "free_entry" => {
                    free = if flag(k, v)? {
                        Some(free.unwrap_or(FreeEntry {
                            entry_cost: 0.0,
                            congestion: 15.0,
                        }))
                    } else {
                        None
                    }
                }
                "free_entry_cost" | "free_entry_alpha" => {}
                "target_exit_rate" => cfg.targets.annual_exit_rate = num(k, v)?,
                "target_incumbent_size" => cfg.targets.incumbent_size = num(k, v)?,
                "target_exiting_size" => cfg.targets.exiting_size = num(k, v)?,
                "target_employment" => cfg.targets.employment = num(k, v)?,
                "vfi_tol" => p.vfi.tolerance = num(k, v)?,
                "vfi_max_iter" => p.vfi.max_iterations = count(k, v)?,
                "re_tol" => cfg.dynamics.solver.tolerance = num(k, v)?,
                "re_max_iter" => cfg.dynamics.solver.max_iterations = count(k, v)?,
                "fd_step" => cfg.dynamics.fd_step = num(k, v)?,
                "irf_horizon" => cfg.irf_horizon = count(k, v)?,
                "normalization" | "shock_size" => {}
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                _ => unreachable!("line {line}: key list and match arms disagree"),
            }
        }
        if let Some(fe) = free.as_mut() {
            if let Some(v) = get("free_entry_cost") {
                fe.entry_cost = num("free_entry_cost", v)?;
            }
            if let Some(v) = get("free_entry_alpha") {
                fe.congestion = num("free_entry_alpha", v)?;
            }
        } else if get("free_entry_cost").is_some() || get("free_entry_alpha").is_some() {
            return Err(Error::Config("free_entry_cost/free_entry_alpha require free_entry = true".into()));
        }
        p.variant.entry = free.map_or(EntryRegime::PotentialEntrants, EntryRegime::Free);
        if entry_cost.is_some() {
            p.entry_cost = entry_cost;
        }
        let size = match get("shock_size") {
            Some(v) => num("shock_size", v)?,
            None => 0.01,
        };
        cfg.normalization = match get("normalization").unwrap_or("real_rate") {
            "real_rate" => Normalization::RealRate(size),
            "innovation" => Normalization::Innovation(size),
            other => {
                return Err(Error::Config(format!(
                    "`normalization`: expected real_rate or innovation, got `{other}`"
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every module precondition that can be checked before compute.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.targets.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.dynamics.fd_step > 0.0 && self.dynamics.fd_step < 1e-2) {
            return Err(Error::invalid("fd_step", "must lie in (0, 0.01)"));
        }
        if !(self.dynamics.solver.tolerance > 0.0) {
            return Err(Error::invalid("re_tol", "must be positive"));
        }
        if !(self.params.vfi.tolerance > 0.0) {
            return Err(Error::invalid("vfi_tol", "must be positive"));
        }
        if self.irf_horizon == 0 {
            return Err(Error::invalid("irf_horizon", "must be at least 1"));
        }
        Ok(())
    }

    /// Output directory, overridden by `FIRMDYN_OUT_DIR` when set.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os("FIRMDYN_OUT_DIR") {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone(),
        }
    }

    /// Writes the configuration back out; `parse(render())` reproduces it.
    pub fn render(&self) -> String {
        let p = &self.params;
        let v = &p.variant;
        let mut s = String::new();
        let mut put = |k: &str, val: String| {
            let _ = writeln!(s, "{k} = {val}");
        };
        let f = |x: f64| format!("{x:e}");
        put("beta", f(p.beta));
        put("sigma", f(p.sigma));
        put("kappa0", f(p.kappa0));
        put("kappa1", f(p.kappa1));
        put("nu", f(p.nu));
        put("gamma", f(p.gamma));
        put("xi", f(p.xi));
        put("phi", f(p.phi));
        put("rho_m", f(p.rho_m));
        put("entrant_mass", f(p.entrant_mass));
        put("rho_z", f(p.productivity.persistence));
        put("sigma_z", f(p.productivity.innovation_sd));
        put("a_z", f(p.productivity.mean));
        put("grid_size", p.grid_size.to_string());
        put("mu_c", f(p.operating_cost.location));
        put("sigma_c", f(p.operating_cost.scale));
        if let Some(e) = p.entry_cost {
            put("mu_e", f(e.location));
            put("sigma_e", f(e.scale));
        }
        put("cost_denomination", v.cost_denomination.name().into());
        put("delayed_entry", v.delayed_entry.to_string());
        put("risk_neutral", v.risk_neutral.to_string());
        put("alpha_c", f(v.alpha_c));
        put("alpha_e", f(v.alpha_e));
        match v.entry {
            EntryRegime::PotentialEntrants => put("free_entry", "false".into()),
            EntryRegime::Free(fe) => {
                put("free_entry", "true".into());
                put("free_entry_cost", f(fe.entry_cost));
                put("free_entry_alpha", f(fe.congestion));
            }
        }
        put("target_exit_rate", f(self.targets.annual_exit_rate));
        put("target_incumbent_size", f(self.targets.incumbent_size));
        put("target_exiting_size", f(self.targets.exiting_size));
        put("target_employment", f(self.targets.employment));
        put("vfi_tol", f(p.vfi.tolerance));
        put("vfi_max_iter", p.vfi.max_iterations.to_string());
        put("re_tol", f(self.dynamics.solver.tolerance));
        put("re_max_iter", self.dynamics.solver.max_iterations.to_string());
        put("fd_step", f(self.dynamics.fd_step));
        put("irf_horizon", self.irf_horizon.to_string());
        let (kind, size) = match self.normalization {
            Normalization::RealRate(x) => ("real_rate", x),
            Normalization::Innovation(x) => ("innovation", x),
        };
        put("normalization", kind.into());
        put("shock_size", f(size));
        put("output_dir", self.output_dir.display().to_string());
        s
    }
}
