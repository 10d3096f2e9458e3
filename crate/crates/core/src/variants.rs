//! Model variants: the unit in which fixed costs are paid, delayed entry,
//! risk-neutral firms, interest-sensitive costs and free entry, plus the
//! recalibration helpers that go with them.

use nalgebra::{Matrix2, Vector2};

use crate::dynamics::{DynamicsOptions, HfModel, Normalization, Series};
use crate::equilibrium::{
    calibrate, solve_at_prices, solve_stationary_equilibrium, Calibration, Moments, SteadyState,
};
use crate::error::{Error, Result};
use crate::firm::Prices;
use crate::params::ModelParams;

/// Unit in which fixed operating and entry costs are paid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostDenomination {
    #[default]
    FinalGood,
    /// Costs scale with the real wage.
    Labor,
    /// Costs scale with the relative price of the undifferentiated good.
    ProductionGood,
}

impl CostDenomination {
    pub fn name(&self) -> &'static str {
        match self {
            CostDenomination::FinalGood => "final_good",
            CostDenomination::Labor => "labor",
            CostDenomination::ProductionGood => "production_good",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "final_good" => Ok(Self::FinalGood),
            "labor" | "labour" => Ok(Self::Labor),
            "production_good" => Ok(Self::ProductionGood),
            other => Err(Error::Config(format!("unknown cost denomination `{other}`"))),
        }
    }
}

/// Free-entry block: the mass of actual entrants adjusts so that the
/// expected value of entry equals `entry_cost * exp(congestion * (M_t / M - 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEntry {
    /// Stationary entry cost; zero until solved by
    /// [`solve_free_entry_stationary`].
    pub entry_cost: f64,
    /// Elasticity of the entry cost to the relative deviation of the entrant
    /// mass from its stationary value.
    pub congestion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EntryRegime {
    /// A fixed mass of potential entrants, each drawing an entry cost.
    #[default]
    PotentialEntrants,
    Free(FreeEntry),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariantConfig {
    pub cost_denomination: CostDenomination,
    /// Entrants decide one period ahead and start producing next period.
    pub delayed_entry: bool,
    /// Firms discount with `beta` instead of the household SDF.
    pub risk_neutral: bool,
    /// Shift of the log operating-cost location per unit of real-rate deviation.
    pub alpha_c: f64,
    /// Shift of the log entry-cost location per unit of real-rate deviation.
    pub alpha_e: f64,
    pub entry: EntryRegime,
}

/// Names accepted by [`VariantConfig::named`].
pub const VARIANT_NAMES: [&str; 8] = [
    "baseline",
    "labor_cost",
    "production_good_cost",
    "delayed_entry",
    "risk_neutral",
    "interest_sensitive",
    "free_entry",
    "free_entry_alpha15",
];

impl VariantConfig {
    pub fn baseline() -> Self {
        Self::default()
    }

    /// Preset by name. `interest_sensitive` starts from zero sensitivities
    /// (see [`calibrate_interest_sensitivity`]); both free-entry presets use a
    /// congestion elasticity of 15.
    pub fn named(name: &str) -> Result<Self> {
        let mut v = Self::default();
        match name {
            "baseline" => {}
            "labor_cost" => v.cost_denomination = CostDenomination::Labor,
            "production_good_cost" => v.cost_denomination = CostDenomination::ProductionGood,
            "delayed_entry" => v.delayed_entry = true,
            "risk_neutral" => v.risk_neutral = true,
            "interest_sensitive" => {}
            "free_entry" | "free_entry_alpha15" => {
                v.entry = EntryRegime::Free(FreeEntry {
                    entry_cost: 0.0,
                    congestion: 15.0,
                })
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown variant `{other}` (expected one of {})",
                    VARIANT_NAMES.join(", ")
                )))
            }
        }
        Ok(v)
    }

    pub fn is_baseline(&self) -> bool {
        *self == Self::default()
    }

    pub fn interest_sensitive(&self) -> bool {
        self.alpha_c != 0.0 || self.alpha_e != 0.0
    }

    pub fn free_entry(&self) -> Option<FreeEntry> {
        match self.entry {
            EntryRegime::Free(fe) => Some(fe),
            EntryRegime::PotentialEntrants => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha_c.is_finite() || !self.alpha_e.is_finite() {
            return Err(Error::invalid("alpha", "interest sensitivities must be finite"));
        }
        if let EntryRegime::Free(fe) = self.entry {
            if !(fe.congestion > 0.0) || !fe.congestion.is_finite() {
                return Err(Error::invalid("free_entry_alpha", "must be positive"));
            }
            if !(fe.entry_cost >= 0.0) || !fe.entry_cost.is_finite() {
                return Err(Error::invalid("free_entry_cost", "must be non-negative"));
            }
            if self.delayed_entry {
                return Err(Error::ConflictingVariant(
                    "free entry already fixes entry timing; drop delayed_entry".into(),
                ));
            }
            if self.alpha_e != 0.0 {
                return Err(Error::ConflictingVariant(
                    "free entry has no entry-cost distribution for alpha_e to shift".into(),
                ));
            }
        }
        Ok(())
    }

    /// Short tag written next to outputs, e.g. `labor+risk_neutral`.
    pub fn label(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.cost_denomination != CostDenomination::FinalGood {
            parts.push(format!("{}_cost", self.cost_denomination.name()));
        }
        if self.delayed_entry {
            parts.push("delayed_entry".into());
        }
        if self.risk_neutral {
            parts.push("risk_neutral".into());
        }
        if self.interest_sensitive() {
            parts.push("interest_sensitive".into());
        }
        if let EntryRegime::Free(_) = self.entry {
            parts.push("free_entry".into());
        }
        if parts.is_empty() {
            "baseline".into()
        } else {
            parts.join("+")
        }
    }
}

/// Recalibrates `base` with `variant` switched on so that the stationary
/// equilibrium hits `targets` again. Costs paid in the production good start
/// from a location shifted by `-ln p`, which leaves final-good costs unchanged.
pub fn recalibrate(base: &ModelParams, variant: &VariantConfig, targets: &Moments) -> Result<Calibration> {
    variant.validate()?;
    let mut start = base.clone();
    start.variant = variant.clone();
    if variant.cost_denomination == CostDenomination::ProductionGood
        && base.variant.cost_denomination != CostDenomination::ProductionGood
    {
        start.operating_cost.location -= start.stationary_relative_price().ln();
        if let Some(e) = start.entry_cost.as_mut() {
            e.location -= base.stationary_relative_price().ln();
        }
    }
    calibrate(targets, &start)
}

/// Impact responses of the exit and entry rates (basis points) under the
/// unit real-rate normalization.
pub fn rate_impacts(model: &HfModel) -> Result<(f64, f64)> {
    let irf = model.irf(0, Normalization::default())?;
    Ok((irf.impact(Series::ExitRateBp), irf.impact(Series::EntryRateBp)))
}

/// Result of [`calibrate_interest_sensitivity`].
#[derive(Debug, Clone)]
pub struct InterestSensitivity {
    pub alpha_c: f64,
    pub alpha_e: f64,
    /// Achieved exit and entry impact responses in basis points.
    pub exit_bp: f64,
    pub entry_bp: f64,
    pub iterations: usize,
    pub model: HfModel,
}

/// Chooses `(alpha_c, alpha_e)` so that the exit and entry rates respond by
/// `exit_bp` and `entry_bp` on impact. The stationary equilibrium does not
/// depend on the sensitivities, so only the dynamic system is rebuilt.
pub fn calibrate_interest_sensitivity(
    ss: &SteadyState,
    exit_bp: f64,
    entry_bp: f64,
    tol_bp: f64,
    opts: &DynamicsOptions,
) -> Result<InterestSensitivity> {
    if ss.env.variant.free_entry().is_some() {
        return Err(Error::ConflictingVariant(
            "interest-sensitive entry costs need a potential-entrant pool".into(),
        ));
    }
    let build = |a: Vector2<f64>| -> Result<(HfModel, Vector2<f64>)> {
        let mut s = ss.clone();
        s.params.variant.alpha_c = a[0];
        s.params.variant.alpha_e = a[1];
        s.env.variant = s.params.variant.clone();
        let model = HfModel::build(&s, opts)?;
        let (x, e) = rate_impacts(&model)?;
        Ok((model, Vector2::new(x - exit_bp, e - entry_bp)))
    };
    let mut alpha = Vector2::new(ss.env.variant.alpha_c, ss.env.variant.alpha_e);
    let (mut model, mut gap) = build(alpha)?;
    let max_iter = 30;
    let mut iterations = 0;
    let h = 0.5;
    while gap.amax() > tol_bp {
        if iterations == max_iter {
            return Err(Error::NonConvergence {
                what: "interest-sensitivity calibration",
                iterations,
                residual: gap.amax(),
            });
        }
        iterations += 1;
        let mut jac = Matrix2::zeros();
        for j in 0..2 {
            let mut a = alpha;
            a[j] += h;
            let (_, g) = build(a)?;
            jac.set_column(j, &((g - gap) / h));
        }
        let step = jac
            .lu()
            .solve(&gap)
            .ok_or_else(|| Error::Infeasible("rate responses do not depend on the sensitivities".into()))?;
        alpha -= step;
        (model, gap) = build(alpha)?;
    }
    Ok(InterestSensitivity {
        alpha_c: alpha[0],
        alpha_e: alpha[1],
        exit_bp: gap[0] + exit_bp,
        entry_bp: gap[1] + entry_bp,
        iterations,
        model,
    })
}

/// Free-entry stationary equilibrium built on the firm-side primitives of
/// `base`: at `w = 1` the entry cost is set to the expected value of a new
/// firm, the entrant mass scales employment to `employment`, and `kappa0`
/// makes the household supply that much labour.
pub fn solve_free_entry_stationary(base: &ModelParams, employment: f64, congestion: f64) -> Result<SteadyState> {
    if !(employment > 0.0) {
        return Err(Error::invalid("employment", "target must be positive"));
    }
    let mut params = base.clone();
    params.variant.delayed_entry = false;
    params.variant.alpha_e = 0.0;
    params.variant.entry = EntryRegime::Free(FreeEntry {
        entry_cost: 1.0,
        congestion,
    });
    let env = params.firm_env()?;
    let prices = Prices::new(params.stationary_relative_price(), 1.0, params.beta)?;
    let (firm, _, unit) = solve_at_prices(&env, &prices, 1.0)?;
    let entry_cost: f64 = firm.value.iter().zip(env.chain.entrant()).map(|(v, q)| v * q).sum();
    if !(entry_cost > 0.0) {
        return Err(Error::Infeasible("expected entrant value is not positive".into()));
    }
    let m = employment / unit.employment;
    let consumption = unit.output * m;
    params.entrant_mass = m;
    params.kappa0 = 1.0 / (consumption.powf(params.sigma) * employment.powf(params.kappa1));
    params.variant.entry = EntryRegime::Free(FreeEntry { entry_cost, congestion });
    solve_stationary_equilibrium(&params)
}

/// Stationary equilibrium and solved dynamics of a named variant, starting
/// from the calibrated `base`. Cost-denomination and delayed-entry variants
/// are recalibrated to `targets`; the interest-sensitive variant is fitted to
/// impact responses of +10bp (exit) and -4.5bp (entry).
pub fn build_named(name: &str, base: &ModelParams, targets: &Moments, opts: &DynamicsOptions) -> Result<HfModel> {
    let variant = VariantConfig::named(name)?;
    match name {
        "baseline" | "risk_neutral" => {
            let mut p = base.clone();
            p.variant = variant;
            HfModel::build(&solve_stationary_equilibrium(&p)?, opts)
        }
        "labor_cost" | "production_good_cost" | "delayed_entry" => {
            let cal = recalibrate(base, &variant, targets)?;
            HfModel::build(&solve_stationary_equilibrium(&cal.params)?, opts)
        }
        "interest_sensitive" => {
            let ss = solve_stationary_equilibrium(base)?;
            Ok(calibrate_interest_sensitivity(&ss, 10.0, -4.5, 0.01, opts)?.model)
        }
        "free_entry" | "free_entry_alpha15" => {
            let fe = variant.free_entry().expect("free-entry preset");
            let cal = recalibrate(base, &variant, targets)?;
            let ss = solve_free_entry_stationary(&cal.params, targets.employment, fe.congestion)?;
            HfModel::build(&ss, opts)
        }
        _ => unreachable!("named() accepted an unknown variant"),
    }
}

/// Recalibrates the baseline at a different returns-to-scale parameter,
/// moving `nu` in steps of at most `max_step` and warm-starting each
/// calibration from the previous one.
pub fn recalibrate_nu(base: &ModelParams, nu: f64, targets: &Moments, max_step: f64) -> Result<Calibration> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::invalid("nu", "must lie in (0,1)"));
    }
    let steps = ((nu - base.nu).abs() / max_step).ceil().max(1.0) as usize;
    let mut current = base.clone();
    let mut last = None;
    for i in 1..=steps {
        let target_nu = base.nu + (nu - base.nu) * i as f64 / steps as f64;
        let start = current.clone().with_nu(target_nu)?;
        let cal = calibrate(targets, &start)?;
        current = cal.params.clone();
        last = Some(cal);
    }
    Ok(last.expect("at least one step"))
}
