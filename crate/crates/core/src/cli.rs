//! Batch command-line interface. Every subcommand reads an optional config
//! file (see [`crate::config`]), computes everything in memory and only then
//! writes its artifacts.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{
    distribution_shift, employment_gap_rf_prices, price_contributions, probability_profiles, size_profile,
    PriceKind, PF_HORIZON, SIZE_CLASS_BOUNDS,
};
use crate::config::RunConfig;
use crate::dynamics::{HfModel, IrfSet, Series};
use crate::equilibrium::{calibrate, solve_stationary_equilibrium, SteadyState};
use crate::error::{Error, Result};
use crate::output::{fmt12, Artifacts, Table};
use crate::rfmodel::{rf_irf, solve_rf, RFParams};
use crate::variants::{build_named, recalibrate_nu, solve_free_entry_stationary, VARIANT_NAMES};

#[derive(Debug, Parser)]
#[command(name = "firmdyn", version, about = "Firm dynamics in a New Keynesian economy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct ConfigArg {
    /// Run configuration (`key = value` lines); baseline values when omitted.
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Hf,
    Rf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate the firm-side parameters, M and kappa0 to the moment targets.
    Calibrate {
        #[command(flatten)]
        config: ConfigArg,
        /// Only report moment residuals at the configured parameters.
        #[arg(long)]
        check: bool,
    },
    /// Solve the stationary equilibrium.
    Steady {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Impulse responses to the monetary policy shock.
    Irf {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum, default_value = "hf")]
        model: ModelKind,
        /// Named variant preset, built from the configured parameters.
        #[arg(long)]
        variant: Option<String>,
    },
    /// Price decomposition, employment gaps and distribution shifts.
    Decompose {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Impact responses across variant presets.
    Variant {
        #[command(flatten)]
        config: ConfigArg,
        /// Presets to run; all when omitted.
        names: Vec<String>,
    },
    /// Recalibrate over returns-to-scale values and compare with the benchmark.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.9, 0.5, 0.1])]
        nu: Vec<f64>,
    },
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            e.exit_code()
        }
    }
}

fn load(arg: &ConfigArg) -> Result<RunConfig> {
    match &arg.config {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

/// Runs one subcommand and returns the paths it wrote.
pub fn run(cmd: &Command) -> Result<Vec<PathBuf>> {
    match cmd {
        Command::Calibrate { config, check } => {
            let cfg = load(config)?;
            cmd_calibrate(&cfg, *check)
        }
        Command::Steady { config } => {
            let cfg = load(config)?;
            let ss = steady_for(&cfg)?;
            let mut out = Artifacts::new(cfg.resolved_output_dir());
            steady_artifacts(&ss, &mut out);
            out.commit()
        }
        Command::Irf { config, model, variant } => {
            let cfg = load(config)?;
            if let Some(v) = variant {
                crate::variants::VariantConfig::named(v)?;
            }
            let irf = match model {
                ModelKind::Hf => hf_model(&cfg, variant.as_deref())?.irf(cfg.irf_horizon, cfg.normalization)?,
                ModelKind::Rf => rf_for(&cfg, cfg.irf_horizon)?,
            };
            let mut out = Artifacts::new(cfg.resolved_output_dir());
            irf_artifacts(&irf, &mut out);
            out.commit()
        }
        Command::Decompose { config } => {
            let cfg = load(config)?;
            let mut out = Artifacts::new(cfg.resolved_output_dir());
            decompose_artifacts(&cfg, &mut out)?;
            out.commit()
        }
        Command::Variant { config, names } => {
            let cfg = load(config)?;
            let names: Vec<String> = if names.is_empty() {
                VARIANT_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                names.clone()
            };
            for n in &names {
                crate::variants::VariantConfig::named(n)?;
            }
            let mut out = Artifacts::new(cfg.resolved_output_dir());
            variant_artifacts(&cfg, &names, &mut out)?;
            out.commit()
        }
        Command::Sweep { config, nu } => {
            let cfg = load(config)?;
            if let Some(bad) = nu.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                return Err(Error::Config(format!("--nu values must lie in (0,1), got {bad}")));
            }
            let mut out = Artifacts::new(cfg.resolved_output_dir());
            sweep_artifacts(&cfg, nu, &mut out)?;
            out.commit()
        }
    }
}

/// Stationary equilibrium of the configured economy; a free-entry economy
/// without an entry cost is normalized to `w = 1` first.
pub fn steady_for(cfg: &RunConfig) -> Result<SteadyState> {
    match cfg.params.variant.free_entry() {
        Some(fe) if fe.entry_cost == 0.0 => {
            solve_free_entry_stationary(&cfg.params, cfg.targets.employment, fe.congestion)
        }
        _ => solve_stationary_equilibrium(&cfg.params),
    }
}

pub fn hf_model(cfg: &RunConfig, variant: Option<&str>) -> Result<HfModel> {
    match variant {
        Some(name) => {
            let mut base = cfg.params.clone();
            base.variant = Default::default();
            build_named(name, &base, &cfg.targets, &cfg.dynamics)
        }
        None => HfModel::build(&steady_for(cfg)?, &cfg.dynamics),
    }
}

fn rf_for(cfg: &RunConfig, horizon: usize) -> Result<IrfSet> {
    rf_irf(&solve_rf(&RFParams::from_model(&cfg.params))?, horizon, cfg.normalization)
}

fn meta(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn cmd_calibrate(cfg: &RunConfig, check: bool) -> Result<Vec<PathBuf>> {
    let mut table = Table::new(&["moment", "target", "achieved", "log_gap"]);
    let targets = cfg.targets;
    let (params, achieved) = if check {
        let ss = solve_stationary_equilibrium(&cfg.params)?;
        (cfg.params.clone(), ss.moments())
    } else {
        let cal = calibrate(&targets, &cfg.params)?;
        let ss = solve_stationary_equilibrium(&cal.params)?;
        (cal.params, ss.moments())
    };
    for (name, t, a) in [
        ("annual_exit_rate", targets.annual_exit_rate, achieved.annual_exit_rate),
        ("incumbent_size", targets.incumbent_size, achieved.incumbent_size),
        ("exiting_size", targets.exiting_size, achieved.exiting_size),
        ("employment", targets.employment, achieved.employment),
    ] {
        println!("{name:<18} target {t:>10.6} achieved {a:>12.8}");
        table.push(vec![name.into(), fmt12(t), fmt12(a), fmt12((a / t).ln())]);
    }
    if check {
        return Ok(Vec::new());
    }
    let mut out = Artifacts::new(cfg.resolved_output_dir());
    let mut calibrated = cfg.clone();
    calibrated.params = params;
    out.add("calibrated.cfg", calibrated.render());
    out.add_table(
        "calibration",
        &table,
        &meta(&[("description", "calibration targets and achieved stationary moments".into())]),
    );
    out.commit()
}

/// `steady_summary.txt` and `steady_grid.csv`.
pub fn steady_artifacts(ss: &SteadyState, out: &mut Artifacts) {
    let a = &ss.aggregates;
    let mut s = String::new();
    for (k, v) in [
        ("rel_price", ss.prices.p),
        ("real_wage", ss.prices.w),
        ("nominal_rate", ss.nominal_rate),
        ("output", a.output),
        ("consumption", a.consumption),
        ("employment", a.employment),
        ("firm_mass", a.firm_mass),
        ("entrant_mass", a.entrant_mass),
        ("annual_exit_rate", a.annual_exit_rate),
        ("quarterly_exit_rate", a.quarterly_exit_rate),
        ("quarterly_entry_rate", a.entry_rate),
        ("incumbent_size", a.incumbent_size),
        ("exiting_size", a.exiting_size),
        ("tfp", a.tfp),
        ("productivity_index", a.productivity_index),
        ("dividends", a.dividends),
        ("transfers", a.transfers),
        ("labor_supply_residual", ss.labor_supply_residual()),
        ("goods_residual", ss.goods_residual()),
    ] {
        s.push_str(&format!("{k} = {}\n", fmt12(v)));
    }
    s.push_str(&format!("variant = {}\n", ss.params.variant.label()));
    out.add("steady_summary.txt", s);
    let mut t = Table::new(&["log_z", "value", "labor", "exit_prob", "entry_prob", "mass"]);
    for i in 0..ss.env.len() {
        t.push_numbers(&[
            ss.env.chain.grid()[i],
            ss.firm.value[i],
            ss.firm.labor[i],
            1.0 - ss.firm.continuation_prob[i],
            ss.firm.entry_prob[i],
            ss.measure.mass[i],
        ]);
    }
    out.add_table(
        "steady_grid",
        &t,
        &meta(&[
            ("variant", ss.params.variant.label()),
            ("units", "levels; probabilities per quarter".into()),
        ]),
    );
}

/// `irf_<model>_<variant>.csv` and the matching `_summary.csv`.
pub fn irf_artifacts(irf: &IrfSet, out: &mut Artifacts) {
    let mut header = vec!["horizon".to_string(), "model".into(), "variant".into()];
    header.extend(Series::ALL.iter().map(|s| s.name().to_string()));
    let mut t = Table::new(&header);
    for h in 0..=irf.horizon() {
        let mut row = vec![h.to_string(), irf.model.clone(), irf.variant.clone()];
        row.extend(Series::ALL.iter().map(|s| fmt12(irf.get(*s)[h])));
        t.push(row);
    }
    let name = format!("irf_{}_{}", irf.model, irf.variant);
    let mut m = meta(&[
        ("model", irf.model.clone()),
        ("variant", irf.variant.clone()),
        ("normalization", irf.normalization.describe()),
        ("shock_scale", fmt12(irf.shock_scale)),
    ]);
    m.extend(Series::ALL.iter().map(|s| (format!("unit.{}", s.name()), s.unit().to_string())));
    out.add_table(&name, &t, &m);

    let mut s = Table::new(&["series", "impact", "peak_horizon", "peak", "ac4"]);
    for series in Series::ALL {
        let (h, v) = irf.peak(series);
        s.push(vec![
            series.name().into(),
            fmt12(irf.impact(series)),
            h.to_string(),
            fmt12(v),
            fmt12(irf.ac4(series)),
        ]);
    }
    out.add_table(
        &format!("{name}_summary"),
        &s,
        &meta(&[
            ("model", irf.model.clone()),
            ("variant", irf.variant.clone()),
            ("ac4", "sum y_t y_{t+4} / sum y_t^2 over 4000 quarters".into()),
        ]),
    );
}

/// Horizons reported in `fig8_distshift.csv`.
pub const SHIFT_HORIZONS: [usize; 5] = [0, 4, 8, 20, 40];

/// The figure-analogue tables `fig4_profiles`, `fig5_sizes`,
/// `fig6_contributions`, `fig7_gaps` and `fig8_distshift`.
pub fn decompose_artifacts(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let model = hf_model(cfg, None)?;
    let ss = &model.steady;
    let horizon = PF_HORIZON.max(cfg.irf_horizon);
    let hf = model.irf(horizon, cfg.normalization)?;
    let rf = rf_for(cfg, horizon)?;
    let variant = ss.params.variant.label();
    let tag = meta(&[("variant", variant.clone()), ("normalization", cfg.normalization.describe())]);
    let report = cfg.irf_horizon;

    let prof = probability_profiles(ss, 0.01)?;
    let mut t = Table::new(&[
        "log_z",
        "exit_prob",
        "entry_prob",
        "exit_prob_wage_up",
        "exit_prob_price_up",
        "exit_prob_rate_up",
    ]);
    for i in 0..prof.log_z.len() {
        t.push_numbers(&[
            prof.log_z[i],
            prof.exit_prob[i],
            prof.entry_prob[i],
            prof.exit_prob_wage_up[i],
            prof.exit_prob_price_up[i],
            prof.exit_prob_rate_up[i],
        ]);
    }
    let mut m = tag.clone();
    m.push(("bump".into(), "permanent 1 percent increase of w, p or the gross real rate".into()));
    out.add_table("fig4_profiles", &t, &m);

    let mut t = Table::new(&["lower", "upper", "firm_share", "employment_share", "exit_rate", "entrant_share"]);
    for c in size_profile(ss, &SIZE_CLASS_BOUNDS) {
        t.push_numbers(&[c.lower, c.upper, c.firm_share, c.employment_share, c.exit_rate, c.entrant_share]);
    }
    out.add_table("fig5_sizes", &t, &tag);

    let c = price_contributions(&hf, ss, PF_HORIZON)?;
    let mut header = vec!["horizon".to_string()];
    let paths: Vec<(String, Vec<f64>)> = std::iter::once(("all", &c.total))
        .chain(PriceKind::ALL.iter().map(|k| (k.name(), c.get(*k))))
        .flat_map(|(name, r)| [(format!("exit_bp_{name}"), r.exit_bp()), (format!("entry_bp_{name}"), r.entry_bp())])
        .collect();
    header.extend(paths.iter().map(|(n, _)| n.clone()));
    let mut t = Table::new(&header);
    for h in 0..=report.min(PF_HORIZON - 1) {
        let mut row = vec![h.to_string()];
        row.extend(paths.iter().map(|(_, v)| fmt12(v[h])));
        t.push(row);
    }
    out.add_table("fig6_contributions", &t, &tag);

    let gaps = employment_gap_rf_prices(&rf, &hf, ss, PF_HORIZON)?;
    let mut t = Table::new(&["horizon", "gap_rf_prices", "gap_equilibrium"]);
    for h in 0..=report.min(gaps.rf_prices.len() - 1) {
        t.push(vec![h.to_string(), fmt12(gaps.rf_prices[h]), fmt12(gaps.equilibrium[h])]);
    }
    out.add_table("fig7_gaps", &t, &tag);

    let horizons: Vec<usize> = SHIFT_HORIZONS.iter().copied().filter(|h| *h <= horizon).collect();
    let shifts = distribution_shift(&model.system, &hf, &horizons)?;
    let mut t = Table::new(&["horizon", "grid_index", "log_z", "delta"]);
    for (h, d) in horizons.iter().zip(&shifts) {
        for (i, x) in d.iter().enumerate() {
            t.push(vec![h.to_string(), i.to_string(), fmt12(ss.env.chain.grid()[i]), fmt12(*x)]);
        }
    }
    out.add_table("fig8_distshift", &t, &tag);
    Ok(())
}

pub fn variant_artifacts(cfg: &RunConfig, names: &[String], out: &mut Artifacts) -> Result<()> {
    let rf = rf_for(cfg, cfg.irf_horizon)?;
    let mut t = Table::new(&["variant", "exit_bp", "entry_bp", "output", "output_gap_rf", "gamma_h20"]);
    for name in names {
        let irf = hf_model(cfg, Some(name))?.irf(cfg.irf_horizon.max(20), cfg.normalization)?;
        t.push(vec![
            name.clone(),
            fmt12(irf.impact(Series::ExitRateBp)),
            fmt12(irf.impact(Series::EntryRateBp)),
            fmt12(irf.impact(Series::Output)),
            fmt12(irf.impact(Series::Output) - rf.impact(Series::Output)),
            fmt12(irf.get(Series::Gamma)[20]),
        ]);
        irf_artifacts(&irf, out);
    }
    out.add_table(
        "variants_summary",
        &t,
        &meta(&[("normalization", cfg.normalization.describe())]),
    );
    Ok(())
}

pub fn sweep_artifacts(cfg: &RunConfig, nus: &[f64], out: &mut Artifacts) -> Result<()> {
    let mut t = Table::new(&[
        "nu",
        "mu_c",
        "sigma_c",
        "a_z",
        "entrant_mass",
        "kappa0",
        "exit_bp",
        "entry_bp",
        "output_hf",
        "output_rf",
        "output_gap_rf",
    ]);
    for &nu in nus {
        let cal = recalibrate_nu(&cfg.params, nu, &cfg.targets, 0.1)?;
        let ss = solve_stationary_equilibrium(&cal.params)?;
        let hf = HfModel::build(&ss, &cfg.dynamics)?.irf(1, cfg.normalization)?;
        let rf = rf_irf(&solve_rf(&RFParams::from_model(&cal.params))?, 1, cfg.normalization)?;
        let p = &cal.params;
        t.push_numbers(&[
            nu,
            p.operating_cost.location,
            p.operating_cost.scale,
            p.productivity.mean,
            p.entrant_mass,
            p.kappa0,
            hf.impact(Series::ExitRateBp),
            hf.impact(Series::EntryRateBp),
            hf.impact(Series::Output),
            rf.impact(Series::Output),
            hf.impact(Series::Output) - rf.impact(Series::Output),
        ]);
    }
    out.add_table(
        "sweep_nu",
        &t,
        &meta(&[("normalization", cfg.normalization.describe())]),
    );
    Ok(())
}

