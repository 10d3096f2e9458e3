use std::sync::OnceLock;

use firmdyn::analysis::{
    distribution_shift, employment_gap_rf_prices, perfect_foresight, price_contributions, probability_profiles,
    size_profile, PricePath, PriceKind, PF_HORIZON, SIZE_CLASS_BOUNDS,
};
use firmdyn::dynamics::{DynamicsOptions, HfModel, IrfSet, Normalization, Series};
use firmdyn::equilibrium::solve_stationary_equilibrium;
use firmdyn::params::ModelParams;
use firmdyn::rfmodel::{rf_irf, solve_rf, RFParams};

struct Fixture {
    model: HfModel,
    hf: IrfSet,
    rf: IrfSet,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let params = ModelParams::baseline();
        let ss = solve_stationary_equilibrium(&params).unwrap();
        let model = HfModel::build(&ss, &DynamicsOptions::default()).unwrap();
        let hf = model.irf(PF_HORIZON, Normalization::default()).unwrap();
        let rf = rf_irf(&solve_rf(&RFParams::from_model(&params)).unwrap(), PF_HORIZON, Normalization::default()).unwrap();
        Fixture { model, hf, rf }
    })
}

#[test]
fn constant_prices_keep_the_stationary_equilibrium() {
    let ss = &fixture().model.steady;
    let pf = perfect_foresight(ss, &PricePath::default(), 30).unwrap();
    for mu in &pf.measures {
        for (a, b) in mu.iter().zip(&ss.measure.mass) {
            assert!((a - b).abs() < 1e-10 * ss.measure.total());
        }
    }
    assert!(pf.rates.exit_bp().iter().all(|x| x.abs() < 1e-6));
    assert!(pf.rates.entry_bp().iter().all(|x| x.abs() < 1e-6));
    for e in &pf.employment {
        assert!((e / ss.aggregates.employment - 1.0).abs() < 1e-10);
    }
}

#[test]
fn small_perfect_foresight_paths_match_the_linear_response() {
    let f = fixture();
    let scale = 1e-2;
    let path = PricePath::from_irf(&f.hf).scaled(scale);
    let pf = perfect_foresight(&f.model.steady, &path, PF_HORIZON).unwrap();
    let exit = f.hf.get(Series::ExitRateBp);
    let pf_exit = pf.rates.exit_bp();
    for h in 0..4 {
        let ratio = pf_exit[h] / scale / exit[h];
        assert!((ratio - 1.0).abs() < 0.05, "h={h}: ratio {ratio}");
    }
}

#[test]
fn a_zero_shock_has_zero_contributions() {
    let f = fixture();
    let zero = f.model.irf(PF_HORIZON, Normalization::Innovation(0.0)).unwrap();
    let c = price_contributions(&zero, &f.model.steady, PF_HORIZON).unwrap();
    for r in [&c.total, &c.real_rate, &c.wage, &c.rel_price] {
        assert!(r.exit_bp().iter().chain(&r.entry_bp()).all(|x| x.abs() < 1e-9));
    }
}

#[test]
fn real_rate_drives_exit_while_wage_and_price_offset() {
    let f = fixture();
    let c = price_contributions(&f.hf, &f.model.steady, PF_HORIZON).unwrap();
    let total = c.total.exit_bp()[0];
    let r = c.get(PriceKind::RealRate).exit_bp()[0];
    let w = c.get(PriceKind::Wage).exit_bp()[0];
    let p = c.get(PriceKind::RelPrice).exit_bp()[0];
    assert!(total > 0.0 && r > 0.0);
    assert!(w < 0.0 && p > 0.0);
    assert!(r / total > 0.5, "real-rate share {}", r / total);
    // perfect-foresight total agrees with the linear impulse response
    assert!((total / f.hf.impact(Series::ExitRateBp) - 1.0).abs() < 0.05);
}

#[test]
fn heterogeneous_firms_hire_less_at_representative_firm_prices() {
    let f = fixture();
    let gaps = employment_gap_rf_prices(&f.rf, &f.hf, &f.model.steady, PF_HORIZON).unwrap();
    assert!(gaps.rf_prices[1..20].iter().all(|g| *g < 0.0));
    let peak = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    assert!(peak(&gaps.rf_prices) > peak(&gaps.equilibrium));
}

#[test]
fn distribution_shift_is_a_reallocation() {
    let f = fixture();
    let horizons = [0, 4, 8, 20, 40];
    let shifts = distribution_shift(&f.model.system, &f.hf, &horizons).unwrap();
    for d in &shifts {
        assert!(d.iter().sum::<f64>().abs() < 1e-12);
    }
    // exit of marginal firms moves mass toward higher productivity
    let d = &shifts[1];
    let half = d.len() / 2;
    assert!(d[..half].iter().sum::<f64>() < 0.0);
    assert!(distribution_shift(&f.model.system, &f.hf, &[PF_HORIZON + 1]).is_err());
}

#[test]
fn exit_probabilities_respond_to_each_price() {
    let ss = &fixture().model.steady;
    let prof = probability_profiles(ss, 0.01).unwrap();
    let interior: Vec<usize> = (0..prof.log_z.len())
        .filter(|&i| prof.exit_prob[i] > 1e-4 && prof.exit_prob[i] < 0.999)
        .collect();
    assert!(!interior.is_empty());
    for i in interior {
        assert!(prof.exit_prob_wage_up[i] > prof.exit_prob[i]);
        assert!(prof.exit_prob_price_up[i] < prof.exit_prob[i]);
        assert!(prof.exit_prob_rate_up[i] > prof.exit_prob[i]);
    }
    // more productive firms exit less often
    assert!(prof.exit_prob.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

#[test]
fn small_firms_exit_more_often() {
    let classes = size_profile(&fixture().model.steady, &SIZE_CLASS_BOUNDS);
    let total: f64 = classes.iter().map(|c| c.firm_share).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let rates: Vec<f64> = classes.iter().filter(|c| c.firm_share > 0.0).map(|c| c.exit_rate).collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
}
