//! Impulse responses to the monetary policy shock.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Reported impulse-response series. Percent deviations except the two
/// rates, which are basis-point deviations; inflation and interest rates are
/// quarterly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    Output,
    Consumption,
    Employment,
    RealWage,
    RelPrice,
    Inflation,
    NominalRate,
    RealRate,
    EntryRateBp,
    ExitRateBp,
    Gamma,
    Tfp,
    Dividends,
    ProductivityIndex,
}

impl Series {
    pub const ALL: [Series; 14] = [
        Series::Output,
        Series::Consumption,
        Series::Employment,
        Series::RealWage,
        Series::RelPrice,
        Series::Inflation,
        Series::NominalRate,
        Series::RealRate,
        Series::EntryRateBp,
        Series::ExitRateBp,
        Series::Gamma,
        Series::Tfp,
        Series::Dividends,
        Series::ProductivityIndex,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Series::Output => "output",
            Series::Consumption => "consumption",
            Series::Employment => "employment",
            Series::RealWage => "real_wage",
            Series::RelPrice => "rel_price",
            Series::Inflation => "inflation",
            Series::NominalRate => "nominal_rate",
            Series::RealRate => "real_rate",
            Series::EntryRateBp => "entry_rate_bp",
            Series::ExitRateBp => "exit_rate_bp",
            Series::Gamma => "gamma",
            Series::Tfp => "tfp",
            Series::Dividends => "dividends",
            Series::ProductivityIndex => "productivity_index",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            Series::EntryRateBp | Series::ExitRateBp => "basis points",
            Series::Inflation | Series::NominalRate | Series::RealRate => "percent, quarterly",
            _ => "percent deviation",
        }
    }

    pub fn from_name(name: &str) -> Option<Series> {
        Series::ALL.iter().copied().find(|s| s.name() == name)
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// How the shock is scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Ex ante real rate rises by this many log points on impact (0.01 is
    /// one percentage point per quarter).
    RealRate(f64),
    /// Raw innovation size to the Taylor-rule shock.
    Innovation(f64),
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization::RealRate(0.01)
    }
}

impl Normalization {
    pub fn describe(&self) -> String {
        match self {
            Normalization::RealRate(r) => format!("real_rate_impact={r}"),
            Normalization::Innovation(e) => format!("innovation={e}"),
        }
    }
}

/// Horizons used internally for autocorrelations of slowly decaying series.
pub const LONG_HORIZON: usize = 4000;

/// A set of impulse responses.
#[derive(Debug, Clone, PartialEq)]
pub struct IrfSet {
    pub model: String,
    pub variant: String,
    pub normalization: Normalization,
    /// Innovation size implied by the normalization.
    pub shock_scale: f64,
    /// `paths[s][h]` for series `s` in [`Series::ALL`] order, `h = 0..=horizon`.
    paths: Vec<Vec<f64>>,
    /// Four-quarter autocorrelation `sum y_t y_{t+4} / sum y_t^2` of each
    /// series over a long horizon.
    ac4: Vec<f64>,
    /// Deviations of the model state at each horizon (model coordinates).
    pub states: Vec<Vec<f64>>,
}

impl IrfSet {
    /// Assembles a set from long paths (`paths[s]` at least `horizon + 1`
    /// long) and truncates them to `horizon`.
    pub fn from_long_paths(
        model: &str,
        variant: &str,
        normalization: Normalization,
        shock_scale: f64,
        long: Vec<Vec<f64>>,
        mut states: Vec<Vec<f64>>,
        horizon: usize,
    ) -> Result<Self> {
        if long.len() != Series::ALL.len() {
            return Err(Error::DimensionMismatch("one path per series expected".into()));
        }
        if long.iter().any(|p| p.len() <= horizon) {
            return Err(Error::HorizonTooShort("paths shorter than requested horizon".into()));
        }
        let ac4 = long.iter().map(|p| autocorrelation(p, 4)).collect();
        let paths = long.into_iter().map(|mut p| {
            p.truncate(horizon + 1);
            p
        });
        states.truncate(horizon + 1);
        Ok(Self {
            model: model.to_string(),
            variant: variant.to_string(),
            normalization,
            shock_scale,
            paths: paths.collect(),
            ac4,
            states,
        })
    }

    pub fn horizon(&self) -> usize {
        self.paths[0].len() - 1
    }

    pub fn get(&self, s: Series) -> &[f64] {
        &self.paths[s.index()]
    }

    pub fn impact(&self, s: Series) -> f64 {
        self.paths[s.index()][0]
    }

    /// Four-quarter autocorrelation computed over a long horizon.
    pub fn ac4(&self, s: Series) -> f64 {
        self.ac4[s.index()]
    }

    /// Value with the largest magnitude and its horizon.
    pub fn peak(&self, s: Series) -> (usize, f64) {
        self.get(s)
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |best, (h, v)| if v.abs() > best.1.abs() { (h, v) } else { best })
    }

    /// Multiplies every path by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.shock_scale *= factor;
        for p in out.paths.iter_mut() {
            p.iter_mut().for_each(|v| *v *= factor);
        }
        for s in out.states.iter_mut() {
            s.iter_mut().for_each(|v| *v *= factor);
        }
        out
    }
}

/// `sum_t y_t y_{t+lag} / sum_t y_t^2`; zero for an identically zero path.
pub fn autocorrelation(y: &[f64], lag: usize) -> f64 {
    let denom: f64 = y.iter().map(|v| v * v).sum();
    if denom == 0.0 || y.len() <= lag {
        return 0.0;
    }
    let num: f64 = y.iter().zip(&y[lag..]).map(|(a, b)| a * b).sum();
    num / denom
}

/// Linear map from `(x_{t-1}, x_t, x_{t+1})` deviations to derived series.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedMap {
    pub lag: DMatrix<f64>,
    pub current: DMatrix<f64>,
    pub lead: DMatrix<f64>,
}

impl DerivedMap {
    /// Central finite-difference Jacobians of `f` at `(ss, ss, ss)`.
    pub fn from_fn<F>(ss: &[f64], rows: usize, rel_step: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &[f64], &[f64]) -> Vec<f64>,
    {
        let n = ss.len();
        let mut mats = [DMatrix::zeros(rows, n), DMatrix::zeros(rows, n), DMatrix::zeros(rows, n)];
        for (slot, mat) in mats.iter_mut().enumerate() {
            for j in 0..n {
                let h = rel_step * ss[j].abs().max(1.0);
                let mut up = [ss.to_vec(), ss.to_vec(), ss.to_vec()];
                let mut dn = [ss.to_vec(), ss.to_vec(), ss.to_vec()];
                up[slot][j] += h;
                dn[slot][j] -= h;
                let fu = f(&up[0], &up[1], &up[2]);
                let fd = f(&dn[0], &dn[1], &dn[2]);
                for i in 0..rows {
                    let d = (fu[i] - fd[i]) / (2.0 * h);
                    if !d.is_finite() {
                        return Err(Error::NonFiniteDerivative { row: i, col: j });
                    }
                    mat[(i, j)] = d;
                }
            }
        }
        let [lag, current, lead] = mats;
        Ok(Self { lag, current, lead })
    }

    /// Derived deviations along a state path (`x_{-1} = 0`; the last period
    /// uses `x_{T+1} = 0` and is therefore only approximate).
    pub fn apply(&self, states: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let n = self.current.ncols();
        let zero = DVector::zeros(n);
        (0..states.len())
            .map(|t| {
                let lag = if t == 0 { &zero } else { &states[t - 1] };
                let lead = states.get(t + 1).unwrap_or(&zero);
                &self.lag * lag + &self.current * &states[t] + &self.lead * lead
            })
            .collect()
    }
}
