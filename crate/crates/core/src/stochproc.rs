//! Idiosyncratic productivity discretization and lognormal cost utilities.
//!
//! Log productivity follows a Gaussian AR(1) which is mapped onto an evenly
//! spaced grid with the Rouwenhorst recursion. Fixed operating and entry
//! costs are lognormal; the firm problem only ever needs their CDF, the
//! partial expectation `E[x; x <= c]` and the option value
//! `E[max(c - x, 0)]`, all of which have closed forms here.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Standard normal CDF, `0.5 * erfc(-x / sqrt(2))`.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Gaussian AR(1) in logs: `x' = mean (1 - persistence) + persistence x + sd e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AR1Spec {
    pub persistence: f64,
    pub innovation_sd: f64,
    pub mean: f64,
}

impl AR1Spec {
    pub fn new(persistence: f64, innovation_sd: f64, mean: f64) -> Result<Self> {
        let spec = Self {
            persistence,
            innovation_sd,
            mean,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.persistence.abs() < 1.0) {
            return Err(Error::invalid(
                "persistence",
                format!("|rho| must be < 1, got {}", self.persistence),
            ));
        }
        if !(self.innovation_sd > 0.0) || !self.innovation_sd.is_finite() {
            return Err(Error::invalid(
                "innovation_sd",
                format!("must be positive, got {}", self.innovation_sd),
            ));
        }
        if !self.mean.is_finite() {
            return Err(Error::invalid("mean", "must be finite"));
        }
        Ok(())
    }

    /// Unconditional standard deviation of the process.
    pub fn unconditional_sd(&self) -> f64 {
        self.innovation_sd / (1.0 - self.persistence * self.persistence).sqrt()
    }
}

/// Finite-state Markov chain over log productivity.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    grid: Vec<f64>,
    transition: DMatrix<f64>,
    entrant: Vec<f64>,
}

impl MarkovChain {
    /// Builds a chain from its parts, checking that the transition matrix is
    /// row-stochastic, the entrant distribution sums to one and the grid is
    /// strictly increasing.
    pub fn new(grid: Vec<f64>, transition: DMatrix<f64>, entrant: Vec<f64>) -> Result<Self> {
        let k = grid.len();
        if k == 0 {
            return Err(Error::invalid("grid", "empty grid"));
        }
        if transition.nrows() != k || transition.ncols() != k || entrant.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "grid has {k} points, transition is {}x{}, entrant has {}",
                transition.nrows(),
                transition.ncols(),
                entrant.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid", "must be strictly increasing"));
        }
        for i in 0..k {
            let row = transition.row(i);
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::invalid("transition", format!("row {i} has entries outside [0,1]")));
            }
            if (row.sum() - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("transition", format!("row {i} sums to {}", row.sum())));
            }
        }
        if entrant.iter().any(|&p| !(0.0..=1.0).contains(&p))
            || (entrant.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(Error::invalid("entrant", "not a probability distribution"));
        }
        Ok(Self {
            grid,
            transition,
            entrant,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Log-productivity grid points.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Productivity levels `exp(grid)`.
    pub fn levels(&self) -> Vec<f64> {
        self.grid.iter().map(|g| g.exp()).collect()
    }

    /// `P[i, j] = Pr(z' = z_j | z = z_i)`.
    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    /// Distribution of productivity draws for potential entrants.
    pub fn entrant(&self) -> &[f64] {
        &self.entrant
    }

    /// Same chain with every grid point shifted by `delta` (log units).
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            grid: self.grid.iter().map(|g| g + delta).collect(),
            transition: self.transition.clone(),
            entrant: self.entrant.clone(),
        }
    }

    /// `E[f(z') | z_i]` for every grid point.
    pub fn expect(&self, values: &[f64]) -> Vec<f64> {
        let k = self.len();
        (0..k)
            .map(|i| (0..k).map(|j| self.transition[(i, j)] * values[j]).sum())
            .collect()
    }

    /// One step of the forward (Kolmogorov) operator: `out_i = sum_j P[j, i] mass_j`.
    pub fn push_forward(&self, mass: &[f64]) -> Vec<f64> {
        let k = self.len();
        let mut out = vec![0.0; k];
        for (j, &m) in mass.iter().enumerate().take(k) {
            if m == 0.0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.transition[(j, i)] * m;
            }
        }
        out
    }
}

/// Rouwenhorst discretization with `k` evenly spaced points spanning
/// `mean ± sd_uncond * sqrt(k - 1)`. Entrants draw from the chain's
/// stationary distribution, Binomial(k-1, 1/2).
pub fn rouwenhorst(spec: &AR1Spec, k: usize) -> Result<MarkovChain> {
    spec.validate()?;
    if k < 2 {
        return Err(Error::invalid("k", format!("need at least 2 grid points, got {k}")));
    }
    let p = 0.5 * (1.0 + spec.persistence);
    let mut mat = vec![p, 1.0 - p, 1.0 - p, p];
    for n in 3..=k {
        let m = n - 1;
        let mut next = vec![0.0; n * n];
        for i in 0..m {
            for j in 0..m {
                let v = mat[i * m + j];
                next[i * n + j] += p * v;
                next[i * n + j + 1] += (1.0 - p) * v;
                next[(i + 1) * n + j] += (1.0 - p) * v;
                next[(i + 1) * n + j + 1] += p * v;
            }
        }
        for i in 1..n - 1 {
            for j in 0..n {
                next[i * n + j] *= 0.5;
            }
        }
        mat = next;
    }
    let mut transition = DMatrix::from_row_slice(k, k, &mat);
    // rescale each row exactly onto the simplex
    for i in 0..k {
        let s: f64 = transition.row(i).sum();
        for j in 0..k {
            transition[(i, j)] /= s;
        }
    }

    let half_width = spec.unconditional_sd() * ((k - 1) as f64).sqrt();
    let step = 2.0 * half_width / (k - 1) as f64;
    let grid = (0..k)
        .map(|i| spec.mean - half_width + step * i as f64)
        .collect();

    MarkovChain::new(grid, transition, binomial_half(k - 1))
}

/// Binomial(n, 1/2) probabilities, computed in logs to avoid underflow.
pub fn binomial_half(n: usize) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    let mut log_c = 0.0;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i > 0 {
            log_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        out.push((log_c - n as f64 * ln2).exp());
    }
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= s);
    out
}

/// Stationary distribution `pi = pi P` by power iteration from the uniform
/// distribution.
pub fn chain_stationary(transition: &DMatrix<f64>) -> Result<Vec<f64>> {
    const MAX_ITER: usize = 2_000_000;
    const TOL: f64 = 1e-15;
    let k = transition.nrows();
    if k == 0 || transition.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "transition matrix is {}x{}",
            transition.nrows(),
            transition.ncols()
        )));
    }
    let mut pi = vec![1.0 / k as f64; k];
    let mut next = vec![0.0; k];
    let mut change = f64::INFINITY;
    for _ in 0..MAX_ITER {
        next.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..k {
            for i in 0..k {
                next[i] += pi[j] * transition[(j, i)];
            }
        }
        let s: f64 = next.iter().sum();
        change = 0.0;
        for i in 0..k {
            let v = next[i] / s;
            change = f64::max(change, (v - pi[i]).abs());
            pi[i] = v;
        }
        if change < TOL {
            return Ok(pi);
        }
    }
    Err(Error::NonConvergence {
        what: "stationary distribution (reducible or periodic chain?)",
        iterations: MAX_ITER,
        residual: change,
    })
}

/// Maps an annual AR(1) for log firm employment into the quarterly
/// log-productivity process: `rho_z = rho_n^(1/4)` and
/// `sigma_z = |nu - 1| sqrt(sigma_n^2 / sum_{j<4} rho_z^(2j))`.
pub fn quarterly_from_annual(rho_n: f64, sigma_n: f64, nu: f64) -> Result<(f64, f64)> {
    if !(rho_n > 0.0 && rho_n < 1.0) {
        return Err(Error::invalid("rho_n", format!("must lie in (0,1), got {rho_n}")));
    }
    if !(sigma_n > 0.0) || !sigma_n.is_finite() {
        return Err(Error::invalid("sigma_n", format!("must be positive, got {sigma_n}")));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::invalid("nu", format!("must lie in (0,1), got {nu}")));
    }
    let rho_z = rho_n.powf(0.25);
    let geometric: f64 = (0..4).map(|j| rho_z.powi(2 * j)).sum();
    let sigma_z = (nu - 1.0).abs() * (sigma_n * sigma_n / geometric).sqrt();
    Ok((rho_z, sigma_z))
}

/// Lognormal distribution `LN(location, scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalSpec {
    pub location: f64,
    pub scale: f64,
}

impl LognormalSpec {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        let spec = Self { location, scale };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.location.is_finite() {
            return Err(Error::invalid("location", "must be finite"));
        }
        if !(self.scale > 1e-12) || !self.scale.is_finite() {
            return Err(Error::invalid(
                "scale",
                format!("must exceed 1e-12, got {}", self.scale),
            ));
        }
        Ok(())
    }

    /// Distribution of `exp(shift) * x`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            location: self.location + shift,
            scale: self.scale,
        }
    }

    pub fn mean(&self) -> f64 {
        (self.location + 0.5 * self.scale * self.scale).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            norm_cdf((x.ln() - self.location) / self.scale)
        }
    }

    /// `E[x; x <= cap]`, zero for `cap <= 0`.
    pub fn partial_expectation(&self, cap: f64) -> f64 {
        if cap <= 0.0 {
            return 0.0;
        }
        let d = (cap.ln() - self.location) / self.scale;
        self.mean() * norm_cdf(d - self.scale)
    }

    /// `E[x | x <= cap]`.
    pub fn truncated_mean(&self, cap: f64) -> Result<f64> {
        if !(cap > 0.0) {
            return Err(Error::invalid("cap", format!("must be positive, got {cap}")));
        }
        let d = (cap.ln() - self.location) / self.scale;
        let denom = norm_cdf(d);
        if denom == 0.0 {
            // deep lower tail: the conditional mean approaches the cap
            return Ok(cap);
        }
        Ok(self.mean() * norm_cdf(d - self.scale) / denom)
    }

    /// Option value of paying a cost drawn from this distribution for a
    /// payoff `threshold`: `E[max(threshold - x, 0)] = threshold G(threshold) - E[x; x <= threshold]`.
    pub fn expected_gain(&self, threshold: f64) -> f64 {
        if threshold <= 0.0 {
            return 0.0;
        }
        let d = (threshold.ln() - self.location) / self.scale;
        let g = threshold * norm_cdf(d) - self.mean() * norm_cdf(d - self.scale);
        g.max(0.0)
    }

    /// Inverse of [`expected_gain`](Self::expected_gain): the threshold `c`
    /// with `E[max(c - x, 0)] = gain`. Returns 0 for non-positive gains.
    pub fn gain_threshold(&self, gain: f64) -> f64 {
        if !(gain > 0.0) {
            return 0.0;
        }
        // gain <= c <= gain + E[x] brackets the root (H(c) <= c, H(c) >= c - E[x])
        let mut lo = gain;
        let mut hi = gain + self.mean();
        // Newton from the right on a convex increasing function, safeguarded
        let mut c = hi;
        for _ in 0..200 {
            let f = self.expected_gain(c) - gain;
            if f > 0.0 {
                hi = c;
            } else {
                lo = c;
            }
            let slope = self.cdf(c);
            let mut next = if slope > 0.0 { c - f / slope } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            }
            if (next - c).abs() <= 4.0 * f64::EPSILON * c || hi - lo <= 4.0 * f64::EPSILON * hi {
                return next;
            }
            c = next;
        }
        c
    }
}

/// `G(x)` for a lognormal spec; zero on `x <= 0`.
pub fn lognormal_cdf(spec: &LognormalSpec, x: f64) -> f64 {
    spec.cdf(x)
}

/// `E[x | x <= cap]` for a lognormal spec.
pub fn truncated_lognormal_mean(spec: &LognormalSpec, cap: f64) -> Result<f64> {
    spec.truncated_mean(cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_state_base_case() {
        let chain = rouwenhorst(&AR1Spec::new(0.6, 0.1, 0.0).unwrap(), 2).unwrap();
        let p = chain.transition();
        assert_relative_eq!(p[(0, 0)], 0.8, epsilon = 1e-15);
        assert_relative_eq!(p[(0, 1)], 0.2, epsilon = 1e-15);
        assert_relative_eq!(p[(1, 0)], 0.2, epsilon = 1e-15);
        assert_relative_eq!(p[(1, 1)], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn zero_persistence_rows_are_binomial() {
        let chain = rouwenhorst(&AR1Spec::new(0.0, 0.3, 1.2).unwrap(), 3).unwrap();
        for i in 0..3 {
            let row: Vec<f64> = chain.transition().row(i).iter().copied().collect();
            assert_relative_eq!(row.as_slice(), [0.25, 0.5, 0.25].as_slice(), epsilon = 1e-15);
        }
    }

    #[test]
    fn grid_span_and_spacing() {
        let spec = AR1Spec::new(0.9, 0.2, 0.5).unwrap();
        let chain = rouwenhorst(&spec, 11).unwrap();
        let half = spec.unconditional_sd() * 10f64.sqrt();
        assert_relative_eq!(chain.grid()[0], 0.5 - half, epsilon = 1e-14);
        assert_relative_eq!(chain.grid()[10], 0.5 + half, epsilon = 1e-14);
        let d: Vec<f64> = chain.grid().windows(2).map(|w| w[1] - w[0]).collect();
        for x in &d {
            assert_relative_eq!(*x, d[0], epsilon = 1e-13);
        }
    }

    #[test]
    fn conditional_autocorrelation_is_exact() {
        // E[z' | z] = mean + rho (z - mean) on the grid
        let spec = AR1Spec::new(0.7, 0.05, 0.3).unwrap();
        let chain = rouwenhorst(&spec, 9).unwrap();
        let cond = chain.expect(chain.grid());
        for (g, c) in chain.grid().iter().zip(cond) {
            assert_relative_eq!(c - 0.3, 0.7 * (g - 0.3), epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = AR1Spec {
            persistence: 0.5,
            innovation_sd: 0.1,
            mean: 0.0,
        };
        assert!(rouwenhorst(&spec, 1).is_err());
        assert!(AR1Spec::new(1.0, 0.1, 0.0).is_err());
        assert!(AR1Spec::new(0.5, 0.0, 0.0).is_err());
        assert!(LognormalSpec::new(0.0, 1e-13).is_err());
        assert!(quarterly_from_annual(1.0, 0.2, 0.9).is_err());
        assert!(quarterly_from_annual(0.9, 0.2, 1.0).is_err());
    }

    #[test]
    fn stationary_small_chains() {
        let p2 = rouwenhorst(&AR1Spec::new(0.6, 0.1, 0.0).unwrap(), 2).unwrap();
        let pi = chain_stationary(p2.transition()).unwrap();
        assert_relative_eq!(pi.as_slice(), [0.5, 0.5].as_slice(), epsilon = 1e-14);
        let p3 = rouwenhorst(&AR1Spec::new(0.6, 0.1, 0.0).unwrap(), 3).unwrap();
        let pi = chain_stationary(p3.transition()).unwrap();
        assert_relative_eq!(pi.as_slice(), [0.25, 0.5, 0.25].as_slice(), epsilon = 1e-12);
    }

    #[test]
    fn periodic_chain_does_not_converge() {
        let p = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        // uniform start is already stationary for the flip chain
        assert!(chain_stationary(&p).is_ok());
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert!(chain_stationary(&p).is_ok());
        // period two with a non-uniform stationary law: the uniform start oscillates
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.5, 0.5, 0.0]);
        match chain_stationary(&p) {
            Err(Error::NonConvergence { .. }) => {}
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn quarterly_mapping_baseline_values() {
        let (rho, sd) = quarterly_from_annual(0.9771, 0.2676, 0.9).unwrap();
        assert!((rho - 0.99422).abs() < 1e-5, "{rho}");
        assert!((sd - 0.01350).abs() < 1e-5, "{sd}");
        let (_, sd5) = quarterly_from_annual(0.9771, 0.2676, 0.5).unwrap();
        assert_relative_eq!(sd5 / sd, 5.0, epsilon = 1e-12);
        let (rho0, sd0) = quarterly_from_annual(1e-12, 0.3, 0.9).unwrap();
        assert!(rho0 < 1e-2);
        assert_relative_eq!(sd0, 0.03, epsilon = 1e-7);
    }

    #[test]
    fn lognormal_cdf_basics() {
        let spec = LognormalSpec::new(-1.3, 0.7).unwrap();
        assert_relative_eq!(spec.cdf((-1.3f64).exp()), 0.5, epsilon = 1e-15);
        assert_eq!(spec.cdf(0.0), 0.0);
        assert_eq!(spec.cdf(-3.0), 0.0);
    }

    #[test]
    fn truncated_mean_limits() {
        let spec = LognormalSpec::new(0.0, 1.0).unwrap();
        assert_relative_eq!(spec.truncated_mean(1e12).unwrap(), 1.648_721_270_700_128, epsilon = 1e-9);
        // e^(1/2) Phi(-1) / Phi(0), confirmed by quadrature
        assert!((spec.truncated_mean(1.0).unwrap() - 0.523_156_583_73).abs() < 1e-10);
        let tiny = (0.0f64 - 10.0).exp();
        assert!(spec.truncated_mean(tiny).unwrap() < tiny);
        assert!(spec.truncated_mean(0.0).is_err());
    }

    #[test]
    fn gain_inverse_roundtrip() {
        let spec = LognormalSpec::new(-6.216, 4.537).unwrap();
        for &c in &[1e-9, 1e-4, 0.01, 0.7, 3.0, 55.0, 1e3, 1e5] {
            let g = spec.expected_gain(c);
            let back = spec.gain_threshold(g);
            assert_relative_eq!(back, c, max_relative = 1e-12);
        }
        assert_eq!(spec.gain_threshold(0.0), 0.0);
        assert_eq!(spec.gain_threshold(-1.0), 0.0);
    }
}
