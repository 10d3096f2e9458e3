//! First-order perturbation of a system `f(x_{t-1}, x_t, E_t x_{t+1}, eps_t) = 0`
//! and the solution of the resulting linear rational-expectations model
//! `A E_t x_{t+1} + B x_t + C x_{t-1} + D eps_t = 0` with an AR(1) shock.

use nalgebra::{DMatrix, DVector, Schur};

use crate::error::{Error, Result, RootDiagnostics};

/// A nonlinear dynamic system written in deviation-ready coordinates.
pub trait ResidualSystem {
    fn dim(&self) -> usize;

    /// Steady-state point in the system's own coordinates.
    fn steady_state(&self) -> Vec<f64>;

    /// Equation residuals at `(x_{t-1}, x_t, x_{t+1})` and shock `eps_t`.
    fn residuals(&self, lag: &[f64], current: &[f64], lead: &[f64], shock: f64) -> Vec<f64>;

    fn variable_names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("x{i}")).collect()
    }
}

/// Coefficient matrices of the linearized system.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    /// `A`, derivatives with respect to `x_{t+1}`.
    pub lead: DMatrix<f64>,
    /// `B`, derivatives with respect to `x_t`.
    pub current: DMatrix<f64>,
    /// `C`, derivatives with respect to `x_{t-1}`.
    pub lag: DMatrix<f64>,
    /// `D`, derivatives with respect to the shock.
    pub shock: DVector<f64>,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        self.current.nrows()
    }

    /// Reorders variables (columns) and equations (rows) by `perm`, where
    /// position `i` of the result holds original index `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim();
        let pm = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(perm[i], perm[j])]);
        Self {
            lead: pm(&self.lead),
            current: pm(&self.current),
            lag: pm(&self.lag),
            shock: DVector::from_fn(n, |i, _| self.shock[perm[i]]),
        }
    }
}

/// Largest absolute steady-state residual.
pub fn steady_state_residual(sys: &dyn ResidualSystem) -> f64 {
    let x = sys.steady_state();
    sys.residuals(&x, &x, &x, 0.0)
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()))
}

/// Central finite-difference Jacobians with step `rel_step * max(1, |x_j|)`.
pub fn linearize(sys: &dyn ResidualSystem, rel_step: f64) -> Result<LinearSystem> {
    let n = sys.dim();
    let ss = sys.steady_state();
    if ss.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "steady state has {} entries for {} variables",
            ss.len(),
            n
        )));
    }
    let r0 = sys.residuals(&ss, &ss, &ss, 0.0);
    if r0.len() != n {
        return Err(Error::DimensionMismatch(format!("{} equations for {} variables", r0.len(), n)));
    }
    let worst = r0.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !(worst < 1e-8) {
        return Err(Error::MarketClearing {
            market: "dynamic system at the steady state",
            residual: worst,
        });
    }
    let mut mats = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
    for (slot, mat) in mats.iter_mut().enumerate() {
        for j in 0..n {
            let h = rel_step * ss[j].abs().max(1.0);
            let mut up = [ss.clone(), ss.clone(), ss.clone()];
            let mut dn = [ss.clone(), ss.clone(), ss.clone()];
            up[slot][j] += h;
            dn[slot][j] -= h;
            let ru = sys.residuals(&up[0], &up[1], &up[2], 0.0);
            let rd = sys.residuals(&dn[0], &dn[1], &dn[2], 0.0);
            for i in 0..n {
                let d = (ru[i] - rd[i]) / (2.0 * h);
                if !d.is_finite() {
                    return Err(Error::NonFiniteDerivative { row: i, col: j });
                }
                mat[(i, j)] = d;
            }
        }
    }
    let h = rel_step;
    let ru = sys.residuals(&ss, &ss, &ss, h);
    let rd = sys.residuals(&ss, &ss, &ss, -h);
    let mut shock = DVector::zeros(n);
    for i in 0..n {
        let d = (ru[i] - rd[i]) / (2.0 * h);
        if !d.is_finite() {
            return Err(Error::NonFiniteDerivative { row: i, col: n });
        }
        shock[i] = d;
    }
    let [lag, current, lead] = mats;
    Ok(LinearSystem {
        lead,
        current,
        lag,
        shock,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QmeMethod {
    /// Cyclic reduction (quadratically convergent).
    #[default]
    CyclicReduction,
    /// Fixed-point iteration `P <- -(A P + B)^{-1} C` from `P = 0`.
    TimeIteration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: QmeMethod,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: QmeMethod::CyclicReduction,
            tolerance: 1e-12,
            max_iterations: 200_000,
        }
    }
}

/// `x_t = P x_{t-1} + Q eps_t` with `eps_t = rho eps_{t-1} + eta_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub transition: DMatrix<f64>,
    pub impact: DVector<f64>,
    pub shock_persistence: f64,
    pub diagnostics: RootDiagnostics,
    /// Max-abs residual of `A P^2 + B P + C`, relative to the coefficient scale.
    pub residual: f64,
    pub iterations: usize,
}

impl LinearSolution {
    pub fn is_determinate(&self) -> bool {
        self.diagnostics.unstable_backward == 0 && self.diagnostics.unstable_forward == 0
    }

    pub fn spectral_radius(&self) -> f64 {
        self.diagnostics.transition_radius
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

fn singular(what: &str) -> Error {
    Error::Singular(what.to_string())
}

/// Moduli of the eigenvalues of a square matrix.
pub fn eigen_moduli(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let schur = Schur::try_new(m.clone(), 1e-14, 10_000).ok_or(Error::NonConvergence {
        what: "Schur decomposition",
        iterations: 10_000,
        residual: f64::NAN,
    })?;
    Ok(schur.complex_eigenvalues().iter().map(|z| z.norm()).collect())
}

/// Spectral radius and the number of eigenvalues with modulus at least `1 - 1e-9`.
pub fn stability(m: &DMatrix<f64>) -> Result<(f64, usize)> {
    let moduli = eigen_moduli(m)?;
    let radius = moduli.iter().fold(0.0f64, |a, b| a.max(*b));
    let unstable = moduli.iter().filter(|&&r| r >= 1.0 - 1e-9).count();
    Ok((radius, unstable))
}

fn time_iteration(sys: &LinearSystem, opts: &SolverOptions) -> Result<(DMatrix<f64>, usize)> {
    let n = sys.dim();
    let mut p = DMatrix::zeros(n, n);
    let mut delta = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let lhs = &sys.lead * &p + &sys.current;
        let next = -lhs
            .lu()
            .solve(&sys.lag)
            .ok_or_else(|| singular("A P + B singular in time iteration"))?;
        delta = max_abs(&(&next - &p));
        p = next;
        if !delta.is_finite() {
            break;
        }
        if delta < opts.tolerance {
            return Ok((p, it));
        }
    }
    Err(Error::NonConvergence {
        what: "time iteration",
        iterations: opts.max_iterations,
        residual: delta,
    })
}

fn cyclic_reduction(sys: &LinearSystem, opts: &SolverOptions) -> Result<(DMatrix<f64>, usize)> {
    let mut a0 = sys.lag.clone();
    let mut a1 = sys.current.clone();
    let mut a2 = sys.lead.clone();
    let mut a1_hat = sys.current.clone();
    let scale = max_abs(&sys.lag).max(max_abs(&sys.current)).max(max_abs(&sys.lead));
    let cap = opts.max_iterations.min(100);
    for it in 1..=cap {
        let lu = a1.clone().lu();
        let x0 = lu.solve(&a0).ok_or_else(|| singular("cyclic reduction pivot singular"))?;
        let x2 = lu.solve(&a2).ok_or_else(|| singular("cyclic reduction pivot singular"))?;
        let a0x2 = &a0 * &x2;
        let a2x0 = &a2 * &x0;
        a1 -= &a0x2 + &a2x0;
        a1_hat -= &a2x0;
        a0 = -(&a0 * &x0);
        a2 = -(&a2 * &x2);
        let crit = max_abs(&a0);
        if !crit.is_finite() {
            break;
        }
        if crit < opts.tolerance * scale {
            let p = -a1_hat
                .lu()
                .solve(&sys.lag)
                .ok_or_else(|| singular("cyclic reduction final solve"))?;
            return Ok((p, it));
        }
    }
    Err(Error::NonConvergence {
        what: "cyclic reduction",
        iterations: cap,
        residual: max_abs(&a0),
    })
}

/// Stable solvent of `A P^2 + B P + C = 0` and the shock loading
/// `Q = -(A P + B + rho A)^{-1} D`. Fails with [`Error::Indeterminate`]
/// unless both `P` and the forward matrix `F = -(A P + B)^{-1} A` have all
/// eigenvalues strictly inside the unit circle.
pub fn solve_linear_re(sys: &LinearSystem, rho: f64, opts: &SolverOptions) -> Result<LinearSolution> {
    let n = sys.dim();
    if sys.lead.shape() != (n, n) || sys.lag.shape() != (n, n) || sys.shock.len() != n {
        return Err(Error::DimensionMismatch("linear system blocks".into()));
    }
    let solved = match opts.method {
        QmeMethod::CyclicReduction => cyclic_reduction(sys, opts).or_else(|_| time_iteration(sys, opts)),
        QmeMethod::TimeIteration => time_iteration(sys, opts),
    };
    let (p, iterations) = match solved {
        Ok(v) => v,
        Err(Error::NonConvergence { .. }) => {
            // no bounded solvent: report as a root-counting failure
            return Err(Error::Indeterminate(RootDiagnostics {
                transition_radius: f64::INFINITY,
                forward_radius: f64::NAN,
                unstable_backward: n,
                unstable_forward: 0,
            }));
        }
        Err(e) => return Err(e),
    };
    let ap_b = &sys.lead * &p + &sys.current;
    let resid_m = &ap_b * &p + &sys.lag;
    let scale = max_abs(&sys.lag).max(max_abs(&sys.current)).max(max_abs(&sys.lead));
    let residual = max_abs(&resid_m) / scale.max(1.0);
    let forward = -ap_b
        .clone()
        .lu()
        .solve(&sys.lead)
        .ok_or_else(|| singular("A P + B singular"))?;
    let (transition_radius, unstable_backward) = stability(&p)?;
    let (forward_radius, unstable_forward) = stability(&forward)?;
    let diagnostics = RootDiagnostics {
        transition_radius,
        forward_radius,
        unstable_backward,
        unstable_forward,
    };
    if unstable_backward > 0 || unstable_forward > 0 || !(residual < 1e-9) {
        return Err(Error::Indeterminate(diagnostics));
    }
    let q_lhs = &ap_b + &sys.lead * rho;
    let impact = -q_lhs
        .lu()
        .solve(&sys.shock)
        .ok_or_else(|| singular("shock loading system singular"))?;
    Ok(LinearSolution {
        transition: p,
        impact,
        shock_persistence: rho,
        diagnostics,
        residual,
        iterations,
    })
}

/// State paths `x_0..x_{len-1}` after a unit innovation at `t = 0`.
pub fn simulate(sol: &LinearSolution, len: usize, innovation: f64) -> Vec<DVector<f64>> {
    let n = sol.impact.len();
    let mut out = Vec::with_capacity(len);
    let mut x = DVector::zeros(n);
    let mut eps = innovation;
    for _ in 0..len {
        x = &sol.transition * &x + &sol.impact * eps;
        out.push(x.clone());
        eps *= sol.shock_persistence;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(a: f64, c: f64) -> LinearSystem {
        LinearSystem {
            lead: DMatrix::from_element(1, 1, a),
            current: DMatrix::from_element(1, 1, -1.0),
            lag: DMatrix::from_element(1, 1, c),
            shock: DVector::from_element(1, 1.0),
        }
    }

    #[test]
    fn scalar_quadratic_root() {
        let expected = (1.0 - (1.0f64 - 4.0 * 0.5 * 0.2).sqrt()) / (2.0 * 0.5);
        for method in [QmeMethod::CyclicReduction, QmeMethod::TimeIteration] {
            let opts = SolverOptions {
                method,
                ..Default::default()
            };
            let sol = solve_linear_re(&scalar(0.5, 0.2), 0.0, &opts).unwrap();
            assert_relative_eq!(sol.transition[(0, 0)], expected, epsilon = 1e-12);
            assert_relative_eq!(expected, 0.225_403_330_758_516_6, epsilon = 1e-12);
        }
    }

    #[test]
    fn explosive_forward_root_is_indeterminate() {
        // x_t = 0.5 E x_{t+1}: forward root 2 lies outside, fine; x_t = 2 E x_{t+1}
        // has a stable forward root and hence a continuum of bounded solutions
        let sys = LinearSystem {
            lead: DMatrix::from_element(1, 1, 2.0),
            current: DMatrix::from_element(1, 1, -1.0),
            lag: DMatrix::zeros(1, 1),
            shock: DVector::from_element(1, 1.0),
        };
        assert!(matches!(
            solve_linear_re(&sys, 0.5, &SolverOptions::default()),
            Err(Error::Indeterminate(_))
        ));
    }

    #[test]
    fn purely_forward_solution_loads_shock() {
        // x_t = 0.5 E x_{t+1} + eps_t  =>  x_t = eps_t / (1 - 0.5 rho)
        let sys = LinearSystem {
            lead: DMatrix::from_element(1, 1, 0.5),
            current: DMatrix::from_element(1, 1, -1.0),
            lag: DMatrix::zeros(1, 1),
            shock: DVector::from_element(1, 1.0),
        };
        let sol = solve_linear_re(&sys, 0.5, &SolverOptions::default()).unwrap();
        assert_relative_eq!(sol.impact[0], 1.0 / 0.75, epsilon = 1e-12);
        let path = simulate(&sol, 3, 1.0);
        assert_relative_eq!(path[2][0], 0.25 / 0.75, epsilon = 1e-12);
    }
}
