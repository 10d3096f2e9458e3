//! Perturbation dynamics of the heterogeneous-firm economy.

pub mod irf;
pub mod linear;
pub mod system;

use nalgebra::DVector;

use crate::equilibrium::SteadyState;
use crate::error::{Error, Result};

pub use irf::{autocorrelation, DerivedMap, IrfSet, Normalization, Series, LONG_HORIZON};
pub use linear::{
    linearize, simulate, solve_linear_re, steady_state_residual, LinearSolution, LinearSystem, QmeMethod,
    ResidualSystem, SolverOptions,
};
pub use system::{Derived, HfSystem, Layout, DERIVED_LEN};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsOptions {
    /// Relative finite-difference step for the Jacobians.
    pub fd_step: f64,
    pub solver: SolverOptions,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self {
            fd_step: 1e-6,
            solver: SolverOptions::default(),
        }
    }
}

/// Linearized and solved heterogeneous-firm model.
#[derive(Debug, Clone)]
pub struct HfModel {
    pub steady: SteadyState,
    pub system: HfSystem,
    pub linear: LinearSystem,
    pub solution: LinearSolution,
    pub derived_map: DerivedMap,
}

impl HfModel {
    pub fn build(ss: &SteadyState, opts: &DynamicsOptions) -> Result<Self> {
        let system = HfSystem::new(ss)?;
        let linear = linearize(&system, opts.fd_step)?;
        let solution = solve_linear_re(&linear, ss.params.rho_m, &opts.solver)?;
        let x = system.steady_state();
        let derived_map = DerivedMap::from_fn(&x, DERIVED_LEN, opts.fd_step, |l, c, f| {
            system.derived(l, c, f).to_vec()
        })?;
        Ok(Self {
            steady: ss.clone(),
            system,
            linear,
            solution,
            derived_map,
        })
    }

    pub fn variant_label(&self) -> String {
        self.steady.params.variant.label()
    }

    /// State deviations after a unit innovation.
    pub fn unit_states(&self, len: usize) -> Vec<DVector<f64>> {
        simulate(&self.solution, len, 1.0)
    }

    pub fn irf(&self, horizon: usize, normalization: Normalization) -> Result<IrfSet> {
        let len = horizon.max(LONG_HORIZON) + 2;
        let states = self.unit_states(len);
        let derived = self.derived_map.apply(&states);
        let scale = match normalization {
            Normalization::RealRate(target) => {
                let r0 = derived[0][0];
                if !(r0.abs() > 1e-14) {
                    return Err(Error::DegeneratePrices("shock does not move the real rate".into()));
                }
                target / r0
            }
            Normalization::Innovation(e) => e,
        };
        let l = self.system.layout;
        let state_series = |idx: usize| -> Vec<f64> { states.iter().map(|x| 100.0 * scale * x[idx]).collect() };
        let derived_series =
            |idx: usize, unit: f64| -> Vec<f64> { derived.iter().map(|d| unit * scale * d[idx]).collect() };
        let long = vec![
            state_series(l.output()),
            state_series(l.consumption()),
            state_series(l.employment()),
            state_series(l.wage()),
            state_series(l.rel_price()),
            state_series(l.inflation()),
            state_series(l.nominal_rate()),
            derived_series(0, 100.0),
            derived_series(2, 1e4),
            derived_series(1, 1e4),
            derived_series(3, 100.0),
            derived_series(4, 100.0),
            derived_series(5, 100.0),
            derived_series(6, 100.0),
        ];
        let kept: Vec<Vec<f64>> = states
            .iter()
            .take(horizon + 1)
            .map(|x| x.iter().map(|v| v * scale).collect())
            .collect();
        IrfSet::from_long_paths(
            "hf",
            &self.variant_label(),
            normalization,
            scale,
            long,
            kept,
            horizon,
        )
    }
}
