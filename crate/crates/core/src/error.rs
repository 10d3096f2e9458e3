use thiserror::Error;

/// Eigenvalue diagnostics attached to a failed determinacy check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootDiagnostics {
    /// Spectral radius of the backward-looking transition matrix.
    pub transition_radius: f64,
    /// Spectral radius of the forward (companion-complement) matrix.
    pub forward_radius: f64,
    /// Eigenvalues of the transition matrix on or outside the unit circle.
    pub unstable_backward: usize,
    /// Eigenvalues of the forward matrix on or outside the unit circle.
    pub unstable_forward: usize,
}

impl std::fmt::Display for RootDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rho(P)={:.6} ({} roots >= 1), rho(F)={:.6} ({} roots >= 1)",
            self.transition_radius,
            self.unstable_backward,
            self.forward_radius,
            self.unstable_forward
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate prices: {0}")]
    DegeneratePrices(String),

    #[error("firm measure diverges: {0}")]
    Divergence(String),

    #[error("market clearing residual {residual:.3e} exceeds tolerance ({market})")]
    MarketClearing { market: &'static str, residual: f64 },

    #[error("calibration targets infeasible: {0}")]
    Infeasible(String),

    #[error("no unique stable solution: {0}")]
    Indeterminate(RootDiagnostics),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite derivative of equation {row} with respect to variable {col}")]
    NonFiniteDerivative { row: usize, col: usize },

    #[error("horizon too short: {0}")]
    HorizonTooShort(String),

    #[error("conflicting variant flags: {0}")]
    ConflictingVariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable category, printed by the command-line tool.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::NonConvergence { .. } => "non_convergence",
            Error::DegeneratePrices(_) => "degenerate_prices",
            Error::Divergence(_) => "divergence",
            Error::MarketClearing { .. } => "market_clearing",
            Error::Infeasible(_) => "infeasible",
            Error::Indeterminate(_) => "indeterminate",
            Error::Singular(_) => "singular_matrix",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NonFiniteDerivative { .. } => "non_finite_derivative",
            Error::HorizonTooShort(_) => "horizon_too_short",
            Error::ConflictingVariant(_) => "conflicting_variant",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code: 2 for configuration problems, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidParameter { .. }
            | Error::ConflictingVariant(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
