use thiserror::Error;

use crate::scheme::ValidationFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("element is not hyperbolic (|tr| = {trace})")]
    NotHyperbolic { trace: f64 },

    #[error("point is a pole of the map (cz + d = 0)")]
    PoleAtPoint,

    #[error("scheme validation failed: {0}")]
    Validation(ValidationFailure),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("disk-level contraction bound {theta} is not below 1")]
    NotContracting { theta: f64 },

    #[error("refinement would create {count} disks (cap {cap})")]
    RefinementOverflow { count: usize, cap: usize },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("branch pole lies in the closure of disk {disk}")]
    BranchPoleInDisk { disk: usize },

    #[error("contour quadrature not converged: entry change {change:e} under node doubling")]
    QuadratureNonConvergence { change: f64 },

    #[error("coset action is not transitive ({orbit} of {degree} cosets reachable)")]
    Intransitive { orbit: usize, degree: usize },

    #[error("coset action is not regular")]
    NonRegular,

    #[error("malformed coset action: {0}")]
    MalformedAction(String),

    #[error("generator {index} is not integral")]
    NotIntegral { index: usize },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("determinant vanishes on the contour near {re}+{im}i")]
    BoundaryZero { re: f64, im: f64 },

    #[error("phase tracking failed: {0}")]
    PhaseTracking(String),

    #[error("|Im s| = {im} is beyond the double-precision budget {budget}")]
    PrecisionWall { im: f64, budget: f64 },

    #[error("representation dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Bad input, as opposed to a computation that did not succeed.
    pub fn is_config_error(&self) -> bool {
        !matches!(
            self,
            Error::NonConvergence(_)
                | Error::QuadratureNonConvergence { .. }
                | Error::BudgetExceeded(_)
                | Error::BoundaryZero { .. }
                | Error::PhaseTracking(_)
                | Error::PrecisionWall { .. }
                | Error::PoleAtPoint
                | Error::BranchPoleInDisk { .. }
        )
    }
}
