use thiserror::Error;

use crate::mps::MpsError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("point is not feasible (equality residual {eq_residual:.3e}, worst slack {min_slack:.3e})")]
    InfeasiblePoint { eq_residual: f64, min_slack: f64 },
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded { ray: Vec<f64> },
    #[error("objective decreases along a lineality direction")]
    OriginalUnboundedInLineality { ray: Vec<f64> },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("oracle refused: {0}")]
    OracleLimit(String),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, found })
    }
}
