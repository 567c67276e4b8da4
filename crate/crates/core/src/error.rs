//! Crate-wide error type. Variants are grouped by how the CLI maps them to
//! exit codes: input/schema problems, validation failures, and solver failures.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    // --- input / schema ---
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownCatalog(String),

    // --- validation of mathematical preconditions ---
    #[error("bracket entry ({i},{j},{k}): {reason}")]
    BadBracket {
        i: usize,
        j: usize,
        k: usize,
        reason: String,
    },
    #[error("Jacobi identity violated: residual {residual:.3e} at (i,j,k,l) = ({},{},{},{})", worst.0, worst.1, worst.2, worst.3)]
    JacobiViolation {
        residual: f64,
        /// 1-based (i, j, k, l) of the largest residual component J^l_{ijk}.
        worst: (usize, usize, usize, usize),
    },
    #[error("basis change is singular (|det| = {det:.3e})")]
    SingularBasisChange { det: f64 },
    #[error("metric frame is singular or not positive definite")]
    BadMetric,
    #[error("algebra is not nilpotent (lower central series stalls at dimension {stalled_at})")]
    NotNilpotent { stalled_at: usize },
    #[error("matrix is not a derivation (Leibniz residual {residual:.3e})")]
    NotADerivation { residual: f64 },
    #[error("derivation must be symmetric (asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    // --- solver / search failures ---
    #[error("search budget exhausted: best value {best:.6e} after {iterations} iterations")]
    BudgetExhausted { best: f64, iterations: usize },
    #[error("flow step size underflowed below {0:.1e} while restoring positive definiteness")]
    StepUnderflow(f64),
    #[error("search failed: {0}")]
    SearchFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI uses for this error class:
    /// 1 = i/o or schema, 2 = validation, 3 = search/solver failure.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Io(_) | Schema(_) | UnknownCatalog(_) => 1,
            BadBracket { .. }
            | JacobiViolation { .. }
            | SingularBasisChange { .. }
            | BadMetric
            | NotNilpotent { .. }
            | NotADerivation { .. }
            | NotSymmetric { .. }
            | DimensionMismatch { .. } => 2,
            BudgetExhausted { .. } | StepUnderflow(_) | SearchFailed(_) => 3,
        }
    }
}
