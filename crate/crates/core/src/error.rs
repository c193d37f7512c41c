use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("tensor product of dimension {0} exceeds the supported maximum of {max}", max = crate::TOL.max_dim)]
    DimensionOverflow(usize),
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid density operator: {0}")]
    InvalidDensity(String),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("invalid slot index {index} for {slots} slots")]
    InvalidSlot { index: usize, slots: usize },
    #[error("invalid temporal label: {0}")]
    InvalidLabel(String),
    #[error("no slot at location {0}")]
    UnknownLocation(u8),
    #[error("measurement basis is not a complete set of orthogonal projectors: {0}")]
    IncompleteBasis(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no admissible fixed point: {0}")]
    NoAdmissibleFixedPoint(String),
    #[error("fixed point is not unique at epsilon = {epsilon:e} (family dimension {nullspace_dim})")]
    NonUniqueUnderPerturbation { epsilon: f64, nullspace_dim: usize },
    #[error("CTC iteration did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}
