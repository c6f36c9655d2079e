use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// SU(n) needs at least two levels.
    #[error("degenerate algebra: n = {n} (need n >= 2)")]
    DegenerateAlgebra { n: usize },

    #[error("basis fails trace orthogonality at (λ{i}, λ{j}): |Tr(λiλj) - 2δij| = {residual:e}")]
    TraceOrthogonality { i: usize, j: usize, residual: f64 },

    #[error("matrix is not Hermitian: max |H - H†| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix is not antisymmetric: max |M + Mᵀ| = {asymmetry:e} exceeds {tolerance:e}")]
    NotAntisymmetric { asymmetry: f64, tolerance: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: String,
        found: String,
    },

    #[error("expected a square matrix, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator forms belong to different algebras (n = {left} vs n = {right})")]
    ContextMismatch { left: usize, right: usize },

    #[error("synthesized block {block} has imaginary residue {residue:e}")]
    ImaginaryResidue { block: String, residue: f64 },

    #[error("system is not physically realizable: condition {condition} residual {residual:e} exceeds {tolerance:e} (run the realizability check for details)")]
    NotRealizable {
        condition: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("Hamiltonian recovery routes disagree by {discrepancy:e}")]
    InconsistentRecovery { discrepancy: f64 },

    #[error("invalid integration parameter: {0}")]
    InvalidIntegration(String),

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn dims(
        what: impl Into<String>,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
