use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix is rank deficient at column {column}")]
    Singular { column: usize },
    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("eigenvalue pairing failed after {attempts} attempts")]
    Degeneracy { attempts: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sampler path `{path}` is not available for {context}")]
    Path { path: String, context: String },
    #[error("mode error: {0}")]
    Mode(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("element is not in the torus: {0}")]
    Chamber(String),
    #[error("involutions do not commute (residual {0:.3e})")]
    Involution(f64),
    #[error("root identification failed: {0}")]
    Identification(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("quadrature did not converge (grid doubling changed the CDF by {0:.3e})")]
    Convergence(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
