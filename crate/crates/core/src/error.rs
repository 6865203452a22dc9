use thiserror::Error;

/// Errors raised by the algebra, module, form and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid algebra shape: {0}")]
    InvalidShape(String),

    #[error("element is not Hermitian (defect {defect:.3e}, tolerance {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("element is not positive (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("block {block} is singular")]
    Singular { block: usize },

    #[error("element is zero to within tolerance")]
    ZeroElement,

    #[error("functional failed the A-linearity probe (defect {defect:.3e})")]
    NotLinear { defect: f64 },

    #[error("generators are not full: {missing} dimensions of the algebra are missed")]
    NotFull { missing: usize },

    #[error("form is not A-sesquilinear: {0}")]
    NotSesquilinear(String),

    #[error("operator is not positive (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveOperator { min_eigenvalue: f64 },

    #[error("no witness found within budget (best ratio {best_ratio:.3e})")]
    NoWitnessFound { best_ratio: f64 },

    #[error("operator is singular on the flattened space; the certificate is invalid")]
    SingularOperator,

    #[error("residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("submodule family is not nested at level {level}")]
    NotNested { level: usize },

    #[error("restricted problem at level {level} failed certification: {reason}")]
    LevelCertificateFailed { level: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
