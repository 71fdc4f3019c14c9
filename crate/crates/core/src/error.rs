use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum LieError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Jacobi identity violated at triple ({i},{j},{k}): residual {residual}")]
    JacobiViolation {
        i: usize,
        j: usize,
        k: usize,
        residual: String,
    },

    #[error(
        "ad(v{generator}) has non-integer spectrum; characteristic polynomial factor \
         without integer roots: {factor}"
    )]
    NonIntegerSpectrum { generator: usize, factor: String },

    #[error("degenerate pair: w1 and w2 are linearly dependent")]
    DegeneratePair,

    #[error("unbound variable eps{0} in assignment")]
    UnboundVariable(usize),

    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),

    #[error("unknown fixture '{0}'")]
    UnknownFixture(String),

    #[error("constraint '{name}' unsatisfiable after {retries} retries")]
    ConstraintUnsatisfiable { name: String, retries: usize },

    #[error("modes inconsistent: lambda=0 pairs cannot be queried against lambda!=0 pairs")]
    ModeMismatch,

    #[error("pair does not satisfy [w1,w2] = lambda*w1: {0}")]
    NotNormalizerForm(String),

    #[error("denominator vanishes on the target set: {0}")]
    PoleEncountered(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("grid touches the singular locus of the solution at {0}")]
    SingularGridPoint(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, LieError>;
