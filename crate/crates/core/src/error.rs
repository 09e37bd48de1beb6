use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QfError {
    #[error("invalid group parameters: {0}")]
    InvalidGroup(String),

    #[error("unknown group spec `{0}`")]
    UnknownGroupSpec(String),

    #[error("unsupported group family for this operation: {0}")]
    Unsupported(String),

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("representation is not quasi-flat: {0}")]
    NotQuasiFlat(String),

    #[error("generator order mismatch: expected K = {expected}, got {got}")]
    GenOrderMismatch { expected: usize, got: usize },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("character does not extend: {0}")]
    NotExtendable(String),

    #[error("group is not metabelian with quotient Z_K^2: {0}")]
    NotMetabelian(String),

    #[error("composite K = {0}; a prime is required")]
    CompositeK(usize),

    #[error("vector norm {norm} is neither 0 nor 1")]
    BadNorm { norm: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("size guard exceeded: {0}")]
    TooLarge(String),

    #[error("component set is not closed under Galois conjugation")]
    NotGaloisClosed,

    #[error("weights do not match components: {0}")]
    WeightMismatch(String),

    #[error("degenerate angle theta = {0}")]
    DegenerateTheta(f64),

    #[error("fiber construction failed: {0}")]
    FiberFailure(String),

    #[error("no cocycle satisfies the O_2^-1 relations")]
    NoCocycle,

    #[error("quadrature grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, QfError>;
