use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid digit {digit} at position {position} (radix {radix})")]
    InvalidDigit { digit: u8, position: usize, radix: u8 },

    #[error("order N={0} is outside the supported range")]
    InvalidOrder(usize),

    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("multiset label counts sum to {sum}, expected {order}")]
    LabelOrderMismatch { sum: usize, order: usize },

    #[error("matrix with {entries} entries exceeds the budget of {budget}")]
    SizeExceeded { entries: u128, budget: usize },

    #[error("vector length {0} is not a power of three")]
    LengthNotPowerOfThree(usize),

    #[error("vector length {actual} does not match expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("entry {index} has imaginary part {imag:e}")]
    NonRealInput { index: usize, imag: f64 },

    #[error("entry {index} deviates from its orbit representative by {deviation:e}")]
    NotOrbitConstant { index: usize, deviation: f64 },

    #[error("alpha={alpha} lies outside the admissible interval [{lo}, {hi}) for N={order}")]
    AlphaOutOfInterval {
        alpha: f64,
        order: usize,
        lo: f64,
        hi: f64,
    },

    #[error(
        "feasibility at alpha={alpha}, N={order} is numerically indeterminate \
         (phase-1 objective {objective:e}, best residual {residual:e}, best margin {margin:e})"
    )]
    NumericalIndeterminate {
        alpha: f64,
        order: usize,
        objective: f64,
        residual: f64,
        margin: f64,
    },

    #[error("feasibility predicate is not monotone: {0}")]
    NonMonotonePredicate(String),

    #[error("the span of the input set is {{0}}")]
    AllZero,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("linear program solver failure: {0}")]
    Solver(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
