use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("coefficient profile leaves [{m}, {big_m}] at x = {x} (value {value})")]
    BoundViolation {
        x: f64,
        value: f64,
        m: f64,
        big_m: f64,
    },

    #[error("coefficient field invalid: {0}")]
    InvalidCoefficient(String),

    #[error("y-quadrature with {n_quad} nodes aliases {n_max} modes (need at least {required})")]
    Aliasing {
        n_quad: usize,
        n_max: usize,
        required: usize,
    },

    #[error("singular tridiagonal system at row {row}")]
    SingularSystem { row: usize },

    #[error("eigen-solver did not converge for pair {index}: residual {residual:e}")]
    NonConvergence { index: usize, residual: f64 },

    #[error("spectral tail {tail:e} exceeds relative tolerance {tolerance:e} (mode {mode})")]
    InsufficientSpectralResolution {
        mode: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("ground state of mode {n} under-resolved: h * mu^(1/(2(1+gamma))) = {value} > 0.1")]
    UnderResolved { n: usize, value: f64 },

    #[error("trajectory norm underflow; use a shorter horizon")]
    NormUnderflow,

    #[error("denominator floor violated at {} node(s), first at x = {first_x}", nodes.len())]
    DenominatorFloor { nodes: Vec<usize>, first_x: f64 },

    #[error("operation requires a backward Euler trajectory")]
    SchemeNotPositive,

    #[error("vanishing right-hand side with nonzero coefficient difference (lhs = {lhs:e})")]
    StabilityViolationCandidate { lhs: f64 },

    #[error("initial datum is not in the admissible class: {0}")]
    NotInClass(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(LabError::ShapeMismatch { expected, got })
    }
}
