use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("vector of length {len} cannot be reshaped into a {n}x{n} matrix")]
    NotPerfectSquare { len: usize, n: usize },

    #[error("spin index {index} out of range for a {n_spins}-spin system")]
    SpinIndex { index: usize, n_spins: usize },

    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("adaptive quadrature on [{a}, {b}] did not converge within depth {depth}")]
    QuadratureDepth { a: f64, b: f64, depth: usize },

    #[error("singular linear system (pivot {pivot:e} below threshold {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("Pade denominator is singular; increase the squaring count")]
    ScalingInsufficient,

    #[error("Taylor remainder bound undefined: {norm}/(K+2) = {epsilon} >= 1 for K = {order}")]
    InvalidTaylorOrder { norm: f64, order: usize, epsilon: f64 },

    #[error("m = {m} is below the Krylov bound regime (needs m >= {min:.6})")]
    KrylovRegime { m: usize, min: f64 },

    #[error("expectation value has imaginary part {imag:e}")]
    NonRealExpectation { imag: f64 },

    #[error("primitive does not match its integrand at t = {t}: derivative {derivative}, value {value}")]
    PrimitiveMismatch { t: f64, derivative: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step {step} at t = {t} failed: {source}")]
    StepFailed {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },
}
