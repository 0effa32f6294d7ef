use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("M not power of two: M = {0}")]
    NotPowerOfTwo(usize),
    #[error("box length must be positive, got L = {0}")]
    BadLength(f64),
    #[error("hbar must be positive, got {0}")]
    BadHbar(f64),
    #[error("dimension d must be at least 1")]
    BadDimension,
    #[error("particle count N must be at least 1")]
    BadParticles,
    #[error(
        "memory budget exceeded: M^(d*N) = {m}^({d}*{n}) = 2^{log2:.1} amplitudes, budget is {budget}"
    )]
    Budget {
        m: usize,
        d: usize,
        n: usize,
        log2: f64,
        budget: u128,
    },
    #[error("potential is not even: max |V(x) - V(-x)| = {0:e}")]
    NotEven(f64),
    #[error("only d = 1 is tabulated here, got d = {0}")]
    Unsupported(usize),
    #[error("test function support [{lo}, {hi}] crosses the periodic boundary at +-{half}")]
    SupportCrossesBoundary { lo: f64, hi: f64, half: f64 },
    #[error("invalid test function: {0}")]
    BadTestFunction(String),
    #[error("fit: {0}")]
    Fit(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
