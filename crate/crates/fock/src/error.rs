use thiserror::Error;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("mode count {0} outside 1..={max}", max = crate::MAX_MODES)]
    TooManyModes(usize),
    #[error("mode {mode} out of range for {modes} modes")]
    BadMode { mode: usize, modes: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("family is not orthonormal: max Gram defect {0:e}")]
    NotOrthonormal(f64),
    #[error("family has {n} vectors but only {modes} modes")]
    FamilyTooLarge { n: usize, modes: usize },
    #[error("dense unitary on {0} modes exceeds the dense cap of {max} modes", max = crate::MAX_DENSE_MODES)]
    DenseTooLarge(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
