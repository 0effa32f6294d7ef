use husimi_grid::GridError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManyBodyError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("orbitals are not orthonormal: max Gram defect {0:e}")]
    NotOrthonormal(f64),
    #[error("expected {expected} orbitals of length {len}, got {got}")]
    Orbitals {
        expected: usize,
        len: usize,
        got: String,
    },
    #[error("non-finite amplitude after step {0}")]
    NonFinite(usize),
    #[error(
        "dense two-body kernel refused for d*N = {dn} > 2: would need {entries} complex entries ({bytes} bytes)"
    )]
    DenseRefused {
        dn: usize,
        entries: u128,
        bytes: u128,
    },
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
