use husimi_fock::FockError;
use husimi_grid::GridError;
use husimi_manybody::ManyBodyError;
use husimi_phasespace::PhaseSpaceError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResidueError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    ManyBody(#[from] ManyBodyError),
    #[error(transparent)]
    PhaseSpace(#[from] PhaseSpaceError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("lattice: {0}")]
    Lattice(String),
    #[error("need three snapshots, got {0}")]
    Snapshots(usize),
    #[error("snapshot spacing is not uniform: {first} vs {second}")]
    NonUniform { first: f64, second: f64 },
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("sweep needs at least {need} points, got {got}")]
    SweepTooShort { need: usize, got: usize },
}
