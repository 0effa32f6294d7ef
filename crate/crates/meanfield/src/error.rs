use husimi_grid::GridError;
use husimi_manybody::ManyBodyError;
use husimi_phasespace::PhaseSpaceError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeanFieldError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    ManyBody(#[from] ManyBodyError),
    #[error(transparent)]
    PhaseSpace(#[from] PhaseSpaceError),
    #[error("orthonormality lost at t = {time}: Gram defect {defect:e}")]
    Orthonormality { time: f64, defect: f64 },
    #[error("CFL violated: dt = {dt} exceeds {limit:.3e} ({which}); try dt = {suggested:.3e}")]
    Cfl {
        dt: f64,
        limit: f64,
        which: &'static str,
        suggested: f64,
    },
    #[error("lattice: {0}")]
    Lattice(String),
    #[error("fields live on different lattices: {0}")]
    Mismatch(String),
}
