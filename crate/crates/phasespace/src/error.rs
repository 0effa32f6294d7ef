use husimi_grid::GridError;
use husimi_manybody::ManyBodyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhaseSpaceError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    ManyBody(#[from] ManyBodyError),
    #[error("window: {0}")]
    Window(String),
    #[error("the convolution bridge needs the Gaussian window, got {0}")]
    NotGaussian(String),
    #[error("lattice: {0}")]
    Lattice(String),
    #[error("need at least 4 hbar samples, got {0}")]
    TooFewSamples(usize),
    #[error("kernel and frame disagree on the grid: {0}")]
    Mismatch(String),
}
