use std::path::PathBuf;

use husimi_fock::FockError;
use husimi_grid::GridError;
use husimi_manybody::ManyBodyError;
use husimi_meanfield::MeanFieldError;
use husimi_phasespace::PhaseSpaceError;
use husimi_residues::ResidueError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    ManyBody(#[from] ManyBodyError),
    #[error(transparent)]
    PhaseSpace(#[from] PhaseSpaceError),
    #[error(transparent)]
    MeanField(#[from] MeanFieldError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("fit: {0}")]
    Fit(String),
    #[error("phase `{phase}` of run {dir}: {source}")]
    Phase {
        phase: &'static str,
        dir: PathBuf,
        #[source]
        source: Box<HarnessError>,
    },
}
