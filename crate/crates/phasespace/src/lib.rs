//! Coherent-state frames and phase-space transforms on a periodic
//! one-dimensional grid.
//!
//! Husimi fields use the measure `dq dp / (2 pi hbar)`, under which the
//! one-particle field integrates to `N`.

mod error;
mod frame;
mod husimi;
mod lattice;
mod localized;
mod moments;
mod oscillation;
mod wigner;

pub use error::PhaseSpaceError;
pub use frame::{CoherentFrame, Window};
pub use husimi::{
    husimi1, husimi1_direct, husimi2_marginal_check, husimi2_value, Factorized, Husimi2Report,
    HusimiField,
};
pub use lattice::PhaseLattice;
pub use localized::{localized_number, localized_number_check, LocalizedNumber};
pub use moments::{moment_growth_check, moments, GrowthReport, Moments};
pub use oscillation::{
    oscillation_decay, oscillatory_integral, BumpProfile, KinkProfile, OscillationReport, Profile1D,
};
pub use wigner::{convolution_bridge_check, wigner1, BridgeReport, Refinement, WignerField};
