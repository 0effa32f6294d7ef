//! Effective dynamics: time-dependent Hartree-Fock for the orbitals of
//! `omega` and the Vlasov equation for a phase-space density.
//!
//! Both use `H = -hbar^2/2 Delta + (1/N) sum_{i<j} V`, matching the N-body
//! propagator, so the Vlasov characteristics are `q' = p`, `p' = -d/dq (V * rho)`.

mod distance;
mod error;
mod hartree_fock;
mod vlasov;

pub use distance::{distance_of_masses, husimi_vlasov_distance, DistanceReport};
pub use error::MeanFieldError;
pub use hartree_fock::{
    hartree_fock_step, mean_field_matrix, norm_gaps, HartreeFock, MeanFieldState,
    ORTHONORMALITY_ABORT,
};
pub use vlasov::{vlasov_step, Vlasov, VlasovState};
