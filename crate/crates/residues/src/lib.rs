//! Residues of the Husimi reformulation of the N-body dynamics.
//!
//! With `m(q,p) = <g_{q,p}, gamma1 g_{q,p}>` the exact evolution reads
//!
//! `d_t m + p d_q m = d_p[(V' * rho) m] + d_q R_k + d_p R_s + d_p R_m`,
//!
//! where `rho = kappa int m dp` is the normalized density, `R_k` the kinetic
//! residue, `R_s` the semiclassical residue (segment average of `V'` against
//! its value at the coherent-state centre) and `R_m` the mean-field residue
//! (failure of `gamma2` to factorize). This crate evaluates every term, their
//! pairings with test functions, the consistency of the identity along
//! computed trajectories, and the mixed norm of the factorization defect.

mod consistency;
mod engine;
mod error;
mod mixed;
mod pairing;
mod sweep;

pub use consistency::{
    consistency_refinement, reformulation_consistency, ConsistencyReport, RefinementReport,
    TermPairings,
};
pub use engine::{residue_fields, Interaction, ResidueFields};
pub use error::ResidueError;
pub use mixed::{
    fock_path_mixed_norm, fock_path_scaling, mixed_norm, mixed_norm_fock, mixed_norm_of_state,
    MixedNormReport, MixedScaling,
};
pub use pairing::{
    kinetic_residue_pairing, meanfield_residue_pairing, residue_report,
    semiclassical_residue_pairing, state_fields, ResidueReport, S_QUADRATURE,
};
pub use sweep::{
    alpha_exponents, coupled_sweep, AlphaExponent, SlopeFit, SweepConfig, SweepPoint, SweepReport,
    ALPHA_GRID,
};
