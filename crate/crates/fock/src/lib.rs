//! Exact fermionic Fock space on a handful of modes.
//!
//! Basis vectors are occupation bitmasks with mode 0 as the least significant
//! bit. Creation and annihilation carry the Jordan-Wigner sign
//! `(-1)^(number of occupied modes below the target)`, so that
//! `a*_{i1} ... a*_{ik} Omega = +|{i1 < ... < ik}>`.

mod bogoliubov;
mod checks;
mod error;
mod operator;
pub mod random;
mod state;

pub use bogoliubov::{
    bogoliubov_conjugate, gamma1, gamma2_entry, pair_diagonal, BogoliubovMap, ConjugatedMode,
    DenseUnitary,
};
pub use checks::{
    one_body_inequalities, wick_gap_bound_check, BatchReport, InequalityCheck, WickGap,
};
pub use error::FockError;
pub use operator::{d_gamma, hamiltonian_apply, pair_annihilate, pair_create, OneBodyOperator};
pub use state::{annihilate, create, number_operator, FockState};

pub use nalgebra::DMatrix;
pub use num_complex::Complex64;

/// Largest supported mode count.
pub const MAX_MODES: usize = 14;
/// Largest mode count for which a dense `2^M x 2^M` unitary is materialized.
pub const MAX_DENSE_MODES: usize = 10;

pub type CMatrix = DMatrix<Complex64>;

/// `(-1)^(popcount of mask below mode)`.
#[inline]
pub(crate) fn jw_sign(mask: usize, mode: usize) -> f64 {
    if (mask & ((1usize << mode) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
