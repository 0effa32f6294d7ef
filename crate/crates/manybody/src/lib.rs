//! N-body fermionic wavefunctions on a periodic one-dimensional grid.
//!
//! Amplitudes are stored row-major over `(x_1, ..., x_N)` and normalized so
//! that `sum |psi|^2 dx^N = 1`. Reduced density matrices carry the
//! `N!/(N-k)!` normalization, so `Tr gamma1 = N`.

mod density;
mod energy;
mod error;
pub mod orbitals;
mod propagate;
pub mod snapshot;
mod state;

pub use density::{
    gamma1, gamma2_contract, gamma2_dense, gamma2_entry, pair_diagonal, OneBodyKernel, PairDiagonal,
};
pub use energy::{energy, kinetic_bound_check, kinetic_energy, KineticReport};
pub use error::ManyBodyError;
pub use propagate::{pair_potential_diagonal, propagate, Propagator};
pub use state::{build_slater, gram_defect, ManyBodyState};

pub use num_complex::Complex64;

/// Permutations of `0..n` with their signs, in a fixed order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}
