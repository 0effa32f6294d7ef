//! Periodic grids shared by every other crate in the lab.
//!
//! Positions live on the box `[-L/2, L/2)` with `x_j = -L/2 + j dx`, and the
//! momentum lattice is `p_k = 2 pi hbar k / L` in FFT order, so that the plane
//! waves `exp(i p_k x / hbar)` are exactly periodic.

mod config;
mod error;
mod fit;
mod jet;
mod potential;
mod spec;
mod spectral;
mod testfn;

pub use config::GridConfig;
pub use error::GridError;
pub use fit::loglog_fit;
pub use jet::Jet;
pub use potential::{Potential, PotentialKind};
pub use spec::{budget_from_env, make_grid, GridSpec, BUDGET_ENV, DEFAULT_BUDGET};
pub use spectral::Spectral1d;
pub use testfn::{bump_derivative, bump_test_function, TestFunction};

pub use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on `[0, 1]`, eight points.
pub fn gauss_legendre8() -> [(f64, f64); 8] {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let mut out = [(0.0, 0.0); 8];
    for i in 0..4 {
        out[2 * i] = (0.5 * (1.0 - X[i]), 0.5 * W[i]);
        out[2 * i + 1] = (0.5 * (1.0 + X[i]), 0.5 * W[i]);
    }
    out
}
