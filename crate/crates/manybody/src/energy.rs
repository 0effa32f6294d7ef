use husimi_grid::{Potential, Spectral1d};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{pair_potential_diagonal, ManyBodyState};

/// `<psi, sum_j -hbar^2/2 Delta_j psi>`, evaluated spectrally.
pub fn kinetic_energy(state: &ManyBodyState) -> f64 {
    let g = &state.grid;
    let m = g.m;
    let n = g.n;
    let k2: Vec<f64> = Spectral1d::new(g)
        .wavenumbers()
        .iter()
        .map(|k| k * k)
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut total = 0.0;
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        for outer in 0..state.amps.len() / (m * stride) {
            for inner in 0..stride {
                let base = outer * m * stride + inner;
                for (j, z) in line.iter_mut().enumerate() {
                    *z = state.amps[base + j * stride];
                }
                fft.process(&mut line);
                total += line
                    .iter()
                    .zip(&k2)
                    .map(|(z, k)| z.norm_sqr() * k)
                    .sum::<f64>();
            }
        }
    }
    // Parseval on each line contributes 1/M.
    0.5 * g.hbar * g.hbar * total / m as f64 * g.dx.powi(n as i32)
}

/// `<psi, H psi>` with the `1/(2N)` pair prefactor.
pub fn energy(state: &ManyBodyState, v: &Potential) -> f64 {
    let w = pair_potential_diagonal(&state.grid, v);
    let pot: f64 = state
        .amps
        .iter()
        .zip(&w)
        .map(|(a, w)| a.norm_sqr() * w)
        .sum::<f64>()
        * state.grid.dx.powi(state.n() as i32);
    kinetic_energy(state) + pot
}

/// Kinetic energy per particle along a trajectory and the smallest `C` with
/// `k(t) <= k(t_0) + C (t - t_0)^2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KineticReport {
    pub times: Vec<f64>,
    pub kinetic_per_particle: Vec<f64>,
    pub c_fit: f64,
    pub finite: bool,
}

pub fn kinetic_bound_check(trajectory: &[ManyBodyState]) -> KineticReport {
    let times: Vec<f64> = trajectory.iter().map(|s| s.time).collect();
    let k: Vec<f64> = trajectory
        .iter()
        .map(|s| kinetic_energy(s) / s.n() as f64)
        .collect();
    let mut c = 0.0f64;
    if let (Some(&t0), Some(&k0)) = (times.first(), k.first()) {
        for (t, kt) in times.iter().zip(&k).skip(1) {
            let dt = t - t0;
            if dt > 0.0 {
                c = c.max((kt - k0) / (dt * dt));
            }
        }
    }
    let finite = c.is_finite() && k.iter().all(|x| x.is_finite());
    KineticReport {
        times,
        kinetic_per_particle: k,
        c_fit: c,
        finite,
    }
}
