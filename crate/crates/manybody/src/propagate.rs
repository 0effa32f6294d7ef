use std::sync::Arc;

use husimi_grid::{GridSpec, Potential, Spectral1d};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{ManyBodyError, ManyBodyState};

/// `W(x_1..x_N) = (1/N) sum_{i<j} V(x_i - x_j)` on every grid tuple.
pub fn pair_potential_diagonal(grid: &GridSpec, v: &Potential) -> Vec<f64> {
    let n = grid.n;
    let m = grid.m;
    let total = m.pow(n as u32);
    let mut out = vec![0.0; total];
    if n < 2 || v.is_zero() {
        return out;
    }
    let mut xs = vec![0usize; n];
    for (idx, w) in out.iter_mut().enumerate() {
        let mut r = idx;
        for slot in (0..n).rev() {
            xs[slot] = r % m;
            r /= m;
        }
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += v.at_offset(xs[i], xs[j]);
            }
        }
        *w = s / n as f64;
    }
    out
}

/// Strang split-step propagator for a fixed grid, potential and step.
pub struct Propagator {
    grid: GridSpec,
    dt: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `exp(-i dt hbar kappa^2 / 2) / M` per axis.
    kinetic: Vec<Complex64>,
    /// `exp(-i dt W / (2 hbar))`.
    half_potential: Option<Vec<Complex64>>,
}

impl Propagator {
    pub fn new(grid: &GridSpec, v: &Potential, dt: f64) -> Result<Self, ManyBodyError> {
        grid.require_1d()?;
        let mut planner = FftPlanner::new();
        let sp = Spectral1d::new(grid);
        let kinetic = sp
            .wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0 / grid.m as f64, -dt * grid.hbar * k * k / 2.0))
            .collect();
        let half_potential = if v.is_zero() || grid.n < 2 {
            None
        } else {
            Some(
                pair_potential_diagonal(grid, v)
                    .into_iter()
                    .map(|w| Complex64::from_polar(1.0, -0.5 * dt * w / grid.hbar))
                    .collect(),
            )
        };
        Ok(Self {
            grid: grid.clone(),
            dt,
            fwd: planner.plan_fft_forward(grid.m),
            inv: planner.plan_fft_inverse(grid.m),
            kinetic,
            half_potential,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn potential_half(&self, amps: &mut [Complex64]) {
        if let Some(ph) = &self.half_potential {
            for (a, p) in amps.iter_mut().zip(ph) {
                *a *= p;
            }
        }
    }

    /// Exact free flow for one step, one axis at a time.
    fn kinetic_full(&self, amps: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let m = self.grid.m;
        let n = self.grid.n;
        for axis in 0..n {
            let stride = m.pow((n - 1 - axis) as u32);
            if stride == 1 {
                self.fwd.process(amps);
                for line in amps.chunks_exact_mut(m) {
                    for (a, k) in line.iter_mut().zip(&self.kinetic) {
                        *a *= k;
                    }
                }
                self.inv.process(amps);
                continue;
            }
            let block = m * stride;
            scratch.resize(block, Complex64::new(0.0, 0.0));
            for chunk in amps.chunks_exact_mut(block) {
                // Transpose the (m x stride) block so lines along this axis are contiguous.
                for j in 0..m {
                    for i in 0..stride {
                        scratch[i * m + j] = chunk[j * stride + i];
                    }
                }
                self.fwd.process(scratch);
                for line in scratch.chunks_exact_mut(m) {
                    for (a, k) in line.iter_mut().zip(&self.kinetic) {
                        *a *= k;
                    }
                }
                self.inv.process(scratch);
                for j in 0..m {
                    for i in 0..stride {
                        chunk[j * stride + i] = scratch[i * m + j];
                    }
                }
            }
        }
    }

    /// Advances `steps` Strang steps; consecutive potential half steps are fused.
    pub fn run(&self, state: &mut ManyBodyState, steps: usize) -> Result<(), ManyBodyError> {
        if steps == 0 {
            return Ok(());
        }
        let mut scratch = Vec::new();
        let start = state.time;
        self.potential_half(&mut state.amps);
        for s in 0..steps {
            self.kinetic_full(&mut state.amps, &mut scratch);
            self.potential_half(&mut state.amps);
            if s + 1 < steps {
                self.potential_half(&mut state.amps);
            }
            let probe: f64 = state.amps.iter().map(|a| a.re + a.im).sum();
            if !probe.is_finite() {
                return Err(ManyBodyError::NonFinite(s + 1));
            }
        }
        state.time = start + steps as f64 * self.dt;
        Ok(())
    }
}

/// Strang splitting: half potential, full kinetic, half potential.
pub fn propagate(
    state: &ManyBodyState,
    v: &Potential,
    dt: f64,
    steps: usize,
) -> Result<ManyBodyState, ManyBodyError> {
    let mut out = state.clone();
    if steps == 0 {
        return Ok(out);
    }
    Propagator::new(&state.grid, v, dt)?.run(&mut out, steps)?;
    Ok(out)
}
