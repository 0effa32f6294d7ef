use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use husimi_grid::{GridSpec, Potential, Spectral1d};
use husimi_manybody::snapshot::{self, Header, STATE_VERSION};
use husimi_manybody::{gram_defect, ManyBodyError, OneBodyKernel};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::MeanFieldError;

/// Defect above which a step aborts.
pub const ORTHONORMALITY_ABORT: f64 = 1e-6;

/// `omega = sum_j |e_j><e_j|` carried by its orbitals.
#[derive(Clone, Debug)]
pub struct MeanFieldState {
    pub grid: GridSpec,
    pub orbitals: Vec<Vec<Complex64>>,
    pub time: f64,
}

impl MeanFieldState {
    pub fn new(grid: &GridSpec, orbitals: Vec<Vec<Complex64>>) -> Result<Self, MeanFieldError> {
        grid.require_1d()?;
        if orbitals.iter().any(|e| e.len() != grid.m) {
            return Err(ManyBodyError::Orbitals {
                expected: orbitals.len(),
                len: grid.m,
                got: format!("{:?}", orbitals.iter().map(Vec::len).collect::<Vec<_>>()),
            }
            .into());
        }
        let defect = gram_defect(grid, &orbitals);
        if defect > 1e-8 {
            return Err(ManyBodyError::NotOrthonormal(defect).into());
        }
        Ok(Self {
            grid: grid.clone(),
            orbitals,
            time: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.orbitals.len()
    }

    pub fn omega(&self) -> OneBodyKernel {
        OneBodyKernel::from_orbitals(&self.grid, &self.orbitals)
    }

    /// `rho(x) = omega(x;x) / N`.
    pub fn density(&self) -> Vec<f64> {
        let n = self.n() as f64;
        (0..self.grid.m)
            .map(|x| self.orbitals.iter().map(|e| e[x].norm_sqr()).sum::<f64>() / n)
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.omega().trace().re
    }

    pub fn orthonormality_defect(&self) -> f64 {
        gram_defect(&self.grid, &self.orbitals)
    }

    /// Largest entry of `P^2 - P` for the operator `P = omega dx`.
    pub fn idempotency_defect(&self) -> f64 {
        let p = self.omega().operator();
        (&p * &p - &p).camax()
    }

    /// `sum_j <e_j, -hbar^2/2 Delta e_j>`.
    pub fn kinetic_energy(&self) -> f64 {
        let sp = Spectral1d::new(&self.grid);
        let h = self.grid.hbar;
        let m = self.grid.m as f64;
        self.orbitals
            .iter()
            .map(|e| {
                let mut buf = e.clone();
                sp.forward(&mut buf);
                buf.iter()
                    .zip(sp.wavenumbers())
                    .map(|(z, k)| z.norm_sqr() * k * k)
                    .sum::<f64>()
                    * 0.5
                    * h
                    * h
                    * self.grid.dx
                    / m
            })
            .sum()
    }

    /// Kinetic plus `(1/2N) sum V(x-y) [omega(x;x) omega(y;y) - |omega(x;y)|^2] dx dy`.
    pub fn energy(&self, v: &Potential) -> f64 {
        let om = self.omega();
        let m = self.grid.m;
        let dx2 = self.grid.dx * self.grid.dx;
        let mut pair = 0.0;
        for x in 0..m {
            for y in 0..m {
                let w = v.at_offset(x, y);
                pair += w * (om.get(x, x).re * om.get(y, y).re - om.get(x, y).norm_sqr());
            }
        }
        self.kinetic_energy() + pair * dx2 / (2.0 * self.n() as f64)
    }

    /// Orbitals concatenated after a state header with `N` the orbital count.
    pub fn write_snapshot(&self, path: &Path) -> Result<(), MeanFieldError> {
        let header = Header {
            version: STATE_VERSION,
            d: self.grid.d as u16,
            m: self.grid.m as u32,
            n: self.n() as u32,
            time: self.time,
            hbar: self.grid.hbar,
        };
        let data: Vec<Complex64> = self.orbitals.concat();
        let mut f =
            std::io::BufWriter::new(std::fs::File::create(path).map_err(ManyBodyError::from)?);
        snapshot::write(&mut f, &header, &data)?;
        f.flush().map_err(ManyBodyError::from)?;
        Ok(())
    }
}

/// Matrix of `(V * rho) - X` acting on grid vectors, with
/// `X(x;y) = (1/N) V(x-y) omega(x;y)`.
pub fn mean_field_matrix(
    grid: &GridSpec,
    v: &Potential,
    omega: &OneBodyKernel,
    n: usize,
) -> DMatrix<Complex64> {
    let m = grid.m;
    let nf = n as f64;
    let rho: Vec<f64> = omega.density().iter().map(|r| r / nf).collect();
    DMatrix::from_fn(m, m, |x, y| {
        let w = v.at_offset(x, y);
        let exchange = omega.get(x, y) * (w * grid.dx / nf);
        if x == y {
            let direct: f64 = (0..m).map(|z| v.at_offset(x, z) * rho[z]).sum::<f64>() * grid.dx;
            Complex64::new(direct, 0.0) - exchange
        } else {
            -exchange
        }
    })
}

/// Time-dependent Hartree-Fock by Strang splitting: half a free step, a full
/// mean-field step, half a free step.
///
/// The mean-field step freezes `U` at the midpoint of its own substep through
/// one predictor pass. For `N = 1` the mean field annihilates the orbital it
/// is built from, so the scheme reduces exactly to free propagation.
pub struct HartreeFock {
    grid: GridSpec,
    v: Potential,
    dt: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `exp(-i (dt/2) hbar k^2 / 2) / M`.
    kinetic_half: Vec<Complex64>,
}

impl HartreeFock {
    pub fn new(grid: &GridSpec, v: &Potential, dt: f64) -> Result<Self, MeanFieldError> {
        grid.require_1d()?;
        let sp = Spectral1d::new(grid);
        let kinetic_half = sp
            .wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0 / grid.m as f64, -0.25 * dt * grid.hbar * k * k))
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid: grid.clone(),
            v: v.clone(),
            dt,
            fwd: planner.plan_fft_forward(grid.m),
            inv: planner.plan_fft_inverse(grid.m),
            kinetic_half,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `exp(-i U dt / hbar)` through the Hermitian eigen-decomposition.
    fn flow(&self, u: DMatrix<Complex64>) -> DMatrix<Complex64> {
        let h = (&u + u.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let phases = DMatrix::from_diagonal(
            &eig.eigenvalues
                .map(|l| Complex64::from_polar(1.0, -self.dt * l / self.grid.hbar)),
        );
        &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    }

    fn apply(u: &DMatrix<Complex64>, orbitals: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        orbitals
            .iter()
            .map(|e| {
                (u * nalgebra::DVector::from_column_slice(e))
                    .iter()
                    .copied()
                    .collect()
            })
            .collect()
    }

    fn free_half(&self, orbitals: &mut [Vec<Complex64>]) {
        for e in orbitals {
            self.fwd.process(e);
            for (b, k) in e.iter_mut().zip(&self.kinetic_half) {
                *b *= k;
            }
            self.inv.process(e);
        }
    }

    pub fn step(&self, state: &mut MeanFieldState) -> Result<(), MeanFieldError> {
        let n = state.n();
        self.free_half(&mut state.orbitals);
        if !self.v.is_zero() {
            let u0 = mean_field_matrix(&self.grid, &self.v, &state.omega(), n);
            let predicted = Self::apply(&self.flow(u0.clone()), &state.orbitals);
            let u1 = mean_field_matrix(
                &self.grid,
                &self.v,
                &OneBodyKernel::from_orbitals(&self.grid, &predicted),
                n,
            );
            // U is linear in omega, so this is the mean field of the averaged kernel.
            let mid = (u0 + u1) * Complex64::new(0.5, 0.0);
            state.orbitals = Self::apply(&self.flow(mid), &state.orbitals);
        }
        self.free_half(&mut state.orbitals);
        state.time += self.dt;
        let defect = state.orthonormality_defect();
        if !(defect <= ORTHONORMALITY_ABORT) {
            return Err(MeanFieldError::Orthonormality {
                time: state.time,
                defect,
            });
        }
        Ok(())
    }

    pub fn run(&self, state: &mut MeanFieldState, steps: usize) -> Result<(), MeanFieldError> {
        for _ in 0..steps {
            self.step(state)?;
        }
        Ok(())
    }
}

/// One `hartree_fock_step` with a fresh propagator.
pub fn hartree_fock_step(
    state: &MeanFieldState,
    v: &Potential,
    dt: f64,
) -> Result<MeanFieldState, MeanFieldError> {
    let mut out = state.clone();
    HartreeFock::new(&state.grid, v, dt)?.step(&mut out)?;
    Ok(out)
}

/// Hilbert-Schmidt and trace norms of `gamma - omega` as operators.
pub fn norm_gaps(gamma: &OneBodyKernel, omega: &OneBodyKernel) -> (f64, f64) {
    gamma.norm_gaps(omega)
}
