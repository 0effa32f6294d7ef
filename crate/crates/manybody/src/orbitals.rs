//! Orthonormal one-body orbital families on the grid.

use std::f64::consts::PI;

use husimi_grid::GridSpec;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Named orbital families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OrbitalFamily {
    /// Lattice plane waves with wavenumbers `0, +1, -1, +2, ...` (in units of `2 pi / L`).
    PlaneWave,
    /// Gaussians of the given width centred `spacing` apart, symmetrically orthonormalized.
    ShiftedGaussian { width: f64, spacing: f64 },
    /// Lowest oscillator eigenfunctions at frequency `omega` and the grid's `hbar`.
    Hermite { omega: f64 },
}

impl OrbitalFamily {
    pub fn build(&self, grid: &GridSpec, n: usize) -> Vec<Vec<Complex64>> {
        match *self {
            OrbitalFamily::PlaneWave => plane_waves(grid, n),
            OrbitalFamily::ShiftedGaussian { width, spacing } => {
                shifted_gaussians_spaced(grid, n, width, spacing)
            }
            OrbitalFamily::Hermite { omega } => hermite(grid, n, omega),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            OrbitalFamily::PlaneWave => "plane_wave",
            OrbitalFamily::ShiftedGaussian { .. } => "shifted_gaussian",
            OrbitalFamily::Hermite { .. } => "hermite",
        }
    }
}

/// Signed wavenumber index of the `j`-th plane wave.
pub fn plane_wave_index(j: usize) -> i64 {
    let k = j.div_ceil(2) as i64;
    if j % 2 == 1 {
        k
    } else {
        -k
    }
}

pub fn plane_waves(grid: &GridSpec, n: usize) -> Vec<Vec<Complex64>> {
    let amp = 1.0 / grid.l.sqrt();
    (0..n)
        .map(|j| {
            let kap = 2.0 * PI * plane_wave_index(j) as f64 / grid.l;
            grid.positions()
                .iter()
                .map(|&x| Complex64::from_polar(amp, kap * x))
                .collect()
        })
        .collect()
}

pub fn shifted_gaussians(grid: &GridSpec, n: usize, width: f64) -> Vec<Vec<Complex64>> {
    shifted_gaussians_spaced(grid, n, width, 2.0 * width)
}

pub fn shifted_gaussians_spaced(
    grid: &GridSpec,
    n: usize,
    width: f64,
    spacing: f64,
) -> Vec<Vec<Complex64>> {
    let raw = (0..n)
        .map(|j| {
            let c = (j as f64 - 0.5 * (n as f64 - 1.0)) * spacing;
            grid.positions()
                .iter()
                .map(|&x| {
                    let y = grid.wrap(x - c);
                    Complex64::new((-0.5 * y * y / (width * width)).exp(), 0.0)
                })
                .collect()
        })
        .collect();
    orthonormalize(grid, raw)
}

/// Oscillator eigenfunctions `psi_k` for `H = -hbar^2/2 d^2 + omega^2 x^2 / 2`.
pub fn hermite(grid: &GridSpec, n: usize, omega: f64) -> Vec<Vec<Complex64>> {
    let s = (omega / grid.hbar).sqrt();
    let xs = grid.positions();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let v: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let xi = s * x;
                match k {
                    0 => s.sqrt() * PI.powf(-0.25) * (-0.5 * xi * xi).exp(),
                    1 => (2.0f64).sqrt() * xi * out[0][i],
                    _ => {
                        let kf = k as f64;
                        (2.0 / kf).sqrt() * xi * out[k - 1][i]
                            - ((kf - 1.0) / kf).sqrt() * out[k - 2][i]
                    }
                }
            })
            .collect();
        out.push(v);
    }
    let raw = out
        .into_iter()
        .map(|v| v.into_iter().map(|a| Complex64::new(a, 0.0)).collect())
        .collect();
    orthonormalize(grid, raw)
}

/// Symmetric (Lowdin) orthonormalization in the `dx`-weighted inner product.
pub fn orthonormalize(grid: &GridSpec, raw: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let n = raw.len();
    if n == 0 {
        return raw;
    }
    let s = DMatrix::from_fn(n, n, |i, j| {
        raw[i]
            .iter()
            .zip(&raw[j])
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * grid.dx
    });
    let eig = SymmetricEigen::new(s);
    let inv_sqrt =
        DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.powf(-0.5), 0.0)));
    let t = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    (0..n)
        .map(|j| {
            (0..grid.m)
                .map(|x| (0..n).map(|i| raw[i][x] * t[(i, j)]).sum())
                .collect()
        })
        .collect()
}
