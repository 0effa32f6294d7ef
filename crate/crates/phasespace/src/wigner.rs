use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::husimi::write_field_csv;
use crate::{husimi1, CoherentFrame, Factorized, PhaseLattice, PhaseSpaceError};
use husimi_grid::GridSpec;

/// How columns are refined to the half-spacing grid that the Wigner
/// transform needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    /// Four-point midpoint interpolation.
    #[default]
    Cubic,
    /// Zero-padding in Fourier space.
    Spectral,
}

/// `W(x_i, p_k) = (1/N) (1/hbar) int dy gamma(x + y/2; x - y/2) e^{-i p y / hbar}`
/// on the position grid and `2M` momenta `p_k = pi hbar k / L` in ascending order.
///
/// The displacement `y` is restricted to `|y| < L/2`, so a state localized
/// well inside the box sees no periodic ghost.
#[derive(Clone, Debug)]
pub struct WignerField {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub dx: f64,
    pub dp: f64,
    pub hbar: f64,
    pub k: usize,
    pub values: Vec<f64>,
}

impl WignerField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ps.len() + j]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(1/(2 pi)) sum_p W(x_i, p) dp` for every `x_i`.
    pub fn position_marginal(&self) -> Vec<f64> {
        let np = self.ps.len();
        (0..self.xs.len())
            .map(|i| self.values[i * np..(i + 1) * np].iter().sum::<f64>() * self.dp / (2.0 * PI))
            .collect()
    }

    /// `(1/(2 pi)) sum W dx dp`, which is 1 for the `1/(N hbar)` normalization.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx * self.dp / (2.0 * PI)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), PhaseSpaceError> {
        write_field_csv(path, &self.xs, &self.ps, &self.values)
    }
}

fn refine(col: &[Complex64], scheme: Refinement) -> Vec<Complex64> {
    let m = col.len();
    let mut out = vec![Complex64::default(); 2 * m];
    match scheme {
        Refinement::Cubic => {
            for i in 0..m {
                out[2 * i] = col[i];
                let a = col[(i + m - 1) % m];
                let b = col[i];
                let c = col[(i + 1) % m];
                let d = col[(i + 2) % m];
                out[2 * i + 1] = (-a + b * 9.0 + c * 9.0 - d) / 16.0;
            }
        }
        Refinement::Spectral => {
            let mut planner = FftPlanner::new();
            let mut spec = col.to_vec();
            planner.plan_fft_forward(m).process(&mut spec);
            let half = m / 2;
            for k in 0..half {
                out[k] = spec[k];
                out[2 * m - half + k] = spec[half + k];
            }
            // Split the Nyquist bin so the refined samples stay consistent.
            out[half] = spec[half] * 0.5;
            out[2 * m - half] = spec[half] * 0.5;
            planner.plan_fft_inverse(2 * m).process(&mut out);
            for z in &mut out {
                *z /= m as f64;
            }
        }
    }
    out
}

/// Wigner transform of `gamma`, normalized by the particle number `n`.
pub fn wigner1(
    gamma: &Factorized,
    grid: &GridSpec,
    n: usize,
    scheme: Refinement,
) -> Result<WignerField, PhaseSpaceError> {
    grid.require_1d()?;
    let m = grid.m;
    if gamma.m() != m {
        return Err(PhaseSpaceError::Mismatch(format!(
            "kernel has {} points, grid has {m}",
            gamma.m()
        )));
    }
    let m2 = 2 * m;
    let h = 0.5 * grid.dx;
    let refined: Vec<Vec<Complex64>> = gamma.columns.iter().map(|c| refine(c, scheme)).collect();
    let fft = FftPlanner::new().plan_fft_forward(m2);
    let pre = 2.0 * h / (n as f64 * grid.hbar);
    let mut values = vec![0.0; m * m2];
    let mut z = vec![Complex64::default(); m2];
    for i in 0..m {
        z.iter_mut().for_each(|v| *v = Complex64::default());
        for (w, b) in gamma.weights.iter().zip(&refined) {
            for (j, zj) in z.iter_mut().enumerate() {
                // Displacements |y| >= L/2 would pick up the antipodal image.
                if j >= m / 2 && j <= m2 - m / 2 {
                    continue;
                }
                *zj += b[(2 * i + j) % m2] * b[(2 * i + m2 - j) % m2].conj() * *w;
            }
        }
        fft.process(&mut z);
        // Slot k carries p = pi hbar k / L, with k >= M wrapped to k - 2M.
        let row = &mut values[i * m2..(i + 1) * m2];
        for (slot, v) in z.iter().enumerate() {
            let k = if slot < m { slot + m } else { slot - m };
            row[k] = v.re * pre;
        }
    }
    let dp = PI * grid.hbar / grid.l;
    Ok(WignerField {
        xs: grid.positions(),
        ps: (0..m2).map(|k| (k as f64 - m as f64) * dp).collect(),
        dx: grid.dx,
        dp,
        hbar: grid.hbar,
        k: 1,
        values,
    })
}

/// Defect of the identity `m = hbar N (W * G)` with
/// `G(q,p) = (pi hbar)^(-1) exp(-(q^2 + p^2)/hbar)`.
#[derive(Clone, Debug)]
pub struct BridgeReport {
    pub max_defect: f64,
    pub max_husimi: f64,
    pub points: usize,
}

/// Compares the Husimi field on `lattice` with the Gaussian smoothing of the
/// Wigner field; periodic in `q`, truncated to the Wigner momentum range in `p`.
pub fn convolution_bridge_check(
    wigner: &WignerField,
    gamma: &Factorized,
    frame: &CoherentFrame,
    lattice: &PhaseLattice,
    n: usize,
) -> Result<BridgeReport, PhaseSpaceError> {
    if !frame.window.is_gaussian() {
        return Err(PhaseSpaceError::NotGaussian(frame.window.label().into()));
    }
    let husimi = husimi1(gamma, frame, lattice)?;
    let grid = &frame.grid;
    let hbar = grid.hbar;
    let norm = 1.0 / (PI * hbar).sqrt();
    let gauss = |d: f64| norm * (-d * d / hbar).exp();
    let np = wigner.ps.len();
    // Smooth in p first, then in q.
    let mut smoothed_p = vec![0.0; wigner.xs.len() * lattice.ps.len()];
    let gp: Vec<Vec<f64>> = lattice
        .ps
        .iter()
        .map(|&p| {
            wigner
                .ps
                .iter()
                .map(|&pk| gauss(p - pk) * wigner.dp)
                .collect()
        })
        .collect();
    for i in 0..wigner.xs.len() {
        let row = &wigner.values[i * np..(i + 1) * np];
        for (j, g) in gp.iter().enumerate() {
            smoothed_p[i * lattice.ps.len() + j] = row.iter().zip(g).map(|(w, g)| w * g).sum();
        }
    }
    let mut max_defect = 0.0f64;
    for (a, &q) in lattice.qs.iter().enumerate() {
        let gq: Vec<f64> = wigner
            .xs
            .iter()
            .map(|&x| gauss(grid.wrap(q - x)) * wigner.dx)
            .collect();
        for j in 0..lattice.ps.len() {
            let conv: f64 = gq
                .iter()
                .enumerate()
                .map(|(i, g)| g * smoothed_p[i * lattice.ps.len() + j])
                .sum();
            let predicted = hbar * n as f64 * conv;
            max_defect = max_defect.max((husimi.get(a, j) - predicted).abs());
        }
    }
    Ok(BridgeReport {
        max_defect,
        max_husimi: husimi.max(),
        points: lattice.len(),
    })
}
