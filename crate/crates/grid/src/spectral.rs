use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::GridSpec;

/// One-dimensional FFT helper bound to a grid.
///
/// The forward transform is unnormalized and the inverse divides by `M`.
/// Wavenumbers are `p_k / hbar` with the Nyquist slot treated as negative.
#[derive(Clone)]
pub struct Spectral1d {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl std::fmt::Debug for Spectral1d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral1d").field("m", &self.m).finish()
    }
}

impl Spectral1d {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let m = grid.m;
        let wavenumbers = (0..m).map(|j| grid.momentum(j) / grid.hbar).collect();
        Self {
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
            wavenumbers,
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// In-place forward transform of every contiguous length-`M` chunk.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    /// In-place normalized inverse transform of every contiguous chunk.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        let s = 1.0 / self.m as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }

    /// Spectral derivative of the given order.
    pub fn derivative(&self, f: &[Complex64], order: u32) -> Vec<Complex64> {
        assert_eq!(f.len(), self.m);
        let mut buf = f.to_vec();
        self.forward(&mut buf);
        for (z, &k) in buf.iter_mut().zip(&self.wavenumbers) {
            *z *= Complex64::new(0.0, k).powu(order);
        }
        self.inverse(&mut buf);
        buf
    }

    pub fn derivative_real(&self, f: &[f64], order: u32) -> Vec<f64> {
        let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.derivative(&c, order)
            .into_iter()
            .map(|z| z.re)
            .collect()
    }
}
