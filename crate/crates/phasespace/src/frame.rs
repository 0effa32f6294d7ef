use std::f64::consts::PI;

use husimi_grid::{bump_derivative, gauss_legendre8, GridSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::PhaseSpaceError;

/// Real window profile `f` with `|f|_2 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "window", rename_all = "snake_case")]
pub enum Window {
    /// `pi^(-1/4) exp(-x^2/2)`.
    Gaussian,
    /// `c exp(-1/(1 - (x/R1)^2))` normalized numerically.
    Bump { radius: f64, scale: f64 },
}

impl Window {
    pub fn gaussian() -> Self {
        Window::Gaussian
    }

    pub fn bump(radius: f64) -> Self {
        // Composite Gauss-Legendre on [-R1, R1]; the integrand is smooth.
        let panels = 400;
        let h = 2.0 * radius / panels as f64;
        let mut s = 0.0;
        for i in 0..panels {
            for (t, w) in gauss_legendre8() {
                let x = -radius + (i as f64 + t) * h;
                s += w * h * bump_derivative(0.0, radius, x, 0).powi(2);
            }
        }
        Window::Bump {
            radius,
            scale: 1.0 / s.sqrt(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Window::Gaussian => "gaussian",
            Window::Bump { .. } => "bump",
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, Window::Gaussian)
    }

    /// `k`-th derivative of `f` at `x`, `k <= 3`.
    pub fn eval(&self, x: f64, k: usize) -> f64 {
        match *self {
            Window::Gaussian => {
                let g = PI.powf(-0.25) * (-0.5 * x * x).exp();
                match k {
                    0 => g,
                    1 => -x * g,
                    2 => (x * x - 1.0) * g,
                    _ => (3.0 * x - x * x * x) * g,
                }
            }
            Window::Bump { radius, scale } => scale * bump_derivative(0.0, radius, x, k),
        }
    }

    /// Radius outside of which `f` is negligible (exactly zero for the bump,
    /// below 3e-11 for the Gaussian).
    pub fn reach(&self) -> f64 {
        match *self {
            Window::Gaussian => 7.0,
            Window::Bump { radius, .. } => radius,
        }
    }

    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            Window::Gaussian => None,
            Window::Bump { radius, .. } => Some(radius),
        }
    }

    /// `(|f|_2, |f'|_2, |f|_inf)` by fine quadrature.
    pub fn norms(&self) -> (f64, f64, f64) {
        let r = self.reach();
        let panels = 2000;
        let h = 2.0 * r / panels as f64;
        let (mut n2, mut d2, mut sup) = (0.0, 0.0, 0.0f64);
        for i in 0..panels {
            for (t, w) in gauss_legendre8() {
                let x = -r + (i as f64 + t) * h;
                let f = self.eval(x, 0);
                n2 += w * h * f * f;
                d2 += w * h * self.eval(x, 1).powi(2);
                sup = sup.max(f.abs());
            }
        }
        (n2.sqrt(), d2.sqrt(), sup)
    }
}

/// Coherent states `g_{q,p}(y) = hbar^(-1/4) f((y - q)/sqrt(hbar)) exp(i p y~ / hbar)` on
/// the periodic grid, where `y - q` is the minimal image and `y~ = q + (y - q)`.
///
/// For lattice momenta `exp(i p y~ / hbar) = exp(i p y / hbar)`.
#[derive(Clone, Debug)]
pub struct CoherentFrame {
    pub window: Window,
    pub grid: GridSpec,
    pub hbar: f64,
}

impl CoherentFrame {
    pub fn new(grid: &GridSpec, window: Window) -> Result<Self, PhaseSpaceError> {
        grid.require_1d()?;
        let reach = window.reach() * grid.hbar.sqrt();
        if reach >= 0.5 * grid.l {
            return Err(PhaseSpaceError::Window(format!(
                "window reach {reach:.3} does not fit in half the box {:.3}",
                0.5 * grid.l
            )));
        }
        let (n2, _, _) = window.norms();
        if (n2 - 1.0).abs() > 1e-10 {
            return Err(PhaseSpaceError::Window(format!("|f|_2 = {n2}")));
        }
        Ok(Self {
            window,
            grid: grid.clone(),
            hbar: grid.hbar,
        })
    }

    pub fn gaussian(grid: &GridSpec) -> Result<Self, PhaseSpaceError> {
        Self::new(grid, Window::gaussian())
    }

    pub fn bump(grid: &GridSpec) -> Result<Self, PhaseSpaceError> {
        Self::new(grid, Window::bump(1.0))
    }

    /// `hbar^(-1/4) f^(k)((y - q)/sqrt(hbar))` at every grid point.
    pub fn window_derivative(&self, q: f64, k: usize) -> Vec<f64> {
        let s = self.hbar.sqrt();
        let pre = self.hbar.powf(-0.25);
        self.grid
            .positions()
            .iter()
            .map(|&y| pre * self.window.eval(self.grid.wrap(y - q) / s, k))
            .collect()
    }

    pub fn window_on_grid(&self, q: f64) -> Vec<f64> {
        self.window_derivative(q, 0)
    }

    fn phases(&self, q: f64, p: f64) -> Vec<Complex64> {
        self.grid
            .positions()
            .iter()
            .map(|&y| {
                let yt = q + self.grid.wrap(y - q);
                Complex64::from_polar(1.0, p * yt / self.hbar)
            })
            .collect()
    }

    /// `g_{q,p}` on the grid.
    pub fn vector(&self, q: f64, p: f64) -> Vec<Complex64> {
        self.window_on_grid(q)
            .into_iter()
            .zip(self.phases(q, p))
            .map(|(f, e)| e * f)
            .collect()
    }

    /// `d^k/dq^k g_{q,p}`; the phase uses the unwrapped `y~`, which does not move with `q`.
    pub fn dq_vector(&self, q: f64, p: f64, k: usize) -> Vec<Complex64> {
        let scale = (-1.0 / self.hbar.sqrt()).powi(k as i32);
        self.window_derivative(q, k)
            .into_iter()
            .zip(self.phases(q, p))
            .map(|(f, e)| e * (f * scale))
            .collect()
    }

    /// `d/dp g_{q,p} = (i y~ / hbar) g_{q,p}`.
    pub fn dp_vector(&self, q: f64, p: f64) -> Vec<Complex64> {
        self.vector(q, p)
            .into_iter()
            .zip(self.grid.positions())
            .map(|(g, y)| {
                let yt = q + self.grid.wrap(y - q);
                g * Complex64::new(0.0, yt / self.hbar)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use husimi_grid::DEFAULT_BUDGET;

    #[test]
    fn presets_are_normalized() {
        for w in [Window::gaussian(), Window::bump(1.0)] {
            let (n2, d2, sup) = w.norms();
            assert!((n2 - 1.0).abs() < 1e-10, "{}", w.label());
            assert!(d2.is_finite() && sup.is_finite());
        }
        assert_eq!(Window::bump(1.0).support_radius(), Some(1.0));
        assert_eq!(Window::bump(1.0).eval(1.0, 0), 0.0);
    }

    #[test]
    fn coherent_vector_has_unit_norm() {
        let g = GridSpec::with_budget(1, 128, 12.0, 0.5, 1, DEFAULT_BUDGET).unwrap();
        for f in [
            CoherentFrame::gaussian(&g).unwrap(),
            CoherentFrame::bump(&g).unwrap(),
        ] {
            let v = f.vector(1.3, 0.7);
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dx;
            // The bump spans about 15 grid points here, so its grid norm is only
            // accurate to a few 1e-5.
            let tol = if f.window.is_gaussian() { 1e-10 } else { 1e-4 };
            assert!((n - 1.0).abs() < tol, "{} {n}", f.window.label());
        }
    }

    #[test]
    fn q_derivative_matches_difference() {
        let g = GridSpec::with_budget(1, 64, 10.0, 0.5, 1, DEFAULT_BUDGET).unwrap();
        let f = CoherentFrame::gaussian(&g).unwrap();
        let h = 1e-5;
        let d = f.dq_vector(0.3, 1.1, 1);
        let a = f.vector(0.3 + h, 1.1);
        let b = f.vector(0.3 - h, 1.1);
        for j in 0..g.m {
            let fd = (a[j] - b[j]) / (2.0 * h);
            assert!((fd - d[j]).norm() < 1e-6);
        }
    }

    #[test]
    fn window_must_fit() {
        let g = GridSpec::with_budget(1, 64, 4.0, 0.5, 1, DEFAULT_BUDGET).unwrap();
        assert!(CoherentFrame::gaussian(&g).is_err());
        assert!(CoherentFrame::bump(&g).is_ok());
    }
}
