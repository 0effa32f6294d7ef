use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{bump_derivative, GridError, GridSpec, Spectral1d};

/// Closed-form pair potentials. All of them are even.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    /// `A exp(-x^2 / (2 w^2))`, summed over periodic images.
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    /// `A exp(-1/(1 - (x/r)^2))` on `|x| < r`.
    Bump {
        amplitude: f64,
        radius: f64,
    },
    /// `A cos(2 pi mode x / L)`.
    Cosine {
        amplitude: f64,
        mode: u32,
    },
    /// `c x^2 / 2` on the minimal image; smooth only away from the box edge.
    Quadratic {
        curvature: f64,
    },
}

impl PotentialKind {
    fn images(l: f64, width: f64) -> i64 {
        (1.0 + 12.0 * width / l).ceil() as i64
    }

    /// Derivative of order `k <= 2` at an arbitrary point.
    pub fn derivative_at(&self, l: f64, x: f64, k: usize) -> f64 {
        let h = 0.5 * l;
        let xw = (x + h).rem_euclid(l) - h;
        match *self {
            PotentialKind::Zero => 0.0,
            PotentialKind::Gaussian { amplitude, width } => {
                let n = Self::images(l, width);
                let s2 = width * width;
                (-n..=n)
                    .map(|i| {
                        let y = xw + i as f64 * l;
                        let e = (-0.5 * y * y / s2).exp();
                        match k {
                            0 => e,
                            1 => -y / s2 * e,
                            _ => (y * y / s2 - 1.0) / s2 * e,
                        }
                    })
                    .sum::<f64>()
                    * amplitude
            }
            PotentialKind::Bump { amplitude, radius } => {
                amplitude * bump_derivative(0.0, radius, xw, k)
            }
            PotentialKind::Cosine { amplitude, mode } => {
                let kk = 2.0 * PI * mode as f64 / l;
                let v = match k {
                    0 => (kk * xw).cos(),
                    1 => -kk * (kk * xw).sin(),
                    _ => -kk * kk * (kk * xw).cos(),
                };
                amplitude * v
            }
            PotentialKind::Quadratic { curvature } => match k {
                0 => 0.5 * curvature * xw * xw,
                1 => curvature * xw,
                _ => curvature,
            },
        }
    }
}

/// A pair potential tabulated on a one-dimensional grid.
#[derive(Clone, Debug)]
pub struct Potential {
    pub kind: PotentialKind,
    pub l: f64,
    pub values: Vec<f64>,
    /// `c_k` with `V(x_j) = sum_k c_k exp(i kappa_k x_j)`, FFT order.
    pub fourier: Vec<Complex64>,
    pub grad: Vec<f64>,
    pub hess_bound: f64,
}

impl Potential {
    pub fn new(grid: &GridSpec, kind: PotentialKind) -> Result<Self, GridError> {
        grid.require_1d()?;
        let xs = grid.positions();
        let values: Vec<f64> = xs
            .iter()
            .map(|&x| kind.derivative_at(grid.l, x, 0))
            .collect();
        let grad = xs
            .iter()
            .map(|&x| kind.derivative_at(grid.l, x, 1))
            .collect();
        // Dense resample for the curvature bound.
        let fine = 8 * grid.m;
        let hess_bound = (0..fine)
            .map(|j| {
                let x = -0.5 * grid.l + j as f64 * grid.l / fine as f64;
                kind.derivative_at(grid.l, x, 2).abs()
            })
            .fold(0.0, f64::max);
        let sp = Spectral1d::new(grid);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        sp.forward(&mut buf);
        // Undo the shift of the grid origin to -L/2.
        let x0 = -0.5 * grid.l;
        let fourier = buf
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let kap = 2.0 * PI * grid.momentum_index(j) as f64 / grid.l;
                c / grid.m as f64 * Complex64::from_polar(1.0, -kap * x0)
            })
            .collect();
        let pot = Self {
            kind,
            l: grid.l,
            values,
            fourier,
            grad,
            hess_bound,
        };
        let odd = pot.evenness_defect();
        if odd > 1e-12 * (1.0 + pot.sup()) {
            return Err(GridError::NotEven(odd));
        }
        Ok(pot)
    }

    pub fn zero(grid: &GridSpec) -> Result<Self, GridError> {
        Self::new(grid, PotentialKind::Zero)
    }

    pub fn is_zero(&self) -> bool {
        self.kind == PotentialKind::Zero
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.kind.derivative_at(self.l, x, 0)
    }

    pub fn grad_at(&self, x: f64) -> f64 {
        self.kind.derivative_at(self.l, x, 1)
    }

    pub fn hess_at(&self, x: f64) -> f64 {
        self.kind.derivative_at(self.l, x, 2)
    }

    /// `V` at the grid difference `x_i - x_j`, which is itself a grid point.
    pub fn at_offset(&self, i: usize, j: usize) -> f64 {
        let m = self.values.len();
        // x_i - x_j = -L/2 + (i - j + M/2) dx
        self.values[(i + m + m / 2 - j) % m]
    }

    pub fn grad_at_offset(&self, i: usize, j: usize) -> f64 {
        let m = self.grad.len();
        self.grad[(i + m + m / 2 - j) % m]
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn grad_sup(&self) -> f64 {
        self.grad.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `max_j |V(x_j) - V(-x_j)|` over the grid.
    pub fn evenness_defect(&self) -> f64 {
        let m = self.values.len();
        (0..m)
            .map(|j| (self.values[j] - self.values[(m - j) % m]).abs())
            .fold(0.0, f64::max)
    }

    /// `sum_k (1 + kappa_k^2) |c_k|`.
    pub fn fourier_weight(&self) -> f64 {
        let m = self.fourier.len() as i64;
        self.fourier
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let j = j as i64;
                let idx = if j < m / 2 { j } else { j - m };
                let kap = 2.0 * PI * idx as f64 / self.l;
                (1.0 + kap * kap) * c.norm()
            })
            .sum()
    }

    /// Writes `x,V,dV` rows.
    pub fn write_csv(&self, grid: &GridSpec, path: &Path) -> Result<(), GridError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "x,V,dV")?;
        for (j, (v, g)) in self.values.iter().zip(&self.grad).enumerate() {
            writeln!(f, "{:.17e},{:.17e},{:.17e}", grid.position(j), v, g)?;
        }
        f.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;

    fn grid() -> GridSpec {
        GridSpec::with_budget(1, 128, 8.0, 0.5, 1, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn fourier_reconstructs_samples() {
        let g = grid();
        let v = Potential::new(
            &g,
            PotentialKind::Gaussian {
                amplitude: 1.0,
                width: 1.0,
            },
        )
        .unwrap();
        for (j, x) in g.positions().into_iter().enumerate() {
            let s: Complex64 = v
                .fourier
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let kap = 2.0 * PI * g.momentum_index(k) as f64 / g.l;
                    c * Complex64::from_polar(1.0, kap * x)
                })
                .sum();
            assert!((s.re - v.values[j]).abs() < 1e-12);
            assert!(s.im.abs() < 1e-12);
        }
        assert!(v.fourier_weight().is_finite());
    }

    #[test]
    fn cosine_has_two_coefficients() {
        let g = grid();
        let v = Potential::new(
            &g,
            PotentialKind::Cosine {
                amplitude: 2.0,
                mode: 3,
            },
        )
        .unwrap();
        assert!((v.fourier[3].re - 1.0).abs() < 1e-12);
        assert!((v.fourier[125].re - 1.0).abs() < 1e-12);
        let kap = 2.0 * PI * 3.0 / 8.0;
        assert!((v.fourier_weight() - 2.0 * (1.0 + kap * kap)).abs() < 1e-10);
        assert!((v.hess_bound - 2.0 * kap * kap).abs() < 1e-9);
    }

    #[test]
    fn offsets_are_differences() {
        let g = grid();
        let v = Potential::new(
            &g,
            PotentialKind::Bump {
                amplitude: 1.0,
                radius: 2.0,
            },
        )
        .unwrap();
        for (i, j) in [(0, 0), (5, 90), (127, 3), (64, 64)] {
            let want = v.value_at(g.position(i) - g.position(j));
            assert!((v.at_offset(i, j) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_matches_spectral() {
        let g = grid();
        let v = Potential::new(
            &g,
            PotentialKind::Gaussian {
                amplitude: 0.7,
                width: 0.8,
            },
        )
        .unwrap();
        let d = Spectral1d::new(&g).derivative_real(&v.values, 1);
        for (a, b) in d.iter().zip(&v.grad) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
