use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::GridError;

/// Default cap on the number of N-body amplitudes, `M^(d N)`.
pub const DEFAULT_BUDGET: u128 = 1 << 26;
/// Environment variable that overrides [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "HUSIMI_LAB_BUDGET";

pub fn budget_from_env() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u128>().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Periodic box discretization with the semiclassical parameter and particle count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub m: usize,
    pub l: f64,
    pub dx: f64,
    pub hbar: f64,
    pub n: usize,
}

/// Builds a grid against the budget from the environment.
pub fn make_grid(d: usize, m: usize, l: f64, hbar: f64, n: usize) -> Result<GridSpec, GridError> {
    GridSpec::with_budget(d, m, l, hbar, n, budget_from_env())
}

impl GridSpec {
    pub fn with_budget(
        d: usize,
        m: usize,
        l: f64,
        hbar: f64,
        n: usize,
        budget: u128,
    ) -> Result<Self, GridError> {
        if d == 0 {
            return Err(GridError::BadDimension);
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(GridError::NotPowerOfTwo(m));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(GridError::BadLength(l));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(GridError::BadHbar(hbar));
        }
        if n == 0 {
            return Err(GridError::BadParticles);
        }
        let log2 = (d * n) as f64 * (m as f64).log2();
        let over = log2 >= 127.0 || (m as u128).pow((d * n) as u32) > budget;
        if over {
            return Err(GridError::Budget {
                m,
                d,
                n,
                log2,
                budget,
            });
        }
        Ok(Self {
            d,
            m,
            l,
            dx: l / m as f64,
            hbar,
            n,
        })
    }

    /// The coupled family `hbar = N^(-1/d)`.
    pub fn coupled(d: usize, m: usize, l: f64, n: usize) -> Result<Self, GridError> {
        let hbar = (n as f64).powf(-1.0 / d.max(1) as f64);
        make_grid(d, m, l, hbar, n)
    }

    pub fn with_particles(&self, n: usize) -> Result<Self, GridError> {
        make_grid(self.d, self.m, self.l, self.hbar, n)
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self, GridError> {
        make_grid(self.d, self.m, self.l, hbar, self.n)
    }

    /// Quadrature weight `dx^d`.
    pub fn weight(&self) -> f64 {
        self.dx.powi(self.d as i32)
    }

    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.l + j as f64 * self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.position(j)).collect()
    }

    /// Signed lattice index of FFT slot `j`.
    pub fn momentum_index(&self, j: usize) -> i64 {
        let m = self.m as i64;
        let j = j as i64;
        if j < m / 2 {
            j
        } else {
            j - m
        }
    }

    /// Momentum `2 pi hbar k / L` of FFT slot `j`.
    pub fn momentum(&self, j: usize) -> f64 {
        self.dp() * self.momentum_index(j) as f64
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.momentum(j)).collect()
    }

    /// Momentum lattice spacing.
    pub fn dp(&self) -> f64 {
        2.0 * PI * self.hbar / self.l
    }

    /// Largest resolved momentum, `pi hbar / dx`.
    pub fn p_max(&self) -> f64 {
        PI * self.hbar / self.dx
    }

    /// Minimal image of `x` in `[-L/2, L/2)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let h = 0.5 * self.l;
        let y = (x + h).rem_euclid(self.l) - h;
        if y >= h {
            y - self.l
        } else {
            y
        }
    }

    /// Grid index nearest to `x` after wrapping.
    pub fn nearest_index(&self, x: f64) -> usize {
        let y = self.wrap(x) + 0.5 * self.l;
        ((y / self.dx).round() as usize) % self.m
    }

    /// Number of N-body amplitudes `M^(d N)`.
    pub fn amplitude_count(&self) -> u128 {
        (self.m as u128).pow((self.d * self.n) as u32)
    }

    /// Stability scale `dx^2 / hbar` reported alongside propagation steps.
    pub fn cfl_dt(&self) -> f64 {
        self.dx * self.dx / self.hbar
    }

    pub fn require_1d(&self) -> Result<(), GridError> {
        if self.d == 1 {
            Ok(())
        } else {
            Err(GridError::Unsupported(self.d))
        }
    }
}
