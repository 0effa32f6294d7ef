use husimi_grid::GridSpec;

use crate::PhaseSpaceError;

/// Phase-space sampling points.
///
/// When `q_index` and `p_index` are present the points are grid positions and
/// FFT momentum slots, which enables the fast transform.
#[derive(Clone, Debug)]
pub struct PhaseLattice {
    pub qs: Vec<f64>,
    pub ps: Vec<f64>,
    pub dq: f64,
    pub dp: f64,
    pub q_index: Option<Vec<usize>>,
    pub p_index: Option<Vec<usize>>,
}

fn fft_slot(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

impl PhaseLattice {
    /// Every `sq`-th grid point and every `sp`-th lattice momentum, ascending.
    pub fn strided(grid: &GridSpec, sq: usize, sp: usize) -> Result<Self, PhaseSpaceError> {
        if sq == 0 || sp == 0 || grid.m % sq != 0 || grid.m % sp != 0 {
            return Err(PhaseSpaceError::Lattice(format!(
                "strides ({sq}, {sp}) must divide M = {}",
                grid.m
            )));
        }
        let q_index: Vec<usize> = (0..grid.m).step_by(sq).collect();
        let half = (grid.m / 2) as i64;
        let ks: Vec<i64> = (-half..half)
            .filter(|k| k.rem_euclid(sp as i64) == 0)
            .collect();
        let p_index: Vec<usize> = ks.iter().map(|&k| fft_slot(k, grid.m)).collect();
        Ok(Self {
            qs: q_index.iter().map(|&j| grid.position(j)).collect(),
            ps: ks.iter().map(|&k| k as f64 * grid.dp()).collect(),
            dq: sq as f64 * grid.dx,
            dp: sp as f64 * grid.dp(),
            q_index: Some(q_index),
            p_index: Some(p_index),
        })
    }

    /// All grid positions and all lattice momenta.
    pub fn full(grid: &GridSpec) -> Self {
        Self::strided(grid, 1, 1).expect("unit strides divide M")
    }

    /// Spacing close to `sqrt(hbar)/2` in both directions, rounded down to a
    /// power-of-two stride of the underlying lattices.
    pub fn default_for(grid: &GridSpec) -> Self {
        let target = 0.5 * grid.hbar.sqrt();
        let stride = |step: f64| {
            let mut s = 1usize;
            while (2 * s) as f64 * step <= target && 2 * s <= grid.m {
                s *= 2;
            }
            s
        };
        Self::strided(grid, stride(grid.dx), stride(grid.dp())).expect("power-of-two strides")
    }

    /// Arbitrary points; uses the direct transform.
    pub fn custom(qs: Vec<f64>, ps: Vec<f64>, dq: f64, dp: f64) -> Self {
        Self {
            qs,
            ps,
            dq,
            dp,
            q_index: None,
            p_index: None,
        }
    }

    pub fn len(&self) -> usize {
        self.qs.len() * self.ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coarser than `sqrt(hbar)` in either direction.
    pub fn undersampled(&self, hbar: f64) -> bool {
        self.dq > hbar.sqrt() || self.dp > hbar.sqrt()
    }

    pub fn is_fast(&self) -> bool {
        self.p_index.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use husimi_grid::DEFAULT_BUDGET;

    #[test]
    fn default_spacing_near_half_sqrt_hbar() {
        let g = GridSpec::with_budget(1, 128, 12.0, 0.5, 1, DEFAULT_BUDGET).unwrap();
        let lat = PhaseLattice::default_for(&g);
        let t = 0.5 * g.hbar.sqrt();
        assert!(lat.dq <= t && lat.dq > t / 2.0);
        assert!(lat.dp <= t && lat.dp > t / 2.0);
        assert!(!lat.undersampled(g.hbar));
        for (&p, &k) in lat.ps.iter().zip(lat.p_index.as_ref().unwrap()) {
            assert!((g.momentum(k) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn strides_must_divide() {
        let g = GridSpec::with_budget(1, 64, 12.0, 0.5, 1, DEFAULT_BUDGET).unwrap();
        assert!(PhaseLattice::strided(&g, 3, 1).is_err());
        assert_eq!(PhaseLattice::full(&g).len(), 64 * 64);
    }
}
