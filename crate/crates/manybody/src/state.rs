use husimi_grid::GridSpec;
use num_complex::Complex64;

use crate::{permutations, ManyBodyError};

const ORTHO_TOL: f64 = 1e-10;

/// Antisymmetric wavefunction of `grid.n` particles.
#[derive(Clone, Debug)]
pub struct ManyBodyState {
    pub grid: GridSpec,
    pub amps: Vec<Complex64>,
    pub time: f64,
}

impl ManyBodyState {
    pub fn new(grid: GridSpec, amps: Vec<Complex64>, time: f64) -> Result<Self, ManyBodyError> {
        grid.require_1d()?;
        let want = grid.m.pow(grid.n as u32);
        if amps.len() != want {
            return Err(ManyBodyError::Orbitals {
                expected: 1,
                len: want,
                got: format!("amplitude vector of length {}", amps.len()),
            });
        }
        Ok(Self { grid, amps, time })
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn m(&self) -> usize {
        self.grid.m
    }

    /// `sum |psi|^2 dx^N`.
    pub fn norm_sqr(&self) -> f64 {
        let w = self.grid.dx.powi(self.n() as i32);
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * w
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Flat index of a coordinate tuple.
    pub fn index(&self, xs: &[usize]) -> usize {
        xs.iter().fold(0, |acc, &x| acc * self.m() + x)
    }

    /// Largest `|psi + psi o tau|` over adjacent transpositions, relative to `max |psi|`.
    ///
    /// Adjacent transpositions generate the symmetric group, so this bounds
    /// every pair swap.
    pub fn antisymmetry_violation(&self) -> f64 {
        let n = self.n();
        let m = self.m();
        let big = self.amps.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if n < 2 || big == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        let mut xs = vec![0usize; n];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut r = idx;
            for slot in (0..n).rev() {
                xs[slot] = r % m;
                r /= m;
            }
            for k in 0..n - 1 {
                xs.swap(k, k + 1);
                let j = self.index(&xs);
                xs.swap(k, k + 1);
                worst = worst.max((a + self.amps[j]).norm());
            }
        }
        worst / big
    }

    /// `<self, other>` with the `dx^N` weight.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let w = self.grid.dx.powi(self.n() as i32);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * w
    }
}

/// Gram-matrix defect `max |<e_i, e_j> - delta_ij|` with the `dx` weight.
pub fn gram_defect(grid: &GridSpec, orbitals: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in orbitals.iter().enumerate() {
        for (j, b) in orbitals.iter().enumerate() {
            let g: Complex64 = a
                .iter()
                .zip(b)
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
                * grid.dx;
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - want).norm());
        }
    }
    worst
}

/// `psi(x_1..x_N) = det[e_j(x_i)] / sqrt(N!)`.
pub fn build_slater(
    grid: &GridSpec,
    orbitals: &[Vec<Complex64>],
) -> Result<ManyBodyState, ManyBodyError> {
    grid.require_1d()?;
    let n = grid.n;
    let m = grid.m;
    if orbitals.len() != n || orbitals.iter().any(|o| o.len() != m) {
        return Err(ManyBodyError::Orbitals {
            expected: n,
            len: m,
            got: format!(
                "{} orbitals of lengths {:?}",
                orbitals.len(),
                orbitals.iter().map(Vec::len).collect::<Vec<_>>()
            ),
        });
    }
    let defect = gram_defect(grid, orbitals);
    if defect > ORTHO_TOL {
        return Err(ManyBodyError::NotOrthonormal(defect));
    }
    let perms = permutations(n);
    let norm = 1.0 / (perms.len() as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); m.pow(n as u32)];
    let mut xs = vec![0usize; n];
    // Visit strictly increasing tuples and fill their orbits with signs.
    fn walk(
        slot: usize,
        start: usize,
        xs: &mut Vec<usize>,
        m: usize,
        orbitals: &[Vec<Complex64>],
        perms: &[(Vec<usize>, f64)],
        norm: f64,
        amps: &mut [Complex64],
    ) {
        let n = xs.len();
        if slot == n {
            let det: Complex64 = perms
                .iter()
                .map(|(p, s)| {
                    (0..n).fold(Complex64::new(*s, 0.0), |acc, i| {
                        acc * orbitals[p[i]][xs[i]]
                    })
                })
                .sum();
            let val = det * norm;
            for (p, s) in perms {
                let idx = p.iter().fold(0, |acc, &i| acc * m + xs[i]);
                amps[idx] = val * *s;
            }
            return;
        }
        for x in start..m {
            xs[slot] = x;
            walk(slot + 1, x + 1, xs, m, orbitals, perms, norm, amps);
        }
    }
    walk(0, 0, &mut xs, m, orbitals, &perms, norm, &mut amps);
    ManyBodyState::new(grid.clone(), amps, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbitals;
    use husimi_grid::DEFAULT_BUDGET;

    #[test]
    fn single_particle_is_orbital() {
        let g = GridSpec::with_budget(1, 16, 4.0, 0.5, 1, DEFAULT_BUDGET).unwrap();
        let e = orbitals::plane_waves(&g, 1);
        let s = build_slater(&g, &e).unwrap();
        for (a, b) in s.amps.iter().zip(&e[0]) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_non_orthonormal() {
        let g = GridSpec::with_budget(1, 16, 4.0, 0.5, 2, DEFAULT_BUDGET).unwrap();
        let e = orbitals::plane_waves(&g, 1);
        let err = build_slater(&g, &[e[0].clone(), e[0].clone()]).unwrap_err();
        assert!(matches!(err, ManyBodyError::NotOrthonormal(d) if d > 0.9));
    }

    #[test]
    fn slater_is_normalized_and_antisymmetric() {
        let g = GridSpec::with_budget(1, 32, 6.0, 0.5, 2, DEFAULT_BUDGET).unwrap();
        let s = build_slater(&g, &orbitals::shifted_gaussians(&g, 2, 0.8)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!(s.antisymmetry_violation() < 1e-14);
    }
}
