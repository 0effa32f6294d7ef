use std::io::Write;
use std::path::Path;

use husimi_grid::GridSpec;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{ManyBodyError, ManyBodyState};

/// One-body kernel `gamma(x;y)` sampled on the grid.
///
/// Entries are kernel values; the operator acts as `sum_y gamma(x;y) f(y) dx`.
#[derive(Clone, Debug)]
pub struct OneBodyKernel {
    pub dx: f64,
    pub kernel: DMatrix<Complex64>,
}

impl OneBodyKernel {
    pub fn new(dx: f64, kernel: DMatrix<Complex64>) -> Self {
        Self { dx, kernel }
    }

    /// `sum_j e_j(x) conj e_j(y)`.
    pub fn from_orbitals(grid: &GridSpec, orbitals: &[Vec<Complex64>]) -> Self {
        let m = grid.m;
        let e = DMatrix::from_fn(m, orbitals.len(), |x, j| orbitals[j][x]);
        Self::new(grid.dx, &e * e.adjoint())
    }

    pub fn m(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.kernel[(x, y)]
    }

    pub fn trace(&self) -> Complex64 {
        self.kernel.trace() * self.dx
    }

    pub fn density(&self) -> Vec<f64> {
        (0..self.m()).map(|x| self.kernel[(x, x)].re).collect()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.kernel - self.kernel.adjoint()).camax()
    }

    /// Matrix of the operator in the orthonormal basis `delta_x / sqrt(dx)`.
    pub fn operator(&self) -> DMatrix<Complex64> {
        &self.kernel * Complex64::new(self.dx, 0.0)
    }

    /// Eigenvalues of the operator, ascending.
    pub fn occupations(&self) -> Vec<f64> {
        let h = (self.operator() + self.operator().adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Hilbert-Schmidt and trace norms of the operator difference `self - other`.
    pub fn norm_gaps(&self, other: &Self) -> (f64, f64) {
        let d = self.operator() - other.operator();
        let sv = d.singular_values();
        let hs = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
        let tr = sv.iter().sum();
        (hs, tr)
    }

    /// Writes `x,density` rows.
    pub fn write_density_csv(&self, grid: &GridSpec, path: &Path) -> Result<(), ManyBodyError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "x,density")?;
        for (j, r) in self.density().iter().enumerate() {
            writeln!(f, "{:.17e},{:.17e}", grid.position(j), r)?;
        }
        f.flush()?;
        Ok(())
    }
}

/// `gamma1(x;y) = N sum_r dx^(N-1) psi(x,r) conj psi(y,r)`.
pub fn gamma1(state: &ManyBodyState) -> OneBodyKernel {
    let n = state.n();
    let m = state.m();
    let rest = m.pow(n as u32 - 1);
    // Column-major view of the row-major amplitudes: a (rest x m) matrix whose column x is psi(x, .).
    let a = DMatrix::from_column_slice(rest, m, &state.amps);
    let w = n as f64 * state.grid.dx.powi(n as i32 - 1);
    let k = a.transpose() * a.conjugate() * Complex64::new(w, 0.0);
    OneBodyKernel::new(state.grid.dx, k)
}

/// `gamma2(u1,u2;w1,w2) = N(N-1) sum_r dx^(N-2) psi(u1,u2,r) conj psi(w1,w2,r)`.
pub fn gamma2_entry(
    state: &ManyBodyState,
    u1: usize,
    u2: usize,
    w1: usize,
    w2: usize,
) -> Complex64 {
    let n = state.n();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let m = state.m();
    let rest = m.pow(n as u32 - 2);
    let a = &state.amps[(u1 * m + u2) * rest..][..rest];
    let b = &state.amps[(w1 * m + w2) * rest..][..rest];
    let s: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    s * (n * (n - 1)) as f64 * state.grid.dx.powi(n as i32 - 2)
}

/// The pair-diagonal slice `D(u,w,y) = gamma2(u,y;w,y)`.
#[derive(Clone, Debug)]
pub struct PairDiagonal {
    pub m: usize,
    pub dx: f64,
    pub data: Vec<Complex64>,
}

impl PairDiagonal {
    #[inline]
    pub fn get(&self, u: usize, w: usize, y: usize) -> Complex64 {
        self.data[(u * self.m + w) * self.m + y]
    }

    /// `sum_y D(u,w,y) dx`, which equals `(N-1) gamma1`.
    pub fn partial_trace(&self) -> OneBodyKernel {
        let m = self.m;
        let k = DMatrix::from_fn(m, m, |u, w| {
            (0..m).map(|y| self.get(u, w, y)).sum::<Complex64>() * self.dx
        });
        OneBodyKernel::new(self.dx, k)
    }

    /// Builds `D` from an explicit two-body kernel accessor (used by the Fock path).
    pub fn from_fn(m: usize, dx: f64, f: impl Fn(usize, usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(m * m * m);
        for u in 0..m {
            for w in 0..m {
                for y in 0..m {
                    data.push(f(u, w, y));
                }
            }
        }
        Self { m, dx, data }
    }
}

/// Pair-diagonal slice of `gamma2`, `O(M^3)` memory at `O(M^(N+1))` cost.
pub fn pair_diagonal(state: &ManyBodyState) -> PairDiagonal {
    let n = state.n();
    let m = state.m();
    let mut data = vec![Complex64::new(0.0, 0.0); m * m * m];
    if n < 2 {
        return PairDiagonal {
            m,
            dx: state.grid.dx,
            data,
        };
    }
    let rest = m.pow(n as u32 - 2);
    let w = (n * (n - 1)) as f64 * state.grid.dx.powi(n as i32 - 2);
    let mut b = DMatrix::<Complex64>::zeros(rest, m);
    for y in 0..m {
        for u in 0..m {
            let src = &state.amps[(u * m + y) * rest..][..rest];
            b.column_mut(u).copy_from_slice(src);
        }
        // g[(u, w)] = sum_r psi(u,y,r) conj psi(w,y,r)
        let g = b.transpose() * b.conjugate();
        for u in 0..m {
            for ww in 0..m {
                data[(u * m + ww) * m + y] = g[(u, ww)] * w;
            }
        }
    }
    PairDiagonal {
        m,
        dx: state.grid.dx,
        data,
    }
}

fn refuse_dense(state: &ManyBodyState) -> Result<(), ManyBodyError> {
    let dn = state.grid.d * state.n();
    if dn > 2 {
        let entries = (state.m() as u128).pow(4 * state.grid.d as u32);
        return Err(ManyBodyError::DenseRefused {
            dn,
            entries,
            bytes: entries * 16,
        });
    }
    Ok(())
}

/// Dense `gamma2`, index `((u1 M + u2) M + w1) M + w2`; only for `d N <= 2`.
pub fn gamma2_dense(state: &ManyBodyState) -> Result<Vec<Complex64>, ManyBodyError> {
    refuse_dense(state)?;
    let m = state.m();
    let mut out = Vec::with_capacity(m * m * m * m);
    for u1 in 0..m {
        for u2 in 0..m {
            for w1 in 0..m {
                for w2 in 0..m {
                    out.push(gamma2_entry(state, u1, u2, w1, w2));
                }
            }
        }
    }
    Ok(out)
}

/// `sum F(u1,u2,w1,w2) gamma2(u1,u2;w1,w2) dx^4`; a full four-index functional
/// needs the dense kernel and is refused for `d N > 2`.
pub fn gamma2_contract(
    state: &ManyBodyState,
    f: impl Fn(usize, usize, usize, usize) -> Complex64,
) -> Result<Complex64, ManyBodyError> {
    refuse_dense(state)?;
    let m = state.m();
    let mut s = Complex64::new(0.0, 0.0);
    for u1 in 0..m {
        for u2 in 0..m {
            for w1 in 0..m {
                for w2 in 0..m {
                    let c = f(u1, u2, w1, w2);
                    if c != Complex64::new(0.0, 0.0) {
                        s += c * gamma2_entry(state, u1, u2, w1, w2);
                    }
                }
            }
        }
    }
    Ok(s * state.grid.dx.powi(4))
}
