use num_complex::Complex64;

use crate::{jw_sign, CMatrix, FockError, FockState};

/// One-body operator with its three norms cached.
#[derive(Clone, Debug)]
pub struct OneBodyOperator {
    pub matrix: CMatrix,
    pub op_norm: f64,
    pub hs_norm: f64,
    pub tr_norm: f64,
}

impl OneBodyOperator {
    pub fn new(matrix: CMatrix) -> Self {
        let sv = matrix.clone().singular_values();
        let op_norm = sv.iter().fold(0.0, |a: f64, s| a.max(*s));
        let hs_norm = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
        let tr_norm = sv.iter().sum();
        Self {
            matrix,
            op_norm,
            hs_norm,
            tr_norm,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `Tr(O w)`.
    pub fn trace_against(&self, w: &CMatrix) -> Complex64 {
        (&self.matrix * w).trace()
    }
}

fn check_dim(o: &CMatrix, state: &FockState) -> Result<(), FockError> {
    if o.nrows() != state.modes() || o.ncols() != state.modes() {
        return Err(FockError::Dimension {
            expected: state.modes(),
            got: o.nrows().max(o.ncols()),
        });
    }
    Ok(())
}

/// `dGamma(O) state = sum_{x,y} O(x;y) a*_x a_y state`.
pub fn d_gamma(o: &CMatrix, state: &FockState) -> Result<FockState, FockError> {
    check_dim(o, state)?;
    let m = state.modes();
    let mut out = state.blank();
    let src = state.amplitudes();
    let dst = out.amplitudes_mut();
    for (mask, &a) in src.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for y in 0..m {
            if mask & (1 << y) == 0 {
                continue;
            }
            let m1 = mask ^ (1 << y);
            let s1 = jw_sign(mask, y);
            for x in 0..m {
                if m1 & (1 << x) != 0 {
                    continue;
                }
                let s = s1 * jw_sign(m1, x);
                dst[m1 | (1 << x)] += o[(x, y)] * a * s;
            }
        }
    }
    Ok(out)
}

/// `sum_{x,y} O(x;y) a_x a_y state`.
pub fn pair_annihilate(o: &CMatrix, state: &FockState) -> Result<FockState, FockError> {
    check_dim(o, state)?;
    let m = state.modes();
    let mut out = state.blank();
    let src = state.amplitudes();
    let dst = out.amplitudes_mut();
    for (mask, &a) in src.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for y in 0..m {
            if mask & (1 << y) == 0 {
                continue;
            }
            let m1 = mask ^ (1 << y);
            let s1 = jw_sign(mask, y);
            for x in 0..m {
                if m1 & (1 << x) == 0 {
                    continue;
                }
                let s = s1 * jw_sign(m1, x);
                dst[m1 ^ (1 << x)] += o[(x, y)] * a * s;
            }
        }
    }
    Ok(out)
}

/// `sum_{x,y} O(x;y) a*_x a*_y state`.
pub fn pair_create(o: &CMatrix, state: &FockState) -> Result<FockState, FockError> {
    check_dim(o, state)?;
    let m = state.modes();
    let mut out = state.blank();
    let src = state.amplitudes();
    let dst = out.amplitudes_mut();
    for (mask, &a) in src.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for y in 0..m {
            if mask & (1 << y) != 0 {
                continue;
            }
            let m1 = mask | (1 << y);
            let s1 = jw_sign(mask, y);
            for x in 0..m {
                if m1 & (1 << x) != 0 {
                    continue;
                }
                let s = s1 * jw_sign(m1, x);
                dst[m1 | (1 << x)] += o[(x, y)] * a * s;
            }
        }
    }
    Ok(out)
}

/// `H = dGamma(K) + 1/(2N) sum_{x,y} V(x,y) a*_x a*_y a_y a_x`.
///
/// The pair term is diagonal in the occupation basis: it equals
/// `1/(2N) sum_{x != y} V(x,y) n_x n_y`.
pub fn hamiltonian_apply(
    state: &FockState,
    kinetic: &CMatrix,
    v: &nalgebra::DMatrix<f64>,
    n: usize,
) -> Result<FockState, FockError> {
    let mut out = d_gamma(kinetic, state)?;
    let m = state.modes();
    if v.nrows() != m || v.ncols() != m {
        return Err(FockError::Dimension {
            expected: m,
            got: v.nrows(),
        });
    }
    let pref = 1.0 / (2.0 * n as f64);
    let src = state.amplitudes();
    for (mask, a) in out.amplitudes_mut().iter_mut().enumerate() {
        let mut e = 0.0;
        for x in 0..m {
            if mask & (1 << x) == 0 {
                continue;
            }
            for y in 0..m {
                if y != x && mask & (1 << y) != 0 {
                    e += v[(x, y)];
                }
            }
        }
        *a += src[mask] * (pref * e);
    }
    Ok(out)
}
