use num_complex::Complex64;

use crate::{annihilate, create, jw_sign, CMatrix, FockError, FockState, MAX_DENSE_MODES};

const ORTHO_TOL: f64 = 1e-10;

/// `a(f) state = sum_y conj f(y) a_y state`.
pub fn a_of(f: &[Complex64], state: &FockState) -> FockState {
    let mut out = state.blank();
    for (y, c) in f.iter().enumerate() {
        if c.norm_sqr() > 0.0 {
            out.axpy(c.conj(), &annihilate(state, y).expect("mode in range"));
        }
    }
    out
}

/// `a*(f) state = sum_y f(y) a*_y state`.
pub fn a_star_of(f: &[Complex64], state: &FockState) -> FockState {
    let mut out = state.blank();
    for (y, c) in f.iter().enumerate() {
        if c.norm_sqr() > 0.0 {
            out.axpy(*c, &create(state, y).expect("mode in range"));
        }
    }
    out
}

/// The pair `(u, v)` generated by an orthonormal family `e_1..e_N`.
#[derive(Clone, Debug)]
pub struct BogoliubovMap {
    /// Columns are the orbitals `e_j`.
    pub family: CMatrix,
    /// `1 - sum_j |e_j><e_j|`.
    pub u: CMatrix,
    /// `sum_j |conj e_j><e_j|`.
    pub v: CMatrix,
}

impl BogoliubovMap {
    pub fn from_family(family: CMatrix) -> Result<Self, FockError> {
        let (m, n) = family.shape();
        if n > m {
            return Err(FockError::FamilyTooLarge { n, modes: m });
        }
        let gram = family.adjoint() * &family;
        let defect = (gram - CMatrix::identity(n, n)).camax();
        if defect > ORTHO_TOL {
            return Err(FockError::NotOrthonormal(defect));
        }
        let omega = &family * family.adjoint();
        let u = CMatrix::identity(m, m) - &omega;
        let v = family.conjugate() * family.adjoint();
        Ok(Self { family, u, v })
    }

    pub fn modes(&self) -> usize {
        self.family.nrows()
    }

    pub fn particles(&self) -> usize {
        self.family.ncols()
    }

    /// `omega = sum_j |e_j><e_j|`.
    pub fn omega(&self) -> CMatrix {
        &self.family * self.family.adjoint()
    }

    /// Orthonormal basis of the mode space whose first `N` columns are the family.
    pub fn completed_basis(&self) -> CMatrix {
        let m = self.modes();
        let n = self.particles();
        let mut cols: Vec<nalgebra::DVector<Complex64>> =
            (0..n).map(|j| self.family.column(j).into_owned()).collect();
        for k in 0..m {
            if cols.len() == m {
                break;
            }
            let mut w = nalgebra::DVector::<Complex64>::zeros(m);
            w[k] = Complex64::new(1.0, 0.0);
            // Two passes of Gram-Schmidt for stability.
            for _ in 0..2 {
                for c in &cols {
                    let proj = c.dotc(&w);
                    w -= c * proj;
                }
            }
            let nrm = w.norm();
            if nrm > 1e-8 {
                cols.push(w / Complex64::new(nrm, 0.0));
            }
        }
        CMatrix::from_columns(&cols)
    }

    /// The unitary `R` with `R* a_x R = a(u_x) + a*(conj v_x)` and
    /// `R Omega = a*(e_1) ... a*(e_N) Omega`.
    pub fn unitary(&self) -> Result<DenseUnitary, FockError> {
        let m = self.modes();
        let n = self.particles();
        if m > MAX_DENSE_MODES {
            return Err(FockError::DenseTooLarge(m));
        }
        let dim = 1usize << m;
        let basis = self.completed_basis();
        let cols: Vec<Vec<Complex64>> = (0..m)
            .map(|k| basis.column(k).iter().copied().collect())
            .collect();
        // Second quantization of the basis change: |S> -> prod_{i in S} a*(e_i) Omega.
        let mut g = CMatrix::zeros(dim, dim);
        for mask in 0..dim {
            let mut s = FockState::vacuum(m)?;
            for i in (0..m).rev() {
                if mask & (1 << i) != 0 {
                    s = a_star_of(&cols[i], &s);
                }
            }
            for (r, a) in s.amplitudes().iter().enumerate() {
                g[(r, mask)] = *a;
            }
        }
        // Particle-hole map on the first N standard modes: Majoranas then a parity.
        let mut r_std = CMatrix::zeros(dim, dim);
        let low = (1usize << n) - 1;
        for mask in 0..dim {
            let q_mask = if n % 2 == 0 { mask & low } else { mask & !low };
            let mut sign = if q_mask.count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let mut cur = mask;
            for j in (0..n).rev() {
                // gamma_j = a_j + a*_j flips bit j with the Jordan-Wigner sign.
                sign *= jw_sign(cur, j);
                cur ^= 1 << j;
            }
            r_std[(cur, mask)] = Complex64::new(sign, 0.0);
        }
        let r = &g * r_std * g.adjoint();
        Ok(DenseUnitary {
            modes: m,
            matrix: r,
        })
    }
}

/// `R* a_x R` and its adjoint as explicit actions.
#[derive(Clone, Debug)]
pub struct ConjugatedMode {
    pub mode: usize,
    /// Column `x` of `u`.
    pub u_x: Vec<Complex64>,
    /// Column `x` of `conj v`.
    pub vbar_x: Vec<Complex64>,
}

impl ConjugatedMode {
    /// `(a(u_x) + a*(vbar_x)) state`.
    pub fn annihilation(&self, state: &FockState) -> FockState {
        let mut out = a_of(&self.u_x, state);
        out.axpy(Complex64::new(1.0, 0.0), &a_star_of(&self.vbar_x, state));
        out
    }

    /// `(a*(u_x) + a(vbar_x)) state`.
    pub fn creation(&self, state: &FockState) -> FockState {
        let mut out = a_star_of(&self.u_x, state);
        out.axpy(Complex64::new(1.0, 0.0), &a_of(&self.vbar_x, state));
        out
    }
}

pub fn bogoliubov_conjugate(map: &BogoliubovMap, mode: usize) -> Result<ConjugatedMode, FockError> {
    if mode >= map.modes() {
        return Err(FockError::BadMode {
            mode,
            modes: map.modes(),
        });
    }
    Ok(ConjugatedMode {
        mode,
        u_x: map.u.column(mode).iter().copied().collect(),
        vbar_x: map.v.column(mode).iter().map(|c| c.conj()).collect(),
    })
}

/// Dense unitary on the full Fock space.
#[derive(Clone, Debug)]
pub struct DenseUnitary {
    pub modes: usize,
    pub matrix: CMatrix,
}

impl DenseUnitary {
    pub fn apply(&self, state: &FockState) -> FockState {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        let w = &self.matrix * v;
        FockState::from_amplitudes(self.modes, w.iter().copied().collect()).expect("same dims")
    }

    pub fn apply_adjoint(&self, state: &FockState) -> FockState {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        let w = self.matrix.ad_mul(&v);
        FockState::from_amplitudes(self.modes, w.iter().copied().collect()).expect("same dims")
    }

    /// `max |R* R - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        (self.matrix.ad_mul(&self.matrix) - CMatrix::identity(n, n)).camax()
    }
}

/// `gamma(x;y) = <Psi, a*_y a_x Psi>`.
pub fn gamma1(state: &FockState) -> CMatrix {
    let m = state.modes();
    let ann: Vec<FockState> = (0..m).map(|x| annihilate(state, x).unwrap()).collect();
    CMatrix::from_fn(m, m, |x, y| ann[y].inner(&ann[x]))
}

/// `gamma2(x1,x2;y1,y2) = <Psi, a*_y1 a*_y2 a_x2 a_x1 Psi>`.
pub fn gamma2_entry(state: &FockState, x1: usize, x2: usize, y1: usize, y2: usize) -> Complex64 {
    let ax = annihilate(&annihilate(state, x1).unwrap(), x2).unwrap();
    let ay = annihilate(&annihilate(state, y1).unwrap(), y2).unwrap();
    ay.inner(&ax)
}

/// `D[(u*M + w)*M + y] = gamma2(u,y;w,y)`.
pub fn pair_diagonal(state: &FockState) -> Vec<Complex64> {
    let m = state.modes();
    let ann: Vec<FockState> = (0..m).map(|x| annihilate(state, x).unwrap()).collect();
    let two: Vec<Vec<FockState>> = ann
        .iter()
        .map(|s| (0..m).map(|y| annihilate(s, y).unwrap()).collect())
        .collect();
    let mut d = vec![Complex64::new(0.0, 0.0); m * m * m];
    for u in 0..m {
        for w in 0..m {
            for y in 0..m {
                d[(u * m + w) * m + y] = two[w][y].inner(&two[u][y]);
            }
        }
    }
    d
}
