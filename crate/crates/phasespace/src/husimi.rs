use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use husimi_grid::GridSpec;
use husimi_manybody::snapshot::{self, Header};
use husimi_manybody::{ManyBodyError, ManyBodyState, OneBodyKernel};
use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{CoherentFrame, PhaseLattice, PhaseSpaceError};

/// `gamma(x;y) = sum_c w_c B_c(x) conj B_c(y)`.
///
/// Weights are kept signed, so a kernel that is not positive still
/// transforms faithfully.
#[derive(Clone, Debug)]
pub struct Factorized {
    pub weights: Vec<f64>,
    pub columns: Vec<Vec<Complex64>>,
    pub dx: f64,
}

impl Factorized {
    /// Unit weights on the given orbitals.
    pub fn from_orbitals(grid: &GridSpec, orbitals: &[Vec<Complex64>]) -> Self {
        Self {
            weights: vec![1.0; orbitals.len()],
            columns: orbitals.to_vec(),
            dx: grid.dx,
        }
    }

    /// Eigen-decomposition of the operator `gamma dx`; eigenvalues below
    /// `1e-14` of the largest are dropped.
    pub fn from_kernel(kernel: &OneBodyKernel) -> Self {
        let op = kernel.operator();
        let h = (&op + op.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let scale = 1.0 / kernel.dx.sqrt();
        let mut weights = Vec::new();
        let mut columns = Vec::new();
        for (c, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam.abs() <= 1e-14 * top {
                continue;
            }
            weights.push(lam);
            columns.push(
                eig.eigenvectors
                    .column(c)
                    .iter()
                    .map(|z| z * scale)
                    .collect(),
            );
        }
        Self {
            weights,
            columns,
            dx: kernel.dx,
        }
    }

    pub fn m(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn trace(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.columns)
            .map(|(w, b)| w * b.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx)
            .sum()
    }

    /// `<g, gamma g>` for an arbitrary vector on the grid.
    pub fn quadratic_form(&self, g: &[Complex64]) -> f64 {
        self.weights
            .iter()
            .zip(&self.columns)
            .map(|(w, b)| {
                let a: Complex64 = g.iter().zip(b).map(|(g, b)| g.conj() * b).sum();
                w * (a * self.dx).norm_sqr()
            })
            .sum()
    }
}

/// Husimi values `m(q_i, p_j)` stored row-major in `(q, p)`.
#[derive(Clone, Debug)]
pub struct HusimiField {
    pub qs: Vec<f64>,
    pub ps: Vec<f64>,
    pub dq: f64,
    pub dp: f64,
    pub hbar: f64,
    pub k: usize,
    pub values: Vec<f64>,
    /// Lattice spacing exceeded `sqrt(hbar)`.
    pub undersampled: bool,
}

impl HusimiField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ps.len() + j]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(1/(2 pi hbar)) sum m dq dp`.
    pub fn mass(&self) -> f64 {
        self.integrate(|_, _| 1.0)
    }

    /// `(1/(2 pi hbar)) sum w(q,p) m dq dp`.
    pub fn integrate(&self, w: impl Fn(f64, f64) -> f64) -> f64 {
        let mut s = 0.0;
        for (i, &q) in self.qs.iter().enumerate() {
            for (j, &p) in self.ps.iter().enumerate() {
                s += w(q, p) * self.get(i, j);
            }
        }
        s * self.dq * self.dp / (2.0 * std::f64::consts::PI * self.hbar)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), PhaseSpaceError> {
        write_field_csv(path, &self.qs, &self.ps, &self.values)
    }

    /// Snapshot with version `0x0100 | k`; `M` holds the q-count and `N` the p-count.
    pub fn write_snapshot(&self, path: &Path, time: f64) -> Result<(), PhaseSpaceError> {
        let header = Header {
            version: 0x0100 | self.k as u16,
            d: 1,
            m: self.qs.len() as u32,
            n: self.ps.len() as u32,
            time,
            hbar: self.hbar,
        };
        let data: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        let mut f =
            std::io::BufWriter::new(std::fs::File::create(path).map_err(ManyBodyError::from)?);
        snapshot::write(&mut f, &header, &data)?;
        f.flush().map_err(ManyBodyError::from)?;
        Ok(())
    }
}

pub(crate) fn write_field_csv(
    path: &Path,
    qs: &[f64],
    ps: &[f64],
    values: &[f64],
) -> Result<(), PhaseSpaceError> {
    let io = |e: std::io::Error| PhaseSpaceError::from(ManyBodyError::from(e));
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(f, "q,p,value").map_err(io)?;
    for (i, q) in qs.iter().enumerate() {
        for (j, p) in ps.iter().enumerate() {
            writeln!(f, "{q:.17e},{p:.17e},{:.17e}", values[i * ps.len() + j]).map_err(io)?;
        }
    }
    f.flush().map_err(io)?;
    Ok(())
}

fn check_grid(frame: &CoherentFrame, m: usize, dx: f64) -> Result<(), PhaseSpaceError> {
    if frame.grid.m != m || (frame.grid.dx - dx).abs() > 1e-14 * dx {
        return Err(PhaseSpaceError::Mismatch(format!(
            "frame has M={} dx={}, kernel has M={m} dx={dx}",
            frame.grid.m, frame.grid.dx
        )));
    }
    Ok(())
}

/// `(-1)^k` sign that moves the FFT origin from `x_0` to `x = 0`.
fn origin_sign(grid: &GridSpec, slot: usize) -> f64 {
    if grid.momentum_index(slot).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `m(q,p) = <f_{q,p}, gamma f_{q,p}>` on the lattice.
///
/// Lattices built from grid strides use one FFT per `q` and column; custom
/// lattices fall back to the direct quadratic form.
pub fn husimi1(
    gamma: &Factorized,
    frame: &CoherentFrame,
    lattice: &PhaseLattice,
) -> Result<HusimiField, PhaseSpaceError> {
    let grid = &frame.grid;
    check_grid(frame, gamma.m(), gamma.dx)?;
    let values = match (&lattice.q_index, &lattice.p_index) {
        (Some(_), Some(p_index)) => husimi1_fast(gamma, frame, lattice, p_index),
        _ => husimi1_direct_values(gamma, frame, lattice),
    };
    Ok(HusimiField {
        qs: lattice.qs.clone(),
        ps: lattice.ps.clone(),
        dq: lattice.dq,
        dp: lattice.dp,
        hbar: grid.hbar,
        k: 1,
        values,
        undersampled: lattice.undersampled(grid.hbar),
    })
}

/// Direct evaluation at every lattice point; kept as the oracle for the FFT path.
pub fn husimi1_direct(
    gamma: &Factorized,
    frame: &CoherentFrame,
    lattice: &PhaseLattice,
) -> Result<HusimiField, PhaseSpaceError> {
    check_grid(frame, gamma.m(), gamma.dx)?;
    Ok(HusimiField {
        qs: lattice.qs.clone(),
        ps: lattice.ps.clone(),
        dq: lattice.dq,
        dp: lattice.dp,
        hbar: frame.hbar,
        k: 1,
        values: husimi1_direct_values(gamma, frame, lattice),
        undersampled: lattice.undersampled(frame.hbar),
    })
}

fn husimi1_direct_values(
    gamma: &Factorized,
    frame: &CoherentFrame,
    lattice: &PhaseLattice,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(lattice.len());
    for &q in &lattice.qs {
        for &p in &lattice.ps {
            out.push(gamma.quadratic_form(&frame.vector(q, p)));
        }
    }
    out
}

fn husimi1_fast(
    gamma: &Factorized,
    frame: &CoherentFrame,
    lattice: &PhaseLattice,
    p_index: &[usize],
) -> Vec<f64> {
    let grid = &frame.grid;
    let m = grid.m;
    let fft = FftPlanner::new().plan_fft_forward(m);
    let signs: Vec<f64> = p_index.iter().map(|&s| origin_sign(grid, s)).collect();
    let np = lattice.ps.len();
    let mut out = vec![0.0; lattice.len()];
    let mut buf = vec![Complex64::default(); m];
    for (i, &q) in lattice.qs.iter().enumerate() {
        let f = frame.window_on_grid(q);
        let row = &mut out[i * np..(i + 1) * np];
        for (w, b) in gamma.weights.iter().zip(&gamma.columns) {
            for x in 0..m {
                buf[x] = b[x] * f[x];
            }
            fft.process(&mut buf);
            for (j, &slot) in p_index.iter().enumerate() {
                row[j] += w * (buf[slot] * (gamma.dx * signs[j])).norm_sqr();
            }
        }
    }
    out
}

/// Results of the two-particle Husimi checks.
#[derive(Clone, Debug)]
pub struct Husimi2Report {
    /// `max |m2(z1,z2) - m2(z2,z1)|` over the sampled pairs.
    pub symmetry_defect: f64,
    /// `max |(1/(2 pi hbar)) int m2(z1, .) - (N-1) m1(z1)|` over the sampled points.
    pub marginal_defect: f64,
    pub pairs: usize,
    pub points: usize,
    /// `(1/(2 pi)^2) int int m2` and its expected value `N(N-1)/N^2`, only
    /// when `hbar N = 1`.
    pub normalization: Option<(f64, f64)>,
}

struct Husimi2<'a> {
    state: &'a ManyBodyState,
    frame: &'a CoherentFrame,
    fft: Arc<dyn Fft<f64>>,
}

impl<'a> Husimi2<'a> {
    fn new(state: &'a ManyBodyState, frame: &'a CoherentFrame) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(state.m());
        Self { state, frame, fft }
    }

    fn rest(&self) -> usize {
        self.state.m().pow(self.state.n() as u32 - 2)
    }

    fn prefactor(&self) -> f64 {
        let n = self.state.n() as f64;
        n * (n - 1.0) * self.state.grid.dx.powi(self.state.n() as i32 - 2)
    }

    /// `Phi(x2, r) = sum_x1 dx conj g(x1) psi(x1, x2, r)`, row-major `(x2, r)`.
    fn contract_first(&self, g: &[Complex64]) -> Vec<Complex64> {
        let m = self.state.m();
        let inner = m * self.rest();
        let mut phi = vec![Complex64::default(); inner];
        for (x1, gx) in g.iter().enumerate() {
            let c = gx.conj() * self.state.grid.dx;
            if c == Complex64::default() {
                continue;
            }
            let block = &self.state.amps[x1 * inner..(x1 + 1) * inner];
            for (p, a) in phi.iter_mut().zip(block) {
                *p += c * a;
            }
        }
        phi
    }

    fn value(&self, z1: (f64, f64), z2: (f64, f64)) -> f64 {
        let phi = self.contract_first(&self.frame.vector(z1.0, z1.1));
        let g2 = self.frame.vector(z2.0, z2.1);
        let rest = self.rest();
        let mut s = 0.0;
        for r in 0..rest {
            let a: Complex64 = g2
                .iter()
                .enumerate()
                .map(|(x2, g)| g.conj() * phi[x2 * rest + r])
                .sum();
            s += (a * self.state.grid.dx).norm_sqr();
        }
        self.prefactor() * s
    }

    /// `(1/(2 pi hbar)) sum_{q2 on grid, p2 on the full momentum lattice} m2(z1, z2) dq dp`.
    fn marginal(&self, z1: (f64, f64)) -> f64 {
        let grid = &self.state.grid;
        let m = grid.m;
        let rest = self.rest();
        let phi = self.contract_first(&self.frame.vector(z1.0, z1.1));
        let mut buf = vec![Complex64::default(); m];
        let mut s = 0.0;
        for q2 in grid.positions() {
            let f = self.frame.window_on_grid(q2);
            for r in 0..rest {
                for x2 in 0..m {
                    buf[x2] = f[x2] * phi[x2 * rest + r];
                }
                self.fft.process(&mut buf);
                s += buf.iter().map(|z| (z * grid.dx).norm_sqr()).sum::<f64>();
            }
        }
        self.prefactor() * s * grid.dx * grid.dp() / (2.0 * std::f64::consts::PI * grid.hbar)
    }
}

/// Symmetry and marginal identity of the two-particle Husimi function at the
/// given sample points; `pairs` are `(z1, z2)` and `points` are `z1`.
///
/// The normalization `(1/(2 pi)^2) int int m2 = N(N-1)/N^2` only holds on the
/// coupled family and is evaluated on `lattice` when `hbar N = 1`.
pub fn husimi2_marginal_check(
    state: &ManyBodyState,
    frame: &CoherentFrame,
    pairs: &[((f64, f64), (f64, f64))],
    points: &[(f64, f64)],
    lattice: Option<&PhaseLattice>,
) -> Result<Husimi2Report, PhaseSpaceError> {
    state.grid.require_1d()?;
    check_grid(frame, state.m(), state.grid.dx)?;
    if state.n() < 2 {
        return Err(PhaseSpaceError::Mismatch("m2 needs N >= 2".into()));
    }
    let h2 = Husimi2::new(state, frame);
    let mut symmetry_defect = 0.0f64;
    for &(z1, z2) in pairs {
        symmetry_defect = symmetry_defect.max((h2.value(z1, z2) - h2.value(z2, z1)).abs());
    }
    let gamma = Factorized::from_kernel(&husimi_manybody::gamma1(state));
    let n = state.n() as f64;
    let mut marginal_defect = 0.0f64;
    for &z in points {
        let m1 = gamma.quadratic_form(&frame.vector(z.0, z.1));
        marginal_defect = marginal_defect.max((h2.marginal(z) - (n - 1.0) * m1).abs());
    }
    let normalization = match lattice {
        Some(lat) if (state.grid.hbar * n - 1.0).abs() < 1e-12 => {
            let mut s = 0.0;
            for &q in &lat.qs {
                for &p in &lat.ps {
                    s += h2.marginal((q, p));
                }
            }
            let hbar = state.grid.hbar;
            // The inner marginal already carries 1/(2 pi hbar).
            let total = s * lat.dq * lat.dp * hbar / (2.0 * std::f64::consts::PI);
            Some((total, n * (n - 1.0) / (n * n)))
        }
        _ => None,
    };
    Ok(Husimi2Report {
        symmetry_defect,
        marginal_defect,
        pairs: pairs.len(),
        points: points.len(),
        normalization,
    })
}

/// `m2(z1, z2)` at a single pair of phase-space points.
pub fn husimi2_value(
    state: &ManyBodyState,
    frame: &CoherentFrame,
    z1: (f64, f64),
    z2: (f64, f64),
) -> Result<f64, PhaseSpaceError> {
    state.grid.require_1d()?;
    check_grid(frame, state.m(), state.grid.dx)?;
    if state.n() < 2 {
        return Err(PhaseSpaceError::Mismatch("m2 needs N >= 2".into()));
    }
    Ok(Husimi2::new(state, frame).value(z1, z2))
}
