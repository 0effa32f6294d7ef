use std::sync::Arc;

use husimi_grid::{gauss_legendre8, GridSpec, Potential, TestFunction};
use husimi_manybody::{OneBodyKernel, PairDiagonal};
use husimi_phasespace::{husimi1, CoherentFrame, Factorized, PhaseLattice};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::ResidueError;

type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Every term of the reformulated Husimi equation sampled on a phase-space
/// lattice, stored row-major over `(q, p)`.
///
/// With `g = g_{q,p}` and `<a(h) Psi, a(g) Psi> = <g, gamma h>`:
/// `kinetic = hbar Im <g, gamma d_q g>`, and the interaction splits as
/// `main + semiclassical + meanfield`, whose `p`-derivative is the
/// two-body part of `d_t m`.
#[derive(Clone, Debug)]
pub struct ResidueFields {
    pub qs: Vec<f64>,
    pub ps: Vec<f64>,
    pub dq: f64,
    pub dp: f64,
    pub hbar: f64,
    pub n: usize,
    pub m: Vec<f64>,
    pub dq_m: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub dq_kinetic: Vec<f64>,
    pub main: Vec<f64>,
    pub semiclassical: Vec<f64>,
    pub meanfield: Vec<f64>,
    pub dp_main: Vec<f64>,
    pub dp_semiclassical: Vec<f64>,
    pub dp_meanfield: Vec<f64>,
}

impl ResidueFields {
    pub fn np(&self) -> usize {
        self.ps.len()
    }

    /// `sum phi(q) varphi(p) X dq dp` with the test functions evaluated at
    /// derivative orders `kq` and `kp`.
    pub fn pair(
        &self,
        x: &[f64],
        phi_q: &TestFunction,
        kq: usize,
        phi_p: &TestFunction,
        kp: usize,
    ) -> f64 {
        let fq: Vec<f64> = self.qs.iter().map(|&q| phi_q.eval(q, kq)).collect();
        let fp: Vec<f64> = self.ps.iter().map(|&p| phi_p.eval(p, kp)).collect();
        let np = self.np();
        let mut s = 0.0;
        for (iq, a) in fq.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            let row = &x[iq * np..][..np];
            s += a * row.iter().zip(&fp).map(|(v, b)| v * b).sum::<f64>();
        }
        s * self.dq * self.dp
    }

    /// `int dq |int dp |kinetic||` and `|| int dp |kinetic| ||_{L^{5/4}(dq)}`.
    pub fn kinetic_aggregates(&self) -> (f64, f64) {
        let np = self.np();
        let cols: Vec<f64> = self
            .kinetic
            .chunks_exact(np)
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>() * self.dp)
            .collect();
        let l1 = cols.iter().sum::<f64>() * self.dq;
        let l54 = (cols.iter().map(|c| c.powf(1.25)).sum::<f64>() * self.dq).powf(0.8);
        (l1, l54)
    }
}

/// Lattice quadratic forms `sum_{x,y} a(x) T(x,y) b(y) e^{-i p (x-y)/hbar} dx^2`
/// for every momentum slot at once: the sum over `x - y` diagonals is one FFT.
pub(crate) struct FormEvaluator {
    m: usize,
    dx: f64,
    fft: Arc<dyn Fft<f64>>,
    slots: Vec<usize>,
}

impl FormEvaluator {
    pub(crate) fn new(grid: &GridSpec, slots: Vec<usize>) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(grid.m);
        Self {
            m: grid.m,
            dx: grid.dx,
            fft,
            slots,
        }
    }

    pub(crate) fn form(&self, t: &CMat, a: &[f64], b: &[f64]) -> Vec<Complex64> {
        let m = self.m;
        let mut diag = vec![ZERO; m];
        for i in 0..m {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                if b[j] == 0.0 {
                    continue;
                }
                diag[(i + m - j) % m] += t[(i, j)] * (a[i] * b[j]);
            }
        }
        self.fft.process(&mut diag);
        let w = self.dx * self.dx;
        self.slots.iter().map(|&k| diag[k] * w).collect()
    }

    /// `d/dp` of `form(t, a, a)`, using the unwrapped positions `xt`.
    pub(crate) fn dp_form(&self, t: &CMat, a: &[f64], xt: &[f64], hbar: f64) -> Vec<f64> {
        let xa: Vec<f64> = a.iter().zip(xt).map(|(w, x)| w * x).collect();
        let l = self.form(t, &xa, a);
        let r = self.form(t, a, &xa);
        l.iter()
            .zip(&r)
            .map(|(u, v)| ((u - v) * Complex64::new(0.0, -1.0 / hbar)).re)
            .collect()
    }
}

/// Windows of `g_{q,p}` and its `q`-derivatives at one lattice row.
pub(crate) struct Windows {
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
    pub d2w: Vec<f64>,
    /// Unwrapped positions `q + wrap(x - q)`.
    pub xt: Vec<f64>,
}

impl Windows {
    pub(crate) fn at(frame: &CoherentFrame, q: f64) -> Self {
        let s = frame.hbar.sqrt();
        let grid = &frame.grid;
        Self {
            w: frame.window_derivative(q, 0),
            dw: frame
                .window_derivative(q, 1)
                .into_iter()
                .map(|v| -v / s)
                .collect(),
            d2w: frame
                .window_derivative(q, 2)
                .into_iter()
                .map(|v| v / frame.hbar)
                .collect(),
            xt: grid
                .positions()
                .iter()
                .map(|&x| q + grid.wrap(x - q))
                .collect(),
        }
    }
}

pub(crate) fn fast_lattice(lattice: &PhaseLattice) -> Result<(&[usize], &[usize]), ResidueError> {
    match (&lattice.q_index, &lattice.p_index) {
        (Some(qi), Some(pi)) => Ok((qi, pi)),
        _ => Err(ResidueError::Lattice(
            "residue fields need a strided grid lattice".into(),
        )),
    }
}

/// Interaction data: the pair diagonal and the pair-force gradient.
pub struct Interaction<'a> {
    pub pair: &'a PairDiagonal,
    pub grad: Box<dyn Fn(f64) -> f64 + 'a>,
}

impl<'a> Interaction<'a> {
    pub fn from_potential(pair: &'a PairDiagonal, v: &'a Potential) -> Self {
        Self {
            pair,
            grad: Box::new(move |x| v.grad_at(x)),
        }
    }
}

/// Two-body kernels contracted over the third variable.
struct TwoBodyKernels {
    /// `c sum_z S(x,y,z) D(x,y,z) dx`, with `S` the segment average of `V'`.
    segment: CMat,
    /// `|g_{x_j}(z)|^2`, indexed `[j][z]`.
    window_sq: Vec<Vec<f64>>,
}

fn pair_range(frame: &CoherentFrame) -> f64 {
    let grid = &frame.grid;
    (2.0 * frame.window.reach() * frame.hbar.sqrt()).min(0.5 * grid.l)
}

fn two_body_kernels(frame: &CoherentFrame, inter: &Interaction) -> TwoBodyKernels {
    let grid = &frame.grid;
    let m = grid.m;
    let dx = grid.dx;
    let xs = grid.positions();
    let window_sq: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            frame
                .window_on_grid(xs[j])
                .into_iter()
                .map(|v| v * v)
                .collect()
        })
        .collect();
    // Coherent-state resolution constant `c = sum_j |g_{x_j}(z)|^2 dx`.
    let resolution = (0..m).map(|j| window_sq[j][0]).sum::<f64>() * dx;
    let gl = gauss_legendre8();
    let range = pair_range(frame);
    let pair = inter.pair;
    let mut segment = CMat::zeros(m, m);
    for x in 0..m {
        for y in 0..m {
            let h = grid.wrap(xs[x] - xs[y]);
            if h.abs() > range {
                continue;
            }
            let mut acc = ZERO;
            for z in 0..m {
                let s: f64 = gl
                    .iter()
                    .map(|&(t, w)| w * (inter.grad)(xs[y] + t * h - xs[z]))
                    .sum();
                acc += pair.get(x, y, z) * s;
            }
            segment[(x, y)] = acc * (resolution * dx);
        }
    }
    TwoBodyKernels { segment, window_sq }
}

/// Evaluates every field. `inter = None` means `V = 0`, where all interaction
/// fields are identically zero.
pub fn residue_fields(
    frame: &CoherentFrame,
    gamma: &OneBodyKernel,
    inter: Option<&Interaction>,
    n: usize,
    lattice: &PhaseLattice,
) -> Result<ResidueFields, ResidueError> {
    let grid = &frame.grid;
    let m = grid.m;
    if gamma.m() != m {
        return Err(ResidueError::Mismatch(format!(
            "kernel has {} points, grid has {m}",
            gamma.m()
        )));
    }
    let (q_index, p_index) = fast_lattice(lattice)?;
    let eval = FormEvaluator::new(grid, p_index.to_vec());
    let np = p_index.len();
    let total = q_index.len() * np;
    let hbar = frame.hbar;
    let nf = n as f64;
    let mut f = ResidueFields {
        qs: lattice.qs.clone(),
        ps: lattice.ps.clone(),
        dq: lattice.dq,
        dp: lattice.dp,
        hbar,
        n,
        m: Vec::with_capacity(total),
        dq_m: Vec::with_capacity(total),
        kinetic: Vec::with_capacity(total),
        dq_kinetic: Vec::with_capacity(total),
        main: vec![0.0; total],
        semiclassical: vec![0.0; total],
        meanfield: vec![0.0; total],
        dp_main: vec![0.0; total],
        dp_semiclassical: vec![0.0; total],
        dp_meanfield: vec![0.0; total],
    };
    let g = &gamma.kernel;

    let kernels = inter.map(|i| two_body_kernels(frame, i));
    // The main-term force `V' * rho` with `rho = kappa int m dp` from the
    // Husimi field on the full lattice.
    let force: Option<Vec<f64>> = match inter {
        Some(i) => {
            let full = PhaseLattice::full(grid);
            let h = husimi1(&Factorized::from_kernel(gamma), frame, &full)?;
            let kappa = 1.0 / (nf * 2.0 * std::f64::consts::PI * hbar);
            let rho: Vec<f64> = h
                .values
                .chunks_exact(m)
                .map(|r| kappa * r.iter().sum::<f64>() * grid.dp())
                .collect();
            let xs = grid.positions();
            Some(
                xs.iter()
                    .map(|&q| {
                        xs.iter()
                            .zip(&rho)
                            .map(|(&q2, r)| (i.grad)(q - q2) * r)
                            .sum::<f64>()
                            * grid.dx
                    })
                    .collect(),
            )
        }
        None => None,
    };
    let range = pair_range(frame);
    let xs = grid.positions();

    for (row, &iq) in q_index.iter().enumerate() {
        let q = grid.position(iq);
        let win = Windows::at(frame, q);
        let mv = eval.form(g, &win.w, &win.w);
        let dqm = eval.form(g, &win.dw, &win.w);
        let kin = eval.form(g, &win.w, &win.dw);
        let dqkin = eval.form(g, &win.w, &win.d2w);
        for k in 0..np {
            f.m.push(mv[k].re);
            f.dq_m.push(2.0 * dqm[k].re);
            f.kinetic.push(hbar * kin[k].im);
            f.dq_kinetic.push(hbar * dqkin[k].im);
        }
        let (Some(inter), Some(kern), Some(force)) = (inter, &kernels, &force) else {
            continue;
        };
        // F(q,z) = sum_j |g_{x_j}(z)|^2 V'(q - x_j) dx
        let grads: Vec<f64> = xs.iter().map(|&xj| (inter.grad)(q - xj)).collect();
        let fz: Vec<f64> = (0..m)
            .map(|z| (0..m).map(|j| kern.window_sq[j][z] * grads[j]).sum::<f64>() * grid.dx)
            .collect();
        let mut tf = CMat::zeros(m, m);
        for x in 0..m {
            for y in 0..m {
                if grid.wrap(xs[x] - xs[y]).abs() > range {
                    continue;
                }
                let base = (x * m + y) * m;
                let d = &inter.pair.data[base..base + m];
                let acc: Complex64 = d.iter().zip(&fz).map(|(a, b)| a * b).sum();
                tf[(x, y)] = acc * grid.dx;
            }
        }
        // sum_z F(q,z) gamma(z,z) dx = N (V' * rho)(q)
        let phi = force[iq] * nf;
        let a_s = eval.form(&kern.segment, &win.w, &win.w);
        let a_f = eval.form(&tf, &win.w, &win.w);
        let dp_s = eval.dp_form(&kern.segment, &win.w, &win.xt, hbar);
        let dp_f = eval.dp_form(&tf, &win.w, &win.xt, hbar);
        let dp_m = eval.dp_form(g, &win.w, &win.xt, hbar);
        for k in 0..np {
            let idx = row * np + k;
            let mk = mv[k].re;
            f.main[idx] = phi * mk / nf;
            f.semiclassical[idx] = (a_s[k].re - a_f[k].re) / nf;
            f.meanfield[idx] = (a_f[k].re - phi * mk) / nf;
            f.dp_main[idx] = phi * dp_m[k] / nf;
            f.dp_semiclassical[idx] = (dp_s[k] - dp_f[k]) / nf;
            f.dp_meanfield[idx] = (dp_f[k] - phi * dp_m[k]) / nf;
        }
    }
    Ok(f)
}
