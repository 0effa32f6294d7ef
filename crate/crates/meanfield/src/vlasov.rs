use std::f64::consts::PI;
use std::path::Path;

use husimi_grid::{GridSpec, Potential};
use husimi_phasespace::HusimiField;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::MeanFieldError;

/// Phase-space density on a `(q, p)` lattice, periodic in `q` over the box
/// and periodic in `p` over `[-p_max, p_max)`.
///
/// Values use the Husimi scale, so `kappa = 1/(N 2 pi hbar)` turns them into a
/// probability density.
#[derive(Clone, Debug)]
pub struct VlasovState {
    pub qs: Vec<f64>,
    pub ps: Vec<f64>,
    pub dq: f64,
    pub dp: f64,
    pub l: f64,
    pub hbar: f64,
    pub n: usize,
    /// Row-major `(q, p)`.
    pub values: Vec<f64>,
    pub time: f64,
    /// Cumulative mass removed by clipping negative values, in units of `kappa`.
    pub clipped: f64,
}

impl VlasovState {
    /// `nq` positions covering the box and `np` momenta `-p_max + j dp`.
    pub fn from_fn(
        grid: &GridSpec,
        nq: usize,
        np: usize,
        p_max: f64,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, MeanFieldError> {
        grid.require_1d()?;
        if nq < 4 || np < 4 {
            return Err(MeanFieldError::Lattice(format!(
                "lattice {nq}x{np} is too small"
            )));
        }
        let dq = grid.l / nq as f64;
        let dp = 2.0 * p_max / np as f64;
        let qs: Vec<f64> = (0..nq).map(|i| -0.5 * grid.l + i as f64 * dq).collect();
        let ps: Vec<f64> = (0..np).map(|j| -p_max + j as f64 * dp).collect();
        let mut values = Vec::with_capacity(nq * np);
        for &q in &qs {
            for &p in &ps {
                values.push(f(q, p));
            }
        }
        Ok(Self {
            qs,
            ps,
            dq,
            dp,
            l: grid.l,
            hbar: grid.hbar,
            n: grid.n,
            values,
            time: 0.0,
            clipped: 0.0,
        })
    }

    /// Initial datum from a Husimi field whose `q` rows cover the box
    /// uniformly and whose momenta are uniform. Round-off negatives are clipped.
    pub fn from_husimi(field: &HusimiField, grid: &GridSpec) -> Result<Self, MeanFieldError> {
        grid.require_1d()?;
        let nq = field.qs.len();
        if (nq as f64 * field.dq - grid.l).abs() > 1e-9 * grid.l {
            return Err(MeanFieldError::Lattice(format!(
                "{nq} q rows of width {} do not cover L = {}",
                field.dq, grid.l
            )));
        }
        let uniform = field
            .ps
            .windows(2)
            .all(|w| ((w[1] - w[0]) - field.dp).abs() < 1e-9 * field.dp);
        if !uniform {
            return Err(MeanFieldError::Lattice("momenta are not uniform".into()));
        }
        let mut clipped = 0.0;
        let values = field
            .values
            .iter()
            .map(|&v| {
                if v < 0.0 {
                    clipped -= v;
                    0.0
                } else {
                    v
                }
            })
            .collect();
        Ok(Self {
            qs: field.qs.clone(),
            ps: field.ps.clone(),
            dq: field.dq,
            dp: field.dp,
            l: grid.l,
            hbar: grid.hbar,
            n: grid.n,
            values,
            time: 0.0,
            clipped: clipped * field.dq * field.dp,
        })
    }

    pub fn kappa(&self) -> f64 {
        1.0 / (self.n as f64 * 2.0 * PI * self.hbar)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ps.len() + j]
    }

    /// `rho(q) = kappa int m dp`.
    pub fn density(&self) -> Vec<f64> {
        let np = self.ps.len();
        let k = self.kappa() * self.dp;
        self.values
            .chunks_exact(np)
            .map(|row| row.iter().sum::<f64>() * k)
            .collect()
    }

    /// `kappa int int m`, equal to 1 for a Husimi initial datum.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dq * self.dp * self.kappa()
    }

    /// Rescales the values to unit mass.
    pub fn normalize(&mut self) {
        let m = self.mass();
        self.values.iter_mut().for_each(|v| *v /= m);
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(1/2) kappa int p^2 m + (1/2) int int V(q - q') rho rho'`.
    pub fn energy(&self, v: &Potential) -> f64 {
        let np = self.ps.len();
        let kin: f64 = self
            .values
            .chunks_exact(np)
            .map(|row| {
                row.iter()
                    .zip(&self.ps)
                    .map(|(m, p)| m * p * p)
                    .sum::<f64>()
            })
            .sum::<f64>()
            * 0.5
            * self.kappa()
            * self.dq
            * self.dp;
        if v.is_zero() {
            return kin;
        }
        let rho = self.density();
        let table = self.offset_table(|x| v.value_at(x));
        let nq = self.qs.len();
        let mut pot = 0.0;
        for i in 0..nq {
            for j in 0..nq {
                pot += table[(i + nq - j) % nq] * rho[i] * rho[j];
            }
        }
        kin + 0.5 * pot * self.dq * self.dq
    }

    /// `F(q) = -d/dq (V * rho)(q)`.
    pub fn force(&self, v: &Potential) -> Vec<f64> {
        let rho = self.density();
        let table = self.offset_table(|x| v.grad_at(x));
        let nq = self.qs.len();
        (0..nq)
            .map(|i| {
                -(0..nq)
                    .map(|j| table[(i + nq - j) % nq] * rho[j])
                    .sum::<f64>()
                    * self.dq
            })
            .collect()
    }

    /// `f(q_i - q_j)` indexed by `(i - j) mod nq`; the rows are uniform.
    fn offset_table(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.qs.len()).map(|d| f(d as f64 * self.dq)).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), MeanFieldError> {
        use std::io::Write;
        let io = |e: std::io::Error| MeanFieldError::from(husimi_manybody::ManyBodyError::from(e));
        let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        writeln!(f, "q,p,value").map_err(io)?;
        for (i, q) in self.qs.iter().enumerate() {
            for (j, p) in self.ps.iter().enumerate() {
                writeln!(f, "{q:.17e},{p:.17e},{:.17e}", self.get(i, j)).map_err(io)?;
            }
        }
        f.flush().map_err(io)?;
        Ok(())
    }
}

/// Periodic cubic B-spline resampling of lines at a constant shift.
struct SplineShifter {
    n: usize,
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    /// Inverse of the sampled B-spline symbol `(4 + 2 cos theta) / 6`, divided by `n`.
    filter: Vec<f64>,
}

impl SplineShifter {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let filter = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                6.0 / (4.0 + 2.0 * th.cos()) / n as f64
            })
            .collect();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            filter,
        }
    }

    /// `out[i] = s(i - shift)` where `s` interpolates `line` with cubic B-splines.
    fn shift(&self, line: &mut [f64], shift: f64, buf: &mut Vec<Complex64>) {
        let n = self.n;
        buf.clear();
        buf.extend(line.iter().map(|&v| Complex64::new(v, 0.0)));
        self.fwd.process(buf);
        for (b, f) in buf.iter_mut().zip(&self.filter) {
            *b *= f;
        }
        self.inv.process(buf);
        let c: Vec<f64> = buf.iter().map(|z| z.re).collect();
        for (i, out) in line.iter_mut().enumerate() {
            let x = i as f64 - shift;
            let j0 = x.floor();
            let t = x - j0;
            let j0 = j0 as i64;
            let w = [
                (1.0 - t).powi(3) / 6.0,
                (3.0 * t.powi(3) - 6.0 * t * t + 4.0) / 6.0,
                (-3.0 * t.powi(3) + 3.0 * t * t + 3.0 * t + 1.0) / 6.0,
                t.powi(3) / 6.0,
            ];
            let mut acc = 0.0;
            for (o, wk) in w.iter().enumerate() {
                let idx = (j0 - 1 + o as i64).rem_euclid(n as i64) as usize;
                acc += wk * c[idx];
            }
            *out = acc;
        }
    }
}

/// Strang-split semi-Lagrangian solver: half transport in `q`, a kick in `p`
/// with the force of the current density, half transport in `q`.
pub struct Vlasov {
    v: Potential,
    dt: f64,
    q_shift: SplineShifter,
    p_shift: SplineShifter,
}

impl Vlasov {
    pub fn new(state: &VlasovState, v: &Potential, dt: f64) -> Self {
        Self {
            v: v.clone(),
            dt,
            q_shift: SplineShifter::new(state.qs.len()),
            p_shift: SplineShifter::new(state.ps.len()),
        }
    }

    /// Refuses steps with `max|p| dt > dq` or `max|F| dt > dp`.
    pub fn check_cfl(&self, state: &VlasovState) -> Result<(), MeanFieldError> {
        let pmax = state.ps.iter().fold(0.0f64, |a, p| a.max(p.abs()));
        let fmax = if self.v.is_zero() {
            0.0
        } else {
            state
                .force(&self.v)
                .iter()
                .fold(0.0f64, |a, f| a.max(f.abs()))
        };
        let q_limit = state.dq / pmax.max(f64::MIN_POSITIVE);
        let p_limit = state.dp / fmax.max(f64::MIN_POSITIVE);
        let suggested = 0.9 * q_limit.min(p_limit);
        if self.dt > q_limit {
            return Err(MeanFieldError::Cfl {
                dt: self.dt,
                limit: q_limit,
                which: "max|p| dt <= dq",
                suggested,
            });
        }
        if self.dt > p_limit {
            return Err(MeanFieldError::Cfl {
                dt: self.dt,
                limit: p_limit,
                which: "max|F| dt <= dp",
                suggested,
            });
        }
        Ok(())
    }

    fn transport(&self, state: &mut VlasovState, tau: f64) {
        let nq = state.qs.len();
        let np = state.ps.len();
        let mut line = vec![0.0; nq];
        let mut buf = Vec::with_capacity(nq);
        for (j, &p) in state.ps.iter().enumerate() {
            for i in 0..nq {
                line[i] = state.values[i * np + j];
            }
            self.q_shift.shift(&mut line, p * tau / state.dq, &mut buf);
            for i in 0..nq {
                state.values[i * np + j] = line[i];
            }
        }
    }

    fn kick(&self, state: &mut VlasovState, tau: f64) {
        let force = state.force(&self.v);
        let np = state.ps.len();
        let mut buf = Vec::with_capacity(np);
        for (row, f) in state.values.chunks_exact_mut(np).zip(&force) {
            self.p_shift.shift(row, f * tau / state.dp, &mut buf);
        }
    }

    fn clip(state: &mut VlasovState) {
        let mut removed = 0.0;
        for v in &mut state.values {
            if *v < 0.0 {
                removed -= *v;
                *v = 0.0;
            }
        }
        state.clipped += removed * state.dq * state.dp;
    }

    pub fn step(&self, state: &mut VlasovState) -> Result<(), MeanFieldError> {
        self.check_cfl(state)?;
        self.transport(state, 0.5 * self.dt);
        if !self.v.is_zero() {
            self.kick(state, self.dt);
        }
        self.transport(state, 0.5 * self.dt);
        Self::clip(state);
        state.time += self.dt;
        Ok(())
    }

    pub fn run(&self, state: &mut VlasovState, steps: usize) -> Result<(), MeanFieldError> {
        for _ in 0..steps {
            self.step(state)?;
        }
        Ok(())
    }
}

pub fn vlasov_step(
    state: &VlasovState,
    v: &Potential,
    dt: f64,
) -> Result<VlasovState, MeanFieldError> {
    let mut out = state.clone();
    Vlasov::new(state, v, dt).step(&mut out)?;
    Ok(out)
}
