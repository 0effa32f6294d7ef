use husimi_fock::{self as fock, BogoliubovMap, CMatrix, FockState};
use husimi_grid::loglog_fit;
use husimi_manybody::orbitals::plane_wave_index;
use husimi_manybody::{gamma1, pair_diagonal, ManyBodyState, OneBodyKernel, PairDiagonal};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ResidueError;

/// Mixed norm `( int du dw [ int dy |K(u,y;w,y)| ]^2 )^(1/2)` of the
/// factorization defect `K = gamma2 - gamma1 (x) gamma1` and of the three
/// pieces of `K = T1 + T2 + T3` with
/// `T1 = gamma2 - omega (x) omega`, `T2 = (omega - gamma1) (x) omega`,
/// `T3 = gamma1 (x) (omega - gamma1)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MixedNormReport {
    pub mixed_norm: f64,
    pub t1_part: f64,
    pub t2_part: f64,
    pub t3_part: f64,
    /// `t1 + t2 + t3 - mixed_norm`; nonnegative by the triangle inequality.
    pub triangle_slack: f64,
    /// `|gamma1 - omega|_HS` and `|gamma1 - omega|_Tr`.
    pub hs_gap: f64,
    pub trace_gap: f64,
    pub n: f64,
    pub modes: usize,
}

impl MixedNormReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn mix(m: usize, dx: f64, k: impl Fn(usize, usize, usize) -> Complex64) -> f64 {
    let mut total = 0.0;
    for u in 0..m {
        for w in 0..m {
            let inner: f64 = (0..m).map(|y| k(u, w, y).norm()).sum::<f64>() * dx;
            total += inner * inner;
        }
    }
    (total * dx * dx).sqrt()
}

/// Mixed norms from the pair diagonal `D(u,w,y) = gamma2(u,y;w,y)`.
pub fn mixed_norm(
    pair: &PairDiagonal,
    gamma: &OneBodyKernel,
    omega: &OneBodyKernel,
) -> Result<MixedNormReport, ResidueError> {
    let m = pair.m;
    if gamma.m() != m || omega.m() != m {
        return Err(ResidueError::Mismatch(format!(
            "pair diagonal on {m} points, kernels on {} and {}",
            gamma.m(),
            omega.m()
        )));
    }
    let dx = pair.dx;
    let g = |x, y| gamma.get(x, y);
    let o = |x, y| omega.get(x, y);
    let mixed_norm = mix(m, dx, |u, w, y| pair.get(u, w, y) - g(u, w) * g(y, y));
    let t1_part = mix(m, dx, |u, w, y| pair.get(u, w, y) - o(u, w) * o(y, y));
    let t2_part = mix(m, dx, |u, w, y| (o(u, w) - g(u, w)) * o(y, y));
    let t3_part = mix(m, dx, |u, w, y| g(u, w) * (o(y, y) - g(y, y)));
    let (hs_gap, trace_gap) = gamma.norm_gaps(omega);
    Ok(MixedNormReport {
        mixed_norm,
        t1_part,
        t2_part,
        t3_part,
        triangle_slack: t1_part + t2_part + t3_part - mixed_norm,
        hs_gap,
        trace_gap,
        n: gamma.trace().re,
        modes: m,
    })
}

pub fn mixed_norm_of_state(
    state: &ManyBodyState,
    omega: &OneBodyKernel,
) -> Result<MixedNormReport, ResidueError> {
    mixed_norm(&pair_diagonal(state), &gamma1(state), omega)
}

/// Mixed norms of a Fock vector, with modes as unit-weight sites.
pub fn mixed_norm_fock(psi: &FockState, omega: &CMatrix) -> Result<MixedNormReport, ResidueError> {
    let m = psi.modes();
    let pair = PairDiagonal {
        m,
        dx: 1.0,
        data: fock::pair_diagonal(psi),
    };
    mixed_norm(
        &pair,
        &OneBodyKernel::new(1.0, fock::gamma1(psi)),
        &OneBodyKernel::new(1.0, omega.clone()),
    )
}

/// `a*(f) = sum_x f(x) a*_x`.
fn a_star(f: &[Complex64], state: &FockState) -> Result<FockState, ResidueError> {
    let mut out = FockState::zero(state.modes())?;
    for (x, c) in f.iter().enumerate() {
        if c.norm() > 0.0 {
            out.axpy(*c, &fock::create(state, x)?);
        }
    }
    Ok(out)
}

/// Plane waves `e^{2 pi i k x / M} / sqrt(M)` on `M` sites, `k = 0, 1, -1, 2, ...`.
fn plane_wave_family(modes: usize, n: usize) -> CMatrix {
    CMatrix::from_fn(modes, n, |x, j| {
        let k = plane_wave_index(j) as f64;
        let th = 2.0 * std::f64::consts::PI * k * x as f64 / modes as f64;
        Complex64::from_polar(1.0 / (modes as f64).sqrt(), th)
    })
}

/// `Psi = R (cos(theta) Omega + sin(theta) a*(e_N) a*(e_{N-1}) Omega)`: the Slater
/// state of the `N` lowest plane waves mixed with one particle-hole
/// excitation, measured against `omega` of the unexcited Slater state.
pub fn fock_path_mixed_norm(
    modes: usize,
    n: usize,
    theta: f64,
) -> Result<(MixedNormReport, FockState), ResidueError> {
    if n == 0 || n >= modes {
        return Err(ResidueError::Mismatch(format!(
            "need 0 < N < modes, got N = {n} on {modes} modes"
        )));
    }
    let map = BogoliubovMap::from_family(plane_wave_family(modes, n))?;
    let r = map.unitary()?;
    // The excitation lives in the rotated basis: `a*(e_N) a*(e_{N-1}) Omega`,
    // which `R` turns into a particle in `e_N` and a hole in `e_{N-1}`.
    let basis = map.completed_basis();
    let vac = FockState::vacuum(modes)?;
    let excited = a_star(
        &basis.column(n).iter().copied().collect::<Vec<_>>(),
        &a_star(
            &basis.column(n - 1).iter().copied().collect::<Vec<_>>(),
            &vac,
        )?,
    )?;
    let mut xi = vac.scale(Complex64::new(theta.cos(), 0.0));
    xi.axpy(Complex64::new(theta.sin(), 0.0), &excited);
    let psi = r.apply(&xi);
    let report = mixed_norm_fock(&psi, &map.omega())?;
    Ok((report, psi))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MixedScaling {
    pub ns: Vec<usize>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
    pub reports: Vec<MixedNormReport>,
}

/// Log-log fit of the Fock-path mixed norm against `N`.
pub fn fock_path_scaling(
    modes: usize,
    ns: &[usize],
    theta: f64,
) -> Result<MixedScaling, ResidueError> {
    if ns.len() < 3 {
        return Err(ResidueError::SweepTooShort {
            need: 3,
            got: ns.len(),
        });
    }
    let reports = ns
        .iter()
        .map(|&n| fock_path_mixed_norm(modes, n, theta).map(|(r, _)| r))
        .collect::<Result<Vec<_>, _>>()?;
    let norms: Vec<f64> = reports.iter().map(|r| r.mixed_norm).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let (slope, r2) = loglog_fit(&xs, &norms)?;
    Ok(MixedScaling {
        ns: ns.to_vec(),
        norms,
        slope,
        r2,
        reports,
    })
}
