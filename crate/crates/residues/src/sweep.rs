use husimi_grid::{loglog_fit, GridSpec, Potential, PotentialKind, TestFunction};
use husimi_manybody::orbitals::hermite;
use husimi_manybody::{build_slater, Propagator};
use husimi_phasespace::{CoherentFrame, PhaseLattice, Window};
use serde::{Deserialize, Serialize};

use crate::pairing::{report_from_fields, state_fields};
use crate::{ResidueError, ResidueReport};

/// The `alpha` grid of the exponent tables.
pub const ALPHA_GRID: [f64; 5] = [0.55, 0.65, 0.75, 0.85, 0.95];

/// Coupled sweep `hbar = 1/N`: oscillator orbitals of frequency `trap_omega`
/// (a phase-space disk of radius `sqrt(2)` for every `N`) evolved under the
/// pair potential up to `time`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    pub ns: Vec<usize>,
    pub m: usize,
    pub l: f64,
    pub potential: PotentialKind,
    pub trap_omega: f64,
    pub time: f64,
    pub dt: f64,
    /// Centre and radius of the position test function.
    pub phi_q: (f64, f64),
    /// Centre and radius of the momentum test function.
    pub phi_p: (f64, f64),
    pub smoothness: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ns: vec![2, 3, 4],
            m: 64,
            l: 12.0,
            potential: PotentialKind::Bump {
                amplitude: 1.0,
                radius: 2.0,
            },
            trap_omega: 1.0,
            time: 0.1,
            dt: 0.002,
            phi_q: (0.3, 2.0),
            phi_p: (0.2, 2.0),
            smoothness: 2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub r2: f64,
}

/// Rate exponents for one `alpha`, in the configured dimension and in the
/// three-dimensional form stated for the bounds.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlphaExponent {
    pub alpha: f64,
    /// `1/2 + d (alpha - 1)`.
    pub semiclassical: f64,
    /// `(d/2)(alpha - 1/2) + d/2`.
    pub meanfield: f64,
    pub semiclassical_3d: f64,
    pub meanfield_3d: f64,
    /// The three-dimensional semiclassical exponent is negative: the bound
    /// grows as `hbar -> 0` at this `alpha`.
    pub semiclassical_3d_negative: bool,
}

pub fn alpha_exponents(d: usize) -> Vec<AlphaExponent> {
    let d = d as f64;
    ALPHA_GRID
        .iter()
        .map(|&a| {
            let s3 = 0.5 + 3.0 * (a - 1.0);
            AlphaExponent {
                alpha: a,
                semiclassical: 0.5 + d * (a - 1.0),
                meanfield: 0.5 * d * (a - 0.5) + 0.5 * d,
                semiclassical_3d: s3,
                meanfield_3d: 1.5 * (a - 0.5) + 1.5,
                semiclassical_3d_negative: s3 < 0.0,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepPoint {
    pub n: usize,
    pub hbar: f64,
    pub report: ResidueReport,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
    /// Pairings against `hbar`: `pairing ~ hbar^slope`.
    pub kinetic: SlopeFit,
    pub semiclassical: SlopeFit,
    pub meanfield: SlopeFit,
    /// Mean-field pairing below the semiclassical one at every point.
    pub ordering_holds: bool,
    /// Kinetic, semiclassical, mean-field pairings decrease along the sweep.
    pub monotone: [bool; 3],
    pub exponents: Vec<AlphaExponent>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fit(hbars: &[f64], ys: &[f64]) -> Result<SlopeFit, ResidueError> {
    let (slope, r2) = loglog_fit(hbars, ys)?;
    Ok(SlopeFit { slope, r2 })
}

/// Frame for the sweep: Gaussian where it fits in half the box, otherwise
/// the bump window.
fn sweep_frame(grid: &GridSpec) -> Result<CoherentFrame, ResidueError> {
    let reach = Window::gaussian().reach() * grid.hbar.sqrt();
    Ok(if reach < 0.5 * grid.l {
        CoherentFrame::gaussian(grid)?
    } else {
        CoherentFrame::bump(grid)?
    })
}

/// Runs the sweep with `N` in increasing order (so `hbar` decreasing).
pub fn coupled_sweep(config: &SweepConfig) -> Result<SweepReport, ResidueError> {
    if config.ns.len() < 3 {
        return Err(ResidueError::SweepTooShort {
            need: 3,
            got: config.ns.len(),
        });
    }
    let mut points = Vec::with_capacity(config.ns.len());
    for &n in &config.ns {
        let grid = GridSpec::coupled(1, config.m, config.l, n)?;
        let v = Potential::new(&grid, config.potential.clone())?;
        let mut state = build_slater(&grid, &hermite(&grid, n, config.trap_omega))?;
        let steps = (config.time / config.dt).round() as usize;
        Propagator::new(&grid, &v, config.dt)?.run(&mut state, steps)?;
        let frame = sweep_frame(&grid)?;
        let lattice = PhaseLattice::default_for(&grid);
        let phi_q = test_function(config.phi_q, config.smoothness);
        let phi_p = test_function(config.phi_p, config.smoothness);
        let fields = state_fields(&state, &frame, &v, &lattice)?;
        let report = report_from_fields(&fields, state.time, &frame, &lattice, &phi_q, &phi_p);
        points.push(SweepPoint {
            n,
            hbar: grid.hbar,
            report,
        });
    }
    let hbars: Vec<f64> = points.iter().map(|p| p.hbar).collect();
    let col = |f: fn(&ResidueReport) -> f64| -> Vec<f64> {
        points.iter().map(|p| f(&p.report)).collect()
    };
    let kin = col(|r| r.pairing_kinetic);
    let sc = col(|r| r.pairing_semiclassical);
    let mf = col(|r| r.pairing_meanfield);
    Ok(SweepReport {
        config: config.clone(),
        kinetic: fit(&hbars, &kin)?,
        semiclassical: fit(&hbars, &sc)?,
        meanfield: fit(&hbars, &mf)?,
        ordering_holds: mf.iter().zip(&sc).all(|(m, s)| m < s),
        monotone: [decreasing(&kin), decreasing(&sc), decreasing(&mf)],
        exponents: alpha_exponents(1),
        points,
    })
}

/// Bump test function on the whole line (tabulation happens at use).
pub(crate) fn test_function((center, radius): (f64, f64), s: usize) -> TestFunction {
    TestFunction::on_points(Vec::new(), center, radius, s)
}
