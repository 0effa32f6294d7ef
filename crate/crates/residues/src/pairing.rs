use husimi_grid::{Potential, TestFunction};
use husimi_manybody::{gamma1, pair_diagonal, ManyBodyState};
use husimi_phasespace::{CoherentFrame, PhaseLattice};
use serde::{Deserialize, Serialize};

use crate::engine::{residue_fields, Interaction, ResidueFields};
use crate::ResidueError;

/// Quadrature used for the segment average in the semiclassical residue.
pub const S_QUADRATURE: &str = "gauss-legendre-8";

/// Pairings `|int phi(q) varphi(p) d.R dq dp|` of the three residues, each
/// computed by moving the derivative onto the test function.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidueReport {
    pub pairing_kinetic: f64,
    pub pairing_semiclassical: f64,
    pub pairing_meanfield: f64,
    /// Filled in by the consistency check when a trajectory is available.
    pub consistency_defect: Option<f64>,
    /// `int dq |int dp |R_k||`.
    pub kinetic_l1: f64,
    /// `|| int dp |R_k| ||_{L^{5/4}(dq)}`.
    pub kinetic_l54: f64,
    pub hbar: f64,
    pub n: usize,
    pub t: f64,
    pub phi_q: String,
    pub phi_p: String,
    pub frame: String,
    pub s_quadrature: String,
    pub undersampled: bool,
}

impl ResidueReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// All residue fields of an N-body state. The pair diagonal is only formed
/// when the potential is nonzero and `N >= 2`.
pub fn state_fields(
    state: &ManyBodyState,
    frame: &CoherentFrame,
    v: &Potential,
    lattice: &PhaseLattice,
) -> Result<ResidueFields, ResidueError> {
    state.grid.require_1d()?;
    let gamma = gamma1(state);
    if v.is_zero() || state.n() < 2 {
        return residue_fields(frame, &gamma, None, state.n(), lattice);
    }
    let pair = pair_diagonal(state);
    let inter = Interaction::from_potential(&pair, v);
    residue_fields(frame, &gamma, Some(&inter), state.n(), lattice)
}

/// `|int dq dp phi(q) varphi(p) d_q R_k| = |int phi'(q) varphi(p) R_k|`.
pub fn kinetic_residue_pairing(
    state: &ManyBodyState,
    frame: &CoherentFrame,
    lattice: &PhaseLattice,
    phi_q: &TestFunction,
    phi_p: &TestFunction,
) -> Result<f64, ResidueError> {
    let gamma = gamma1(state);
    let f = residue_fields(frame, &gamma, None, state.n(), lattice)?;
    Ok(f.pair(&f.kinetic, phi_q, 1, phi_p, 0).abs())
}

/// `|int phi(q) varphi'(p) R_s|`.
pub fn semiclassical_residue_pairing(
    state: &ManyBodyState,
    frame: &CoherentFrame,
    v: &Potential,
    lattice: &PhaseLattice,
    phi_q: &TestFunction,
    phi_p: &TestFunction,
) -> Result<f64, ResidueError> {
    let f = state_fields(state, frame, v, lattice)?;
    Ok(f.pair(&f.semiclassical, phi_q, 0, phi_p, 1).abs())
}

/// `|int phi(q) varphi'(p) R_m|`.
pub fn meanfield_residue_pairing(
    state: &ManyBodyState,
    frame: &CoherentFrame,
    v: &Potential,
    lattice: &PhaseLattice,
    phi_q: &TestFunction,
    phi_p: &TestFunction,
) -> Result<f64, ResidueError> {
    let f = state_fields(state, frame, v, lattice)?;
    Ok(f.pair(&f.meanfield, phi_q, 0, phi_p, 1).abs())
}

/// All three pairings from one evaluation of the fields.
pub fn residue_report(
    state: &ManyBodyState,
    frame: &CoherentFrame,
    v: &Potential,
    lattice: &PhaseLattice,
    phi_q: &TestFunction,
    phi_p: &TestFunction,
) -> Result<ResidueReport, ResidueError> {
    let f = state_fields(state, frame, v, lattice)?;
    Ok(report_from_fields(
        &f, state.time, frame, lattice, phi_q, phi_p,
    ))
}

pub(crate) fn report_from_fields(
    f: &ResidueFields,
    t: f64,
    frame: &CoherentFrame,
    lattice: &PhaseLattice,
    phi_q: &TestFunction,
    phi_p: &TestFunction,
) -> ResidueReport {
    let (kinetic_l1, kinetic_l54) = f.kinetic_aggregates();
    ResidueReport {
        pairing_kinetic: f.pair(&f.kinetic, phi_q, 1, phi_p, 0).abs(),
        pairing_semiclassical: f.pair(&f.semiclassical, phi_q, 0, phi_p, 1).abs(),
        pairing_meanfield: f.pair(&f.meanfield, phi_q, 0, phi_p, 1).abs(),
        consistency_defect: None,
        kinetic_l1,
        kinetic_l54,
        hbar: f.hbar,
        n: f.n,
        t,
        phi_q: phi_q.label(),
        phi_p: phi_p.label(),
        frame: frame.window.label().to_string(),
        s_quadrature: S_QUADRATURE.to_string(),
        undersampled: lattice.undersampled(f.hbar),
    }
}
