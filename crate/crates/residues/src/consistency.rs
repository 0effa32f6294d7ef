use husimi_grid::{Potential, TestFunction};
use husimi_manybody::{gamma1, ManyBodyState, Propagator};
use husimi_phasespace::{CoherentFrame, PhaseLattice};
use serde::{Deserialize, Serialize};

use crate::engine::residue_fields;
use crate::pairing::state_fields;
use crate::ResidueError;

/// Each term of the identity paired with `phi(q) varphi(p)`, pointwise
/// derivatives included (no integration by parts).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermPairings {
    pub time_derivative: f64,
    pub transport: f64,
    pub main: f64,
    pub kinetic: f64,
    pub semiclassical: f64,
    pub meanfield: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConsistencyReport {
    pub time: f64,
    pub dt: f64,
    /// `|<phi varphi, LHS - RHS>|`.
    pub paired_defect: f64,
    /// The same with every residue term dropped from the right-hand side.
    pub ablated_defect: f64,
    /// `(sum |LHS - RHS|^2 dq dp)^(1/2)` over the lattice.
    pub lattice_defect: f64,
    pub terms: TermPairings,
}

/// Assembles both sides of the identity at the middle of three snapshots;
/// `d_t m` is the centred difference of the outer two.
pub fn reformulation_consistency(
    trajectory: &[ManyBodyState],
    frame: &CoherentFrame,
    v: &Potential,
    lattice: &PhaseLattice,
    phi_q: &TestFunction,
    phi_p: &TestFunction,
) -> Result<ConsistencyReport, ResidueError> {
    let [before, mid, after] = trajectory else {
        return Err(ResidueError::Snapshots(trajectory.len()));
    };
    let first = mid.time - before.time;
    let second = after.time - mid.time;
    let scale = first.abs().max(second.abs());
    if !(first > 0.0) || (first - second).abs() > 1e-9 * scale {
        return Err(ResidueError::NonUniform { first, second });
    }
    let dt = 0.5 * (first + second);
    let outer = |s: &ManyBodyState| residue_fields(frame, &gamma1(s), None, s.n(), lattice);
    let f0 = outer(before)?;
    let f2 = outer(after)?;
    let f = state_fields(mid, frame, v, lattice)?;

    let np = f.np();
    let mut lhs = Vec::with_capacity(f.m.len());
    let mut rhs = Vec::with_capacity(f.m.len());
    let mut ablated = Vec::with_capacity(f.m.len());
    let mut dtm = Vec::with_capacity(f.m.len());
    let mut transport = Vec::with_capacity(f.m.len());
    for idx in 0..f.m.len() {
        let p = f.ps[idx % np];
        let d = (f2.m[idx] - f0.m[idx]) / (2.0 * dt);
        let tr = p * f.dq_m[idx];
        dtm.push(d);
        transport.push(tr);
        lhs.push(d + tr);
        rhs.push(
            f.dp_main[idx] + f.dq_kinetic[idx] + f.dp_semiclassical[idx] + f.dp_meanfield[idx],
        );
        ablated.push(f.dp_main[idx]);
    }
    let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let diff_ablated: Vec<f64> = lhs.iter().zip(&ablated).map(|(a, b)| a - b).collect();
    let pair = |x: &[f64]| f.pair(x, phi_q, 0, phi_p, 0);
    let lattice_defect = (diff.iter().map(|d| d * d).sum::<f64>() * f.dq * f.dp).sqrt();
    Ok(ConsistencyReport {
        time: mid.time,
        dt,
        paired_defect: pair(&diff).abs(),
        ablated_defect: pair(&diff_ablated).abs(),
        lattice_defect,
        terms: TermPairings {
            time_derivative: pair(&dtm),
            transport: pair(&transport),
            main: pair(&f.dp_main),
            kinetic: pair(&f.dq_kinetic),
            semiclassical: pair(&f.dp_semiclassical),
            meanfield: pair(&f.dp_meanfield),
        },
    })
}

/// Consistency at `dt` and `dt/2` around a fixed state.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RefinementReport {
    pub dts: [f64; 2],
    pub defects: [f64; 2],
    pub ablated: [f64; 2],
    /// `defect(dt) / defect(dt/2)`; about 4 for a second-order scheme.
    pub ratio: f64,
    /// `ablated / defect` at the finer step.
    pub ablation_factor: f64,
    pub reports: Vec<ConsistencyReport>,
}

/// Builds `S(-dt) psi, psi, S(dt) psi` with one Strang step each way, for
/// `dt` and `dt/2`, and runs the consistency check on both triples.
pub fn consistency_refinement(
    state: &ManyBodyState,
    frame: &CoherentFrame,
    v: &Potential,
    lattice: &PhaseLattice,
    phi_q: &TestFunction,
    phi_p: &TestFunction,
    dt: f64,
) -> Result<RefinementReport, ResidueError> {
    let mut reports = Vec::with_capacity(2);
    for h in [dt, 0.5 * dt] {
        let mut fwd = state.clone();
        Propagator::new(&state.grid, v, h)?.run(&mut fwd, 1)?;
        let mut bwd = state.clone();
        Propagator::new(&state.grid, v, -h)?.run(&mut bwd, 1)?;
        let traj = [bwd, state.clone(), fwd];
        reports.push(reformulation_consistency(
            &traj, frame, v, lattice, phi_q, phi_p,
        )?);
    }
    let defects = [reports[0].paired_defect, reports[1].paired_defect];
    let ablated = [reports[0].ablated_defect, reports[1].ablated_defect];
    Ok(RefinementReport {
        dts: [dt, 0.5 * dt],
        defects,
        ablated,
        ratio: defects[0] / defects[1],
        ablation_factor: ablated[1] / defects[1],
        reports,
    })
}
