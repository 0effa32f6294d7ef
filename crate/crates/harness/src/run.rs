use std::path::{Path, PathBuf};

use husimi_grid::{GridSpec, Potential};
use husimi_manybody::{build_slater, energy, gamma1, Complex64, ManyBodyState, Propagator};
use husimi_meanfield::{
    husimi_vlasov_distance, norm_gaps, HartreeFock, MeanFieldState, Vlasov, VlasovState,
};
use husimi_phasespace::{
    husimi1, husimi2_marginal_check, wigner1, Factorized, PhaseLattice, Refinement,
};
use husimi_residues::{consistency_refinement, residue_report, RefinementReport, ResidueReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::record::{write_records, RecordSink, SweepRecord};
use crate::{HarnessError, RunConfig};

/// Marker file left in a run directory whose run aborted.
pub const FAILED_MARKER: &str = "FAILED";

/// Everything a run reports besides the record table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub config_hash: String,
    pub steps: usize,
    pub residues: ResidueReport,
    pub consistency: RefinementReport,
    pub records: Vec<SweepRecord>,
}

impl RunReport {
    pub fn hard_failures(&self) -> Vec<&SweepRecord> {
        self.records
            .iter()
            .filter(|r| r.passed == Some(false))
            .collect()
    }
}

/// Directory of a config's run below its output root.
pub fn run_dir(config: &RunConfig) -> PathBuf {
    config.out.join(format!("run-{}", config.short_hash()))
}

fn kicked(grid: &GridSpec, orbs: Vec<Vec<Complex64>>, kick: f64) -> Vec<Vec<Complex64>> {
    if kick == 0.0 {
        return orbs;
    }
    orbs.into_iter()
        .map(|o| {
            o.into_iter()
                .enumerate()
                .map(|(j, a)| a * Complex64::from_polar(1.0, kick * grid.position(j) / grid.hbar))
                .collect()
        })
        .collect()
}

/// Per-unit-time tolerances are not loosened for horizons below one.
fn per_unit_time(tol: f64, t: f64) -> f64 {
    tol * t.max(1.0)
}

struct Phase<'a> {
    dir: &'a Path,
}

impl Phase<'_> {
    fn run<T>(
        &self,
        phase: &'static str,
        f: impl FnOnce() -> Result<T, HarnessError>,
    ) -> Result<T, HarnessError> {
        f().map_err(|e| HarnessError::Phase {
            phase,
            dir: self.dir.to_path_buf(),
            source: Box::new(e),
        })
    }
}

/// Runs one config into its own directory and returns that directory. On
/// error the partial outputs stay and a `FAILED` marker names the phase.
pub fn run_experiment(config: &RunConfig) -> Result<PathBuf, HarnessError> {
    let dir = run_dir(config);
    std::fs::create_dir_all(&dir)?;
    let _ = std::fs::remove_file(dir.join(FAILED_MARKER));
    match execute(config, &dir) {
        Ok(()) => Ok(dir),
        Err(e) => {
            std::fs::write(dir.join(FAILED_MARKER), format!("{e}\n"))?;
            Err(e)
        }
    }
}

fn execute(config: &RunConfig, dir: &Path) -> Result<(), HarnessError> {
    let phase = Phase { dir };
    std::fs::write(dir.join("config.json"), config.to_json())?;
    std::fs::write(dir.join("config.toml"), config.to_toml()?)?;
    config.validate()?;

    let (grid, v, frame, lattice) = phase.run("setup", || {
        let (grid, v) = config.build_grid()?;
        grid.require_1d()?;
        let frame = config.frame.build(&grid)?;
        let lattice = config.lattice.build(&grid)?;
        v.write_csv(&grid, &dir.join("potential.csv"))?;
        Ok((grid, v, frame, lattice))
    })?;
    let orbs = kicked(&grid, config.orbitals.build(&grid, grid.n), config.kick);
    let (phi_q, phi_p) = config.test_functions();

    let mut sink = RecordSink::new(config.short_hash(), grid.hbar, grid.n);
    let steps = config.steps();
    let horizon = steps as f64 * config.dt;

    let state = phase.run("propagate", || {
        let mut state = build_slater(&grid, &orbs)?;
        state.write_snapshot(&dir.join("state_initial.bin"))?;
        nbody_conservation(&mut state, &v, config, &mut sink)?;
        state.write_snapshot(&dir.join("state_final.bin"))?;
        Ok(state)
    })?;

    phase.run("transform", || {
        let gamma = Factorized::from_kernel(&gamma1(&state));
        let h = husimi1(&gamma, &frame, &lattice)?;
        sink.check("husimi_negativity", (-h.min()).max(0.0), 1e-12, horizon);
        sink.check("husimi_excess", (h.max() - 1.0).max(0.0), 1e-8, horizon);
        sink.report("husimi_mass", h.mass(), horizon);
        h.write_csv(&dir.join("husimi_final.csv"))?;
        wigner1(&gamma, &grid, grid.n, Refinement::Cubic)?
            .write_csv(&dir.join("wigner_final.csv"))?;
        if grid.n >= 2 {
            husimi2_checks(&state, &frame, config.seed, &mut sink, horizon)?;
        }
        Ok(())
    })?;

    let (residues, consistency) = phase.run("residues", || {
        let residues = residue_report(&state, &frame, &v, &lattice, &phi_q, &phi_p)?;
        let consistency =
            consistency_refinement(&state, &frame, &v, &lattice, &phi_q, &phi_p, config.dt)?;
        Ok((residues, consistency))
    })?;
    sink.report("pairing_kinetic", residues.pairing_kinetic, horizon);
    sink.report(
        "pairing_semiclassical",
        residues.pairing_semiclassical,
        horizon,
    );
    sink.report("pairing_meanfield", residues.pairing_meanfield, horizon);
    sink.report("kinetic_l54", residues.kinetic_l54, horizon);
    if v.is_zero() {
        sink.check(
            "interaction_residues_at_zero_potential",
            residues.pairing_semiclassical + residues.pairing_meanfield,
            1e-12,
            horizon,
        );
    }
    sink.report("consistency_defect", consistency.defects[1], horizon);
    sink.report("consistency_ratio", consistency.ratio, horizon);
    sink.report("ablation_factor", consistency.ablation_factor, horizon);

    phase.run("hartree_fock", || {
        hartree_fock(&grid, &v, &orbs, &state, config, dir, &mut sink)
    })?;
    phase.run("vlasov", || {
        vlasov(&grid, &v, &orbs, &state, config, dir, &mut sink)
    })?;

    let report = RunReport {
        config_hash: config.hash(),
        steps,
        residues,
        consistency,
        records: sink.records.clone(),
    };
    std::fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    write_records(&sink.records, dir)?;
    Ok(())
}

/// Propagates to the horizon, checking norm, energy and antisymmetry at
/// every checkpoint.
fn nbody_conservation(
    state: &mut ManyBodyState,
    v: &Potential,
    config: &RunConfig,
    sink: &mut RecordSink,
) -> Result<(), HarnessError> {
    let steps = config.steps();
    let e0 = energy(state, v);
    let prop = Propagator::new(&state.grid, v, config.dt)?;
    let mut norm_drift = (state.norm() - 1.0).abs();
    let mut energy_drift = 0.0f64;
    let mut done = 0;
    for k in 1..=config.checkpoints {
        let target = steps * k / config.checkpoints;
        prop.run(state, target - done)?;
        done = target;
        norm_drift = norm_drift.max((state.norm() - 1.0).abs());
        energy_drift = energy_drift.max((energy(state, v) - e0).abs());
    }
    let t = state.time;
    sink.report("energy", e0, 0.0);
    sink.check(
        "nbody_norm_drift",
        norm_drift,
        1e-10 * (steps as f64 / 1000.0).max(1.0),
        t,
    );
    sink.check(
        "nbody_energy_drift",
        energy_drift,
        per_unit_time(1e-8, t),
        t,
    );
    sink.check(
        "nbody_antisymmetry",
        state.antisymmetry_violation(),
        1e-10,
        t,
    );
    Ok(())
}

fn husimi2_checks(
    state: &ManyBodyState,
    frame: &husimi_phasespace::CoherentFrame,
    seed: u64,
    sink: &mut RecordSink,
    t: f64,
) -> Result<(), HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.4 * state.grid.l;
    let mut z = || (rng.random_range(-half..half), rng.random_range(-2.0..2.0));
    let pairs: Vec<_> = (0..8).map(|_| (z(), z())).collect();
    let points: Vec<_> = (0..3).map(|_| z()).collect();
    // The lattice total is only affordable for pairs.
    let lat = if state.n() == 2 {
        Some(PhaseLattice::strided(&state.grid, 4, 2)?)
    } else {
        None
    };
    let rep = husimi2_marginal_check(state, frame, &pairs, &points, lat.as_ref())?;
    sink.check("husimi2_symmetry_defect", rep.symmetry_defect, 1e-8, t);
    sink.check("husimi2_marginal_defect", rep.marginal_defect, 1e-4, t);
    if let Some((total, expected)) = rep.normalization {
        sink.check(
            "husimi2_normalization_defect",
            (total - expected).abs(),
            1e-4,
            t,
        );
    }
    Ok(())
}

fn hartree_fock(
    grid: &GridSpec,
    v: &Potential,
    orbs: &[Vec<Complex64>],
    nbody: &ManyBodyState,
    config: &RunConfig,
    dir: &Path,
    sink: &mut RecordSink,
) -> Result<(), HarnessError> {
    let mut st = MeanFieldState::new(grid, orbs.to_vec())?;
    let e0 = st.energy(v);
    let hf = HartreeFock::new(grid, v, config.dt)?;
    let steps = config.steps();
    let (mut trace, mut idem, mut ortho, mut drift) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut done = 0;
    for k in 1..=config.checkpoints {
        let target = steps * k / config.checkpoints;
        hf.run(&mut st, target - done)?;
        done = target;
        trace = trace.max((st.trace() - grid.n as f64).abs());
        idem = idem.max(st.idempotency_defect());
        ortho = ortho.max(st.orthonormality_defect());
        drift = drift.max((st.energy(v) - e0).abs());
    }
    let t = config.steps() as f64 * config.dt;
    sink.check("hf_trace_defect", trace, 1e-8, t);
    sink.check("hf_idempotency_defect", idem, 1e-8, t);
    sink.check("hf_orthonormality_defect", ortho, 1e-8, t);
    sink.check("hf_energy_drift", drift, per_unit_time(1e-5, t), t);
    let (hs, tr) = norm_gaps(&gamma1(nbody), &st.omega());
    sink.report("hf_hs_gap", hs, t);
    sink.report("hf_trace_gap", tr, t);
    st.write_snapshot(&dir.join("hartree_fock_final.bin"))?;
    Ok(())
}

fn vlasov(
    grid: &GridSpec,
    v: &Potential,
    orbs: &[Vec<Complex64>],
    nbody: &ManyBodyState,
    config: &RunConfig,
    dir: &Path,
    sink: &mut RecordSink,
) -> Result<(), HarnessError> {
    let frame = config.frame.build(grid)?;
    let full = PhaseLattice::full(grid);
    let h0 = husimi1(&Factorized::from_orbitals(grid, orbs), &frame, &full)?;
    let mut st = VlasovState::from_husimi(&h0, grid)?;
    let solver = Vlasov::new(&st, v, config.dt);
    let (m0, e0) = (st.mass(), st.energy(v));
    let clipped0 = st.clipped;
    solver.run(&mut st, config.steps())?;
    let t = config.steps() as f64 * config.dt;
    // Clipping negatives adds mass.
    let mass_defect = (st.mass() - (st.clipped - clipped0) * st.kappa() - m0).abs();
    sink.check("vlasov_mass_defect", mass_defect, per_unit_time(1e-8, t), t);
    sink.check(
        "vlasov_energy_drift",
        (st.energy(v) - e0).abs(),
        per_unit_time(1e-4, t),
        t,
    );
    sink.check("vlasov_negativity", (-st.min()).max(0.0), 0.0, t);
    sink.report("vlasov_clipped", st.clipped, t);
    let ht = husimi1(&Factorized::from_kernel(&gamma1(nbody)), &frame, &full)?;
    let d = husimi_vlasov_distance(&ht, &st)?;
    sink.report("husimi_vlasov_l1", d.l1, t);
    sink.report("husimi_vlasov_w1", d.w1_proxy, t);
    st.write_csv(&dir.join("vlasov_final.csv"))?;
    Ok(())
}
