//! The acceptance criteria as callable checks. Each returns an [`Outcome`]
//! carrying the measured values; a criterion passes only if its measured
//! values meet their thresholds within its runtime budget.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use husimi_fock::{
    annihilate, bogoliubov_conjugate, create, gamma1 as fock_gamma1, one_body_inequalities, random,
    BatchReport, BogoliubovMap, Complex64, FockState, OneBodyOperator,
};
use husimi_grid::TestFunction;
use husimi_grid::{make_grid, GridSpec, Potential, PotentialKind};
use husimi_manybody::orbitals::{orthonormalize, shifted_gaussians, OrbitalFamily};
use husimi_manybody::{build_slater, energy, gamma1, propagate, Propagator};
use husimi_meanfield::{Vlasov, VlasovState};
use husimi_phasespace::{
    convolution_bridge_check, husimi1, husimi2_marginal_check, oscillation_decay, wigner1,
    CoherentFrame, Factorized, KinkProfile, PhaseLattice, Refinement,
};
use husimi_residues::{consistency_refinement, fock_path_scaling, semiclassical_residue_pairing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{FrameKind, RunConfig};
use crate::record::{read_records, SweepRecord};
use crate::sweep::{aggregate, run_sweep};
use crate::HarnessError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {:<26} {:>8.2}s / {:>5.0}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

fn timed(
    id: usize,
    name: &str,
    budget_seconds: f64,
    f: impl FnOnce() -> Result<(bool, String), HarnessError>,
) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let within = seconds < budget_seconds;
    Outcome {
        id,
        name: name.to_string(),
        passed: ok && within,
        detail: if within {
            detail
        } else {
            format!("{detail}; over budget")
        },
        seconds,
        budget_seconds,
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Anticommutators on every basis vector of six modes.
pub fn car_exactness() -> Outcome {
    timed(1, "CAR exactness", 5.0, || {
        let m = 6;
        let mut worst = 0.0f64;
        for mask in 0..1usize << m {
            let b = FockState::basis(m, mask)?;
            for i in 0..m {
                for j in 0..m {
                    let mut s = create(&annihilate(&b, j)?, i)?;
                    s.axpy(c(1.0), &annihilate(&create(&b, i)?, j)?);
                    if i == j {
                        s.axpy(c(-1.0), &b);
                    }
                    worst = worst.max(s.norm());
                    let mut z = annihilate(&annihilate(&b, j)?, i)?;
                    z.axpy(c(1.0), &annihilate(&annihilate(&b, i)?, j)?);
                    worst = worst.max(z.norm());
                    let mut z = create(&create(&b, j)?, i)?;
                    z.axpy(c(1.0), &create(&create(&b, i)?, j)?);
                    worst = worst.max(z.norm());
                }
            }
        }
        Ok((
            worst < 1e-12,
            format!("max deviation {worst:.2e} (< 1e-12)"),
        ))
    })
}

/// The seven second-quantization inequalities on 200 random instances each.
pub fn second_quantization_bounds(seed: u64) -> Outcome {
    timed(2, "operator inequalities", 60.0, || {
        let mut rng = random::rng(seed);
        let mut reports: Vec<BatchReport> = Vec::new();
        for inst in 0..200 {
            let o = OneBodyOperator::new(random::operator(&mut rng, 8, 1 + inst % 8));
            let psi = if inst % 2 == 0 {
                random::state(&mut rng, 8)
            } else {
                random::low_sector_state(&mut rng, 8, 3)
            };
            let checks = one_body_inequalities(&o, &psi)?;
            if reports.is_empty() {
                reports = checks.iter().map(|ch| BatchReport::new(ch.name)).collect();
            }
            for (r, ch) in reports.iter_mut().zip(&checks) {
                r.record(ch.lhs, ch.rhs, 1e-10);
            }
        }
        let ok = reports.len() == 7 && reports.iter().all(|r| r.passed() && r.instances == 200);
        let worst = reports
            .iter()
            .map(|r| r.min_slack)
            .fold(f64::INFINITY, f64::min);
        Ok((
            ok,
            format!(
                "{} inequalities x 200 instances, min slack {worst:.2e}",
                reports.len()
            ),
        ))
    })
}

/// Map invariants, conjugation by `R`, and the density of `R Omega`.
pub fn bogoliubov_relations(seed: u64) -> Outcome {
    timed(3, "Bogoliubov relations", 60.0, || {
        let mut rng = random::rng(seed);
        let modes = 8;
        let mut worst = 0.0f64;
        for n in 1..=3 {
            let map = BogoliubovMap::from_family(random::family(&mut rng, modes, n))?;
            let cross = map.v.conjugate().adjoint() * &map.u;
            worst = worst.max(cross.camax());
            worst = worst.max(((map.v.adjoint() * &map.v).trace().re - n as f64).abs());
            worst = worst.max((&map.u * &map.u - &map.u).camax());
            let r = map.unitary()?;
            worst = worst.max(r.unitarity_defect());
            for x in 0..modes {
                let pair = bogoliubov_conjugate(&map, x)?;
                let s = random::state(&mut rng, modes);
                let direct = r.apply_adjoint(&annihilate(&r.apply(&s), x)?);
                worst = worst.max(direct.sub(&pair.annihilation(&s)).norm());
                let direct = r.apply_adjoint(&create(&r.apply(&s), x)?);
                worst = worst.max(direct.sub(&pair.creation(&s)).norm());
            }
            let psi = r.apply(&FockState::vacuum(modes)?);
            worst = worst.max((fock_gamma1(&psi) - map.omega()).camax());
        }
        Ok((
            worst < 1e-10,
            format!("max deviation {worst:.2e} over N = 1, 2, 3 (< 1e-10)"),
        ))
    })
}

fn random_orbitals(g: &GridSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let raw = (0..n)
        .map(|_| {
            let c = rng.random_range(-3.0..3.0);
            let w = rng.random_range(0.6..1.5);
            let k = rng.random_range(-4i32..=4) as f64 * 2.0 * PI / g.l;
            g.positions()
                .iter()
                .map(|&x| {
                    let d = g.wrap(x - c);
                    Complex64::from_polar((-d * d / (2.0 * w * w)).exp(), k * x)
                })
                .collect()
        })
        .collect();
    orthonormalize(g, raw)
}

/// Positivity, boundedness and the two-particle marginal identity on 20
/// states, every other one propagated.
pub fn husimi_properties(seed: u64) -> Outcome {
    timed(4, "Husimi properties", 300.0, || {
        let g = make_grid(1, 64, 12.0, 0.5, 2)?;
        let v = Potential::new(
            &g,
            PotentialKind::Gaussian {
                amplitude: 1.0,
                width: 0.7,
            },
        )?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frames = [CoherentFrame::gaussian(&g)?, CoherentFrame::bump(&g)?];
        let lat = PhaseLattice::default_for(&g);
        let (mut lo, mut hi, mut marginal) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for k in 0..20 {
            let mut state = build_slater(&g, &random_orbitals(&g, 2, &mut rng))?;
            if k % 2 == 1 {
                state = propagate(&state, &v, 1e-2, 50)?;
            }
            let gamma = Factorized::from_kernel(&gamma1(&state));
            for frame in &frames {
                let h = husimi1(&gamma, frame, &lat)?;
                lo = lo.min(h.min());
                hi = hi.max(h.max());
            }
            let mut z = || (rng.random_range(-4.0..4.0), rng.random_range(-3.0..3.0));
            let points: Vec<_> = (0..4).map(|_| z()).collect();
            let rep = husimi2_marginal_check(&state, &frames[0], &[], &points, None)?;
            marginal = marginal.max(rep.marginal_defect);
        }
        let ok = lo >= -1e-12 && hi <= 1.0 + 1e-8 && marginal < 1e-4;
        Ok((ok, format!("min {lo:.2e} (>= -1e-12), max {hi:.6} (<= 1+1e-8), marginal defect {marginal:.2e} (< 1e-4)")))
    })
}

fn bridge_defect(m: usize) -> Result<f64, HarnessError> {
    let g = make_grid(1, m, 12.0, 0.5, 1)?;
    let frame = CoherentFrame::gaussian(&g)?;
    let gamma = Factorized::from_orbitals(&g, &[frame.vector(0.3, 0.8)]);
    let w = wigner1(&gamma, &g, 1, Refinement::Cubic)?;
    let lat = PhaseLattice::strided(&g, m / 64, m / 64)?;
    Ok(convolution_bridge_check(&w, &gamma, &frame, &lat, 1)?.max_defect)
}

/// Husimi field against the Gaussian smoothing of the Wigner field.
pub fn gaussian_bridge() -> Outcome {
    timed(5, "Gaussian bridge", 120.0, || {
        let coarse = bridge_defect(128)?;
        let fine = bridge_defect(256)?;
        let ratio = coarse / fine;
        Ok((
            coarse < 1e-4 && ratio >= 3.0,
            format!("defect {coarse:.2e} at M=128 (< 1e-4), {fine:.2e} at M=256, shrink {ratio:.1} (>= 3)"),
        ))
    })
}

/// Shell decay slopes against `(1 - alpha) s` for nine `(alpha, s)`.
pub fn oscillation_rates() -> Outcome {
    timed(6, "oscillation rates", 120.0, || {
        let hbars: Vec<f64> = (3..=10).map(|k| 2f64.powi(-k)).collect();
        let mut worst = 0.0f64;
        let mut count = 0;
        for s in [1u32, 2, 3] {
            for alpha in [0.6, 0.75, 0.9] {
                let rep = oscillation_decay(&KinkProfile::new(s), alpha, s as f64, &hbars, 0.0)?;
                worst = worst.max(rep.relative_error());
                count += 1;
            }
        }
        Ok((
            worst < 0.1,
            format!(
                "{count} combinations, worst relative slope error {:.1}% (< 10%)",
                100.0 * worst
            ),
        ))
    })
}

fn bump(center: f64, radius: f64) -> TestFunction {
    TestFunction::on_points(Vec::new(), center, radius, 2)
}

/// The consistency base state: two kicked Gaussians evolved to `t = 0.1`
/// under a bump potential. Returns the state and its norm and energy drift.
pub fn consistency_state() -> Result<(husimi_manybody::ManyBodyState, f64, f64), HarnessError> {
    let g = make_grid(1, 64, 12.0, 0.5, 2)?;
    let v = Potential::new(
        &g,
        PotentialKind::Bump {
            amplitude: 1.0,
            radius: 2.0,
        },
    )?;
    let orbs: Vec<Vec<Complex64>> = shifted_gaussians(&g, 2, 0.8)
        .into_iter()
        .map(|o| {
            o.into_iter()
                .enumerate()
                .map(|(j, a)| a * Complex64::from_polar(1.0, 0.7 * g.position(j) / g.hbar))
                .collect()
        })
        .collect();
    let mut st = build_slater(&g, &orbs)?;
    let e0 = energy(&st, &v);
    Propagator::new(&g, &v, 0.002)?.run(&mut st, 50)?;
    let norm = (st.norm() - 1.0).abs();
    let drift = (energy(&st, &v) - e0).abs();
    Ok((st, norm, drift))
}

/// Second-order refinement of the paired identity defect, and its ablation.
pub fn reformulation_consistency() -> Outcome {
    timed(7, "reformulation consistency", 600.0, || {
        let (st, _, _) = consistency_state()?;
        let g = &st.grid;
        let v = Potential::new(
            g,
            PotentialKind::Bump {
                amplitude: 1.0,
                radius: 2.0,
            },
        )?;
        let frame = CoherentFrame::gaussian(g)?;
        let lat = PhaseLattice::default_for(g);
        let r = consistency_refinement(
            &st,
            &frame,
            &v,
            &lat,
            &bump(0.5, 2.5),
            &bump(0.3, 2.0),
            0.04,
        )?;
        let ok = (3.2..=4.8).contains(&r.ratio) && r.ablation_factor > 10.0;
        Ok((
            ok,
            format!(
                "defects {:.2e} -> {:.2e}, ratio {:.3} (in [3.2, 4.8]), ablation {:.0} (> 10)",
                r.defects[0], r.defects[1], r.ratio, r.ablation_factor
            ),
        ))
    })
}

/// Interaction residues at `V = 0` and free Vlasov transport.
pub fn zero_potential(out: &Path) -> Outcome {
    timed(8, "V=0 annihilation", 120.0, || {
        let mut config = RunConfig::coupled(2);
        config.grid.potential = PotentialKind::Zero;
        config.kick = 0.4;
        config.out = out.to_path_buf();
        let dir = crate::run_experiment(&config)?;
        let records = read_records(&dir)?;
        let residue = records
            .iter()
            .find(|r| r.observable == "interaction_residues_at_zero_potential")
            .map(|r| r.value)
            .ok_or_else(|| {
                HarnessError::Config("zero-potential run lacks its residue check".into())
            })?;
        // Direct evaluation as well, away from the run plumbing.
        let g = make_grid(1, 64, 12.0, 0.5, 2)?;
        let st = build_slater(&g, &shifted_gaussians(&g, 2, 0.8))?;
        let direct = semiclassical_residue_pairing(
            &st,
            &CoherentFrame::gaussian(&g)?,
            &Potential::zero(&g)?,
            &PhaseLattice::default_for(&g),
            &bump(0.3, 2.0),
            &bump(0.2, 2.0),
        )?;
        let l1 = free_transport_error()?;
        let ok = residue < 1e-12 && direct < 1e-12 && l1 < 1e-3;
        Ok((ok, format!("R_s + R_m pairings {residue:.1e} and {direct:.1e} (< 1e-12), free transport L1 {l1:.2e} (< 1e-3)")))
    })
}

fn free_transport_error() -> Result<f64, HarnessError> {
    let g = make_grid(1, 64, 12.0, 0.5, 1)?;
    let f0 = |q: f64, p: f64| (-(q + 1.0).powi(2) / 0.72 - (p - 0.5).powi(2) / 0.5).exp();
    let mut st = VlasovState::from_fn(&g, 256, 256, 4.0, f0)?;
    let zero = Potential::zero(&g)?;
    let m0 = st.mass();
    Vlasov::new(&st, &zero, 0.01).run(&mut st, 100)?;
    let mut l1 = 0.0;
    for (i, &q) in st.qs.iter().enumerate() {
        for (j, &p) in st.ps.iter().enumerate() {
            l1 += (st.get(i, j) - f0(g.wrap(q - p * st.time), p)).abs();
        }
    }
    Ok(l1 * st.kappa() * st.dq * st.dp / m0)
}

/// Fock-path mixed norm against `N`.
pub fn mixed_norm_scaling() -> Outcome {
    timed(9, "mixed-norm scaling", 300.0, || {
        let s = fock_path_scaling(8, &[2, 3, 4], 0.3)?;
        let in_sector = s
            .reports
            .iter()
            .zip(&s.ns)
            .all(|(r, &n)| (r.n - n as f64).abs() < 1e-10);
        Ok((
            s.slope <= 1.3 && s.r2 > 0.9 && in_sector,
            format!(
                "norms {:.3}/{:.3}/{:.3}, slope {:.3} (<= 1.3), r2 {:.4} (> 0.9)",
                s.norms[0], s.norms[1], s.norms[2], s.slope, s.r2
            ),
        ))
    })
}

/// Configs of the coupled sweep at `N = 2, 3, 4`.
pub fn coupled_configs(out: &Path) -> Vec<RunConfig> {
    let mut base = RunConfig::coupled(2);
    base.out = out.to_path_buf();
    base.frame = FrameKind::Gaussian;
    base.orbitals = OrbitalFamily::Hermite { omega: 1.0 };
    base.expand(crate::Preset::Coupled)
}

/// Residue ordering and monotonicity along the coupled sweep.
pub fn residue_ordering(out: &Path, jobs: usize) -> Outcome {
    timed(10, "residue ordering", 1800.0, || {
        let configs = coupled_configs(out);
        let dirs = run_sweep(&configs, jobs)
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        let s = aggregate(&dirs)?;
        let slopes: Vec<String> = s
            .slopes
            .iter()
            .filter(|r| r.observable.starts_with("pairing_"))
            .map(|r| {
                format!(
                    "{} {:.2}",
                    r.observable.trim_start_matches("pairing_"),
                    r.slope
                )
            })
            .collect();
        std::fs::write(out.join("sweep_summary.json"), s.to_json())?;
        Ok((
            s.ordering_holds
                && s.monotone == [true, true, true]
                && s.runs.len() == 3
                && s.hard_failures.is_empty(),
            format!(
                "ordering {}, monotone {:?}, slopes vs hbar: {}, {} of {} hard checks failed",
                s.ordering_holds,
                s.monotone,
                slopes.join(", "),
                s.hard_failures.len(),
                s.hard_checks
            ),
        ))
    })
}

/// Extra acceptance runs beyond the sweep: the smoke config and a
/// unit-horizon interacting pair.
pub fn battery_configs(out: &Path) -> Vec<RunConfig> {
    let mut smoke = RunConfig::minimal();
    smoke.out = out.to_path_buf();
    let mut long = RunConfig::coupled(2);
    long.grid.potential = PotentialKind::Gaussian {
        amplitude: 1.0,
        width: 1.0,
    };
    long.orbitals = OrbitalFamily::ShiftedGaussian {
        width: 0.8,
        spacing: 1.6,
    };
    long.horizon = 1.0;
    long.dt = 1e-3;
    long.checkpoints = 10;
    long.out = out.to_path_buf();
    vec![smoke, long]
}

const CONSERVATION: [&str; 3] = ["nbody_", "hf_", "vlasov_"];

/// Every conservation check of every acceptance run under `out`.
pub fn conservation_battery(out: &Path, jobs: usize) -> Outcome {
    timed(11, "conservation battery", 1800.0, || {
        let extra = run_sweep(&battery_configs(out), jobs)
            .into_iter()
            .collect::<Result<Vec<PathBuf>, _>>()?;
        let mut dirs = crate::sweep::run_dirs(out)?;
        for d in extra {
            if !dirs.contains(&d) {
                dirs.push(d);
            }
        }
        let mut checks: Vec<SweepRecord> = Vec::new();
        for d in &dirs {
            checks.extend(read_records(d)?.into_iter().filter(|r| {
                r.is_hard() && CONSERVATION.iter().any(|p| r.observable.starts_with(p))
            }));
        }
        let (_, norm, drift) = consistency_state()?;
        let base_ok = norm < 1e-10 && drift < 1e-8;
        let failed: Vec<String> = checks
            .iter()
            .filter(|r| r.passed == Some(false))
            .map(|r| format!("{}:{}={:.2e}", r.run, r.observable, r.value))
            .collect();
        let ok = failed.is_empty() && base_ok && !checks.is_empty();
        Ok((
            ok,
            if failed.is_empty() {
                format!(
                    "{} checks over {} runs, consistency base state norm {norm:.1e} energy {drift:.1e}",
                    checks.len(),
                    dirs.len()
                )
            } else {
                format!("failed: {}", failed.join(", "))
            },
        ))
    })
}

/// All criteria in order; runs are written below `out`.
pub fn evaluate_all(out: &Path, seed: u64, jobs: usize) -> Vec<Outcome> {
    vec![
        car_exactness(),
        second_quantization_bounds(seed),
        bogoliubov_relations(seed),
        husimi_properties(seed),
        gaussian_bridge(),
        oscillation_rates(),
        reformulation_consistency(),
        zero_potential(out),
        mixed_norm_scaling(),
        residue_ordering(out, jobs),
        conservation_battery(out, jobs),
    ]
}
