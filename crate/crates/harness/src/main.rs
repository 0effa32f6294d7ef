//! `husimi-lab` command line.
//!
//! The N-body amplitude budget defaults to `2^26` and can be raised or
//! lowered with the `HUSIMI_LAB_BUDGET` environment variable.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use husimi_grid::Potential;
use husimi_harness::acceptance::{self, Outcome};
use husimi_harness::{
    aggregate, run_dirs, run_experiment, run_sweep, HarnessError, Preset, RunConfig, SweepSummary,
};
use husimi_manybody::{gamma1, ManyBodyState};
use husimi_phasespace::{husimi1, wigner1, Factorized, Refinement};
use husimi_residues::{reformulation_consistency, residue_report};

#[derive(Parser)]
#[command(
    name = "husimi-lab",
    version,
    about = "Husimi phase-space experiments for small fermion systems"
)]
struct Cli {
    /// Run configuration, TOML or JSON. Defaults to the minimal config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output root.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relation between hbar and N for sweeps.
    #[arg(long, global = true, value_enum, default_value = "coupled")]
    preset: Preset,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One full run into `<out>/run-<hash>`.
    Simulate,
    /// One run per sweep point, then the aggregate.
    Sweep,
    /// Husimi and Wigner tables of a state snapshot.
    Transform { snapshot: PathBuf },
    /// Residue pairings of one snapshot, or the identity defect of three
    /// equally spaced snapshots.
    Residues {
        #[arg(num_args = 1..=3, required = true)]
        snapshots: Vec<PathBuf>,
    },
    /// Fock-space checks: CAR, number bounds, Bogoliubov relations.
    FockCheck,
    /// Aggregates the runs below `<out>` and prints the slope table.
    Report,
    /// Every acceptance criterion.
    Acceptance,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli, fallback: RunConfig) -> Result<RunConfig, HarnessError> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => fallback,
    };
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(o) = &cli.out {
        c.out = o.clone();
    }
    Ok(c)
}

fn dispatch(cli: &Cli) -> Result<bool, HarnessError> {
    match &cli.command {
        Command::Simulate => {
            let c = load_config(cli, RunConfig::minimal())?;
            let dir = run_experiment(&c)?;
            println!("{}", dir.display());
            let records = husimi_harness::read_records(&dir)?;
            let failed: Vec<_> = records.iter().filter(|r| r.passed == Some(false)).collect();
            for r in &failed {
                println!(
                    "FAIL {} = {:e} (tolerance {:e})",
                    r.observable,
                    r.value,
                    r.tolerance.unwrap_or(0.0)
                );
            }
            Ok(failed.is_empty())
        }
        Command::Sweep => {
            let base = load_config(cli, RunConfig::coupled(2))?;
            let configs = base.expand(cli.preset);
            let results = run_sweep(&configs, cli.jobs);
            let mut dirs = Vec::new();
            for r in results {
                match r {
                    Ok(d) => dirs.push(d),
                    Err(e) => eprintln!("run failed: {e}"),
                }
            }
            std::fs::create_dir_all(&base.out)?;
            let summary = aggregate(&run_dirs(&base.out)?)?;
            std::fs::write(base.out.join("sweep_summary.json"), summary.to_json())?;
            print_summary(&summary);
            Ok(summary.failed_runs.is_empty() && summary.hard_failures.is_empty())
        }
        Command::Transform { snapshot } => {
            let c = load_config(cli, RunConfig::minimal())?;
            let state = ManyBodyState::read_snapshot(snapshot, c.grid.l)?;
            let frame = c.frame.build(&state.grid)?;
            let lattice = c.lattice.build(&state.grid)?;
            let gamma = Factorized::from_kernel(&gamma1(&state));
            std::fs::create_dir_all(&c.out)?;
            let stem = stem(snapshot);
            let h = husimi1(&gamma, &frame, &lattice)?;
            let hp = c.out.join(format!("{stem}_husimi.csv"));
            h.write_csv(&hp)?;
            let wp = c.out.join(format!("{stem}_wigner.csv"));
            wigner1(&gamma, &state.grid, state.grid.n, Refinement::Cubic)?.write_csv(&wp)?;
            println!("{}\n{}", hp.display(), wp.display());
            Ok(true)
        }
        Command::Residues { snapshots } => {
            let c = load_config(cli, RunConfig::minimal())?;
            let states = snapshots
                .iter()
                .map(|p| ManyBodyState::read_snapshot(p, c.grid.l))
                .collect::<Result<Vec<_>, _>>()?;
            let grid = &states[0].grid;
            let v = Potential::new(grid, c.grid.potential.clone())?;
            let frame = c.frame.build(grid)?;
            let lattice = c.lattice.build(grid)?;
            let (phi_q, phi_p) = c.test_functions();
            let json = match states.len() {
                1 => serde_json::to_string_pretty(&residue_report(
                    &states[0], &frame, &v, &lattice, &phi_q, &phi_p,
                )?)?,
                3 => serde_json::to_string_pretty(&reformulation_consistency(
                    &states, &frame, &v, &lattice, &phi_q, &phi_p,
                )?)?,
                k => {
                    return Err(HarnessError::Config(format!(
                        "need 1 or 3 snapshots, got {k}"
                    )))
                }
            };
            println!("{json}");
            Ok(true)
        }
        Command::FockCheck => {
            let seed = cli.seed.unwrap_or(0);
            Ok(print_outcomes(&[
                acceptance::car_exactness(),
                acceptance::second_quantization_bounds(seed),
                acceptance::bogoliubov_relations(seed),
            ]))
        }
        Command::Report => {
            let root = cli.out.clone().unwrap_or_else(|| PathBuf::from("runs"));
            let summary = aggregate(&run_dirs(&root)?)?;
            print_summary(&summary);
            Ok(summary.hard_failures.is_empty())
        }
        Command::Acceptance => {
            let root = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("acceptance-runs"));
            std::fs::create_dir_all(&root)?;
            Ok(print_outcomes(&acceptance::evaluate_all(
                &root,
                cli.seed.unwrap_or(0),
                cli.jobs,
            )))
        }
    }
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "state".into())
}

fn print_outcomes(outcomes: &[Outcome]) -> bool {
    for o in outcomes {
        println!("{}", o.line());
    }
    outcomes.iter().all(|o| o.passed)
}

fn print_summary(s: &SweepSummary) {
    println!("{:<8} {:>4} run", "hbar", "N");
    for ((run, h), n) in s.runs.iter().zip(&s.hbars).zip(&s.ns) {
        println!("{h:<8.4} {n:>4} {run}");
    }
    println!("\n{:<24} {:>8} {:>8}", "observable", "slope", "r2");
    for row in &s.slopes {
        println!("{:<24} {:>8.3} {:>8.4}", row.observable, row.slope, row.r2);
    }
    println!(
        "\nordering R_m < R_s: {}  monotone (kinetic, R_s, R_m): {:?}",
        s.ordering_holds, s.monotone
    );
    println!(
        "hard checks: {}, failures: {}",
        s.hard_checks,
        s.hard_failures.len()
    );
    for r in &s.hard_failures {
        println!("FAIL {} {} = {:e}", r.run, r.observable, r.value);
    }
    for r in &s.failed_runs {
        println!("FAILED RUN {r}");
    }
}
