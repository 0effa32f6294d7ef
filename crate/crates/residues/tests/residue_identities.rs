use std::f64::consts::PI;

use husimi_grid::{make_grid, GridSpec, Potential, PotentialKind, TestFunction};
use husimi_manybody::orbitals::{hermite, orthonormalize, shifted_gaussians};
use husimi_manybody::{
    build_slater, gamma1, gamma2_dense, pair_diagonal, Complex64, ManyBodyState, OneBodyKernel,
    PairDiagonal, Propagator,
};
use husimi_phasespace::{CoherentFrame, PhaseLattice};
use husimi_residues::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bump(center: f64, radius: f64) -> TestFunction {
    TestFunction::on_points(Vec::new(), center, radius, 2)
}

fn kicked(grid: &GridSpec, orbs: Vec<Vec<Complex64>>, p0: f64) -> Vec<Vec<Complex64>> {
    orbs.into_iter()
        .map(|o| {
            o.into_iter()
                .enumerate()
                .map(|(j, a)| a * Complex64::from_polar(1.0, p0 * grid.position(j) / grid.hbar))
                .collect()
        })
        .collect()
}

fn random_orbitals(grid: &GridSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let raw = (0..n)
        .map(|_| {
            let c = rng.random_range(-2.0..2.0);
            let p = rng.random_range(-1.0..1.0);
            (0..grid.m)
                .map(|j| {
                    let x = grid.position(j) - c;
                    Complex64::from_polar((-x * x).exp(), p * x / grid.hbar)
                        + Complex64::new(
                            rng.random_range(-0.05..0.05),
                            rng.random_range(-0.05..0.05),
                        )
                })
                .collect()
        })
        .collect();
    orthonormalize(grid, raw)
}

/// `(Slater(a) + Slater(b)) / norm`, a correlated state.
fn superposed(grid: &GridSpec, rng: &mut ChaCha8Rng) -> ManyBodyState {
    let a = build_slater(grid, &random_orbitals(grid, grid.n, rng)).unwrap();
    let b = build_slater(grid, &random_orbitals(grid, grid.n, rng)).unwrap();
    let amps: Vec<Complex64> = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x + y * 0.7)
        .collect();
    let norm =
        (amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx.powi(grid.n as i32)).sqrt();
    ManyBodyState::new(
        grid.clone(),
        amps.into_iter().map(|z| z / norm).collect(),
        0.0,
    )
    .unwrap()
}

fn slater_kernel(orbs: &[Vec<Complex64>]) -> impl Fn(usize, usize) -> Complex64 + '_ {
    move |x, y| orbs.iter().map(|o| o[x] * o[y].conj()).sum::<Complex64>()
}

#[test]
fn zero_potential_annihilates_interaction_residues() {
    let grid = make_grid(1, 64, 12.0, 0.5, 2).unwrap();
    let v = Potential::zero(&grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let st = superposed(&grid, &mut rng);
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::default_for(&grid);
    let (pq, pp) = (bump(0.4, 2.5), bump(0.1, 2.0));
    assert_eq!(
        semiclassical_residue_pairing(&st, &frame, &v, &lat, &pq, &pp).unwrap(),
        0.0
    );
    assert_eq!(
        meanfield_residue_pairing(&st, &frame, &v, &lat, &pq, &pp).unwrap(),
        0.0
    );
    let r = residue_report(&st, &frame, &v, &lat, &pq, &pp).unwrap();
    assert!(r.pairing_kinetic > 0.0);
    assert!(r.pairing_semiclassical < 1e-12 && r.pairing_meanfield < 1e-12);
}

#[test]
fn constant_force_cancels_in_semiclassical_bracket() {
    let grid = make_grid(1, 64, 12.0, 0.5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let st = superposed(&grid, &mut rng);
    let pair = pair_diagonal(&st);
    let inter = Interaction {
        pair: &pair,
        grad: Box::new(|_| 1.3),
    };
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::default_for(&grid);
    let f = residue_fields(&frame, &gamma1(&st), Some(&inter), 2, &lat).unwrap();
    let max_s = f
        .semiclassical
        .iter()
        .chain(&f.dp_semiclassical)
        .fold(0.0f64, |a, b| a.max(b.abs()));
    assert!(max_s < 1e-8, "R_s = {max_s:e}");
    // The mean-field part does not vanish: the state is correlated.
    assert!(f.meanfield.iter().any(|v| v.abs() > 1e-4));
}

#[test]
fn kinetic_residue_odd_in_momentum_for_real_states() {
    let grid = GridSpec::coupled(1, 64, 12.0, 2).unwrap();
    let st = build_slater(&grid, &hermite(&grid, 2, 1.0)).unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::default_for(&grid);
    // Even momentum test function against an odd field.
    let even =
        kinetic_residue_pairing(&st, &frame, &lat, &bump(0.4, 2.0), &bump(0.0, 2.0)).unwrap();
    assert!(even < 1e-10, "{even:e}");
    let odd = kinetic_residue_pairing(&st, &frame, &lat, &bump(0.4, 2.0), &bump(0.5, 2.0)).unwrap();
    assert!(odd > 1e-4, "{odd:e}");
}

#[test]
fn kinetic_residue_reads_only_state_and_frame() {
    let grid = make_grid(1, 64, 12.0, 0.5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let st = superposed(&grid, &mut rng);
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::default_for(&grid);
    let (pq, pp) = (bump(-0.2, 2.0), bump(0.3, 1.5));
    let a = kinetic_residue_pairing(&st, &frame, &lat, &pq, &pp).unwrap();
    for kind in [
        PotentialKind::Gaussian {
            amplitude: 2.0,
            width: 0.5,
        },
        PotentialKind::Bump {
            amplitude: -1.0,
            radius: 3.0,
        },
    ] {
        let v = Potential::new(&grid, kind).unwrap();
        let r = residue_report(&st, &frame, &v, &lat, &pq, &pp).unwrap();
        assert_eq!(r.pairing_kinetic, a);
    }
}

#[test]
fn by_parts_pairings_match_pointwise_derivatives() {
    let grid = make_grid(1, 64, 12.0, 0.5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let st = superposed(&grid, &mut rng);
    let v = Potential::new(
        &grid,
        PotentialKind::Gaussian {
            amplitude: 1.0,
            width: 1.0,
        },
    )
    .unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::strided(&grid, 1, 1).unwrap();
    let f = state_fields(&st, &frame, &v, &lat).unwrap();
    let (pq, pp) = (bump(0.3, 3.0), bump(0.2, 3.0));
    let pairs = [
        (&f.kinetic, &f.dq_kinetic, true),
        (&f.semiclassical, &f.dp_semiclassical, false),
        (&f.meanfield, &f.dp_meanfield, false),
        (&f.main, &f.dp_main, false),
    ];
    for (field, deriv, in_q) in pairs {
        let by_parts = if in_q {
            -f.pair(field, &pq, 1, &pp, 0)
        } else {
            -f.pair(field, &pq, 0, &pp, 1)
        };
        let direct = f.pair(deriv, &pq, 0, &pp, 0);
        assert!(
            (by_parts - direct).abs() < 1e-6 * (1.0 + direct.abs()),
            "{by_parts:e} vs {direct:e}"
        );
    }
}

#[test]
fn main_term_is_vlasov_force_times_husimi() {
    use husimi_phasespace::{husimi1, Factorized};
    let grid = make_grid(1, 64, 12.0, 0.5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let st = superposed(&grid, &mut rng);
    let v = Potential::new(
        &grid,
        PotentialKind::Bump {
            amplitude: 1.0,
            radius: 2.0,
        },
    )
    .unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::strided(&grid, 2, 1).unwrap();
    let f = state_fields(&st, &frame, &v, &lat).unwrap();
    // Oracle: rho(q) = int |g_q(z)|^2 gamma(z,z) dz / N, force = sum V'(q - q2) rho(q2) dq2.
    let g = gamma1(&st);
    let xs = grid.positions();
    let rho: Vec<f64> = xs
        .iter()
        .map(|&q2| {
            let w = frame.window_on_grid(q2);
            (0..grid.m)
                .map(|z| w[z] * w[z] * g.get(z, z).re)
                .sum::<f64>()
                * grid.dx
                / 2.0
        })
        .collect();
    let h = husimi1(&Factorized::from_kernel(&g), &frame, &lat).unwrap();
    let np = lat.ps.len();
    for (iq, &q) in lat.qs.iter().enumerate() {
        let force: f64 = xs
            .iter()
            .zip(&rho)
            .map(|(&q2, r)| v.grad_at(q - q2) * r)
            .sum::<f64>()
            * grid.dx;
        for k in 0..np {
            let want = force * h.values[iq * np + k];
            let got = f.main[iq * np + k];
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}

/// Residues by the literal coherent-state resolution over the full `(q2, p2)`
/// lattice against the dense `gamma2`, without the Dirac collapse.
struct Oracle {
    grid: GridSpec,
    frame: CoherentFrame,
    lattice: PhaseLattice,
    g2: Vec<Complex64>,
    gamma: Box<dyn Fn(usize, usize) -> Complex64>,
    v: Potential,
}

impl Oracle {
    fn g2(&self, u1: usize, u2: usize, w1: usize, w2: usize) -> Complex64 {
        let m = self.grid.m;
        self.g2[((u1 * m + u2) * m + w1) * m + w2]
    }

    /// `P(u,w) = sum_{q2,p2} g(w) conj g(u) dq dp / (2 pi hbar)` and the same
    /// weighted by `V'(q - q2)`.
    fn resolutions(&self, q: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let grid = &self.grid;
        let m = grid.m;
        let mut p = vec![Complex64::new(0.0, 0.0); m * m];
        let mut pq = p.clone();
        let w = grid.dx * grid.dp() / (2.0 * PI * grid.hbar);
        for j in 0..m {
            let q2 = grid.position(j);
            let vg = self.v.grad_at(q - q2);
            for k in 0..m {
                let g = self.frame.vector(q2, grid.momentum(k));
                for u in 0..m {
                    for ww in 0..m {
                        let c = g[ww] * g[u].conj() * w;
                        p[u * m + ww] += c;
                        pq[u * m + ww] += c * vg;
                    }
                }
            }
        }
        (p, pq)
    }

    /// `(R_s, R_m)` at every lattice point.
    fn fields(&self) -> (Vec<f64>, Vec<f64>) {
        let grid = &self.grid;
        let m = grid.m;
        let dx = grid.dx;
        let n = grid.n as f64;
        let mut rs = Vec::new();
        let mut rm = Vec::new();
        for &q in &self.lattice.qs {
            let (p, pq) = self.resolutions(q);
            for &pm in &self.lattice.ps {
                let g = self.frame.vector(q, pm);
                let (mut s_acc, mut m_acc) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for x in 0..m {
                    for y in 0..m {
                        let cg = g[x].conj() * g[y];
                        if cg.norm() < 1e-300 {
                            continue;
                        }
                        let h = grid.wrap(grid.position(x) - grid.position(y));
                        for u2 in 0..m {
                            for w2 in 0..m {
                                let gg = self.g2(x, u2, y, w2);
                                // Exact segment average of V' on [y~, x~] - w2.
                                let seg = if h == 0.0 {
                                    self.v.grad_at(grid.position(x) - grid.position(w2))
                                } else {
                                    (self.v.value_at(grid.position(x) - grid.position(w2))
                                        - self.v.value_at(grid.position(y) - grid.position(w2)))
                                        / h
                                };
                                let (pr, pqr) = (p[u2 * m + w2], pq[u2 * m + w2]);
                                s_acc += cg * (pr * seg - pqr) * gg;
                                let fact = (self.gamma)(x, y) * (self.gamma)(u2, w2);
                                m_acc += cg * pqr * (gg - fact);
                            }
                        }
                    }
                }
                rs.push((s_acc * dx.powi(4) / n).re);
                rm.push((m_acc * dx.powi(4) / n).re);
            }
        }
        (rs, rm)
    }
}

#[test]
fn interaction_residues_match_dense_resolution_oracle() {
    let grid = make_grid(1, 16, 8.0, 0.1, 2).unwrap();
    let orbs = kicked(&grid, shifted_gaussians(&grid, 2, 0.7), 0.3);
    let st = build_slater(&grid, &orbs).unwrap();
    let v = Potential::new(
        &grid,
        PotentialKind::Gaussian {
            amplitude: 1.0,
            width: 1.5,
        },
    )
    .unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lattice = PhaseLattice::strided(&grid, 2, 2).unwrap();
    let f = state_fields(&st, &frame, &v, &lattice).unwrap();
    let orbs2 = orbs.clone();
    let oracle = Oracle {
        grid: grid.clone(),
        frame: frame.clone(),
        lattice: lattice.clone(),
        g2: gamma2_dense(&st).unwrap(),
        gamma: Box::new(move |x, y| slater_kernel(&orbs2)(x, y)),
        v: v.clone(),
    };
    let (rs, rm) = oracle.fields();
    let top = rs.iter().chain(&rm).fold(0.0f64, |a, b| a.max(b.abs()));
    assert!(top > 1e-4);
    for i in 0..rs.len() {
        assert!(
            (rs[i] - f.semiclassical[i]).abs() < 1e-8,
            "R_s {} vs {}",
            f.semiclassical[i],
            rs[i]
        );
        assert!(
            (rm[i] - f.meanfield[i]).abs() < 1e-10,
            "R_m {} vs {}",
            f.meanfield[i],
            rm[i]
        );
    }
    let (pq, pp) = (bump(0.3, 2.0), bump(0.5, 1.5));
    let want = (f.pair(&rm, &pq, 0, &pp, 1)).abs();
    let got = meanfield_residue_pairing(&st, &frame, &v, &lattice, &pq, &pp).unwrap();
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn slater_meanfield_defect_is_pure_exchange() {
    // For a Slater state gamma2 - gamma1 (x) gamma1 = -exchange; the field
    // built from the exchange kernel alone must agree.
    let grid = make_grid(1, 16, 8.0, 0.1, 2).unwrap();
    let orbs = kicked(&grid, shifted_gaussians(&grid, 2, 0.7), -0.4);
    let st = build_slater(&grid, &orbs).unwrap();
    let v = Potential::new(
        &grid,
        PotentialKind::Gaussian {
            amplitude: 1.0,
            width: 1.5,
        },
    )
    .unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lattice = PhaseLattice::full(&grid);
    let f = state_fields(&st, &frame, &v, &lattice).unwrap();
    let om = slater_kernel(&orbs);
    let m = grid.m;
    let exch = PairDiagonal::from_fn(m, grid.dx, |u, w, y| {
        om(u, w) * om(y, y) - om(u, y) * om(y, w)
    });
    let gamma = OneBodyKernel::new(grid.dx, nalgebra::DMatrix::from_fn(m, m, |x, y| om(x, y)));
    let inter = Interaction::from_potential(&exch, &v);
    let fx = residue_fields(&frame, &gamma, Some(&inter), 2, &lattice).unwrap();
    for (a, b) in f.meanfield.iter().zip(&fx.meanfield) {
        assert!((a - b).abs() < 1e-12);
    }
    let top = f.meanfield.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    assert!(top > 1e-6, "{top:e}");
}

#[test]
fn coupled_sweep_orders_and_decreases() {
    let r = coupled_sweep(&SweepConfig::default()).unwrap();
    for p in &r.points {
        println!(
            "N={} hbar={:.3} kinetic={:.4e} semiclassical={:.4e} meanfield={:.4e} L5/4={:.3e}",
            p.n,
            p.hbar,
            p.report.pairing_kinetic,
            p.report.pairing_semiclassical,
            p.report.pairing_meanfield,
            p.report.kinetic_l54
        );
        assert!(p.report.kinetic_l54.is_finite() && p.report.kinetic_l1.is_finite());
    }
    println!(
        "slopes: kinetic {:.3} (r2 {:.3}), semiclassical {:.3}, meanfield {:.3}",
        r.kinetic.slope, r.kinetic.r2, r.semiclassical.slope, r.meanfield.slope
    );
    assert!(r.ordering_holds);
    assert_eq!(r.monotone, [true, true, true]);
    assert!(r.kinetic.slope > 0.0);
    // Aggregate decreases with hbar as well.
    let l54: Vec<f64> = r.points.iter().map(|p| p.report.kinetic_l54).collect();
    assert!(l54.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(r.exponents.len(), 5);
    assert!(r.exponents.iter().any(|e| e.semiclassical_3d_negative));
    let back: SweepReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back.to_json(), r.to_json());
}

#[test]
fn alpha_exponent_table() {
    let t = alpha_exponents(3);
    assert_eq!(
        t.iter().map(|e| e.alpha).collect::<Vec<_>>(),
        ALPHA_GRID.to_vec()
    );
    for e in &t {
        assert!((e.semiclassical - e.semiclassical_3d).abs() < 1e-15);
        assert!((e.meanfield - e.meanfield_3d).abs() < 1e-15);
        assert_eq!(e.semiclassical_3d_negative, e.alpha < 5.0 / 6.0);
    }
}

#[test]
fn transport_identity_without_interaction() {
    let grid = make_grid(1, 128, 12.0, 0.5, 1).unwrap();
    let v = Potential::zero(&grid).unwrap();
    let orbs = kicked(&grid, shifted_gaussians(&grid, 1, 0.8), 0.7);
    let st = build_slater(&grid, &orbs).unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::default_for(&grid);
    let r = consistency_refinement(
        &st,
        &frame,
        &v,
        &lat,
        &bump(0.5, 2.5),
        &bump(0.3, 2.0),
        1e-3,
    )
    .unwrap();
    assert!(r.defects[0] < 1e-6, "{:e}", r.defects[0]);
    assert_eq!(r.reports[0].terms.semiclassical, 0.0);
    assert_eq!(r.reports[0].terms.meanfield, 0.0);
}

#[test]
fn consistency_is_second_order_with_bump_potential() {
    let grid = make_grid(1, 64, 12.0, 0.5, 2).unwrap();
    let v = Potential::new(
        &grid,
        PotentialKind::Bump {
            amplitude: 1.0,
            radius: 2.0,
        },
    )
    .unwrap();
    let orbs = kicked(&grid, shifted_gaussians(&grid, 2, 0.8), 0.7);
    let mut st = build_slater(&grid, &orbs).unwrap();
    Propagator::new(&grid, &v, 0.01)
        .unwrap()
        .run(&mut st, 10)
        .unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::default_for(&grid);
    let r = consistency_refinement(
        &st,
        &frame,
        &v,
        &lat,
        &bump(0.5, 2.5),
        &bump(0.3, 2.0),
        0.04,
    )
    .unwrap();
    println!(
        "defects {:?} ratio {:.3} ablation {:.1}",
        r.defects, r.ratio, r.ablation_factor
    );
    assert!((3.2..=4.8).contains(&r.ratio), "ratio {}", r.ratio);
    assert!(r.ablation_factor > 10.0);
}

#[test]
fn consistency_refuses_bad_trajectories() {
    let grid = make_grid(1, 32, 12.0, 0.5, 1).unwrap();
    let v = Potential::zero(&grid).unwrap();
    let st = build_slater(&grid, &shifted_gaussians(&grid, 1, 0.8)).unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::default_for(&grid);
    let (pq, pp) = (bump(0.0, 2.0), bump(0.0, 2.0));
    let mut later = st.clone();
    later.time = 0.1;
    let mut latest = st.clone();
    latest.time = 0.3;
    let e = reformulation_consistency(
        &[st.clone(), later.clone(), latest],
        &frame,
        &v,
        &lat,
        &pq,
        &pp,
    )
    .unwrap_err();
    assert!(matches!(e, ResidueError::NonUniform { .. }));
    let e = reformulation_consistency(&[st, later], &frame, &v, &lat, &pq, &pp).unwrap_err();
    assert!(matches!(e, ResidueError::Snapshots(2)));
}

#[test]
fn residue_fields_need_grid_lattice() {
    let grid = make_grid(1, 32, 12.0, 0.5, 1).unwrap();
    let st = build_slater(&grid, &shifted_gaussians(&grid, 1, 0.8)).unwrap();
    let frame = CoherentFrame::gaussian(&grid).unwrap();
    let lat = PhaseLattice::custom(vec![0.0, 0.1], vec![0.0, 0.2], 0.1, 0.2);
    let e =
        kinetic_residue_pairing(&st, &frame, &lat, &bump(0.0, 1.0), &bump(0.0, 1.0)).unwrap_err();
    assert!(matches!(e, ResidueError::Lattice(_)));
}

#[test]
fn slater_mixed_norm_is_exchange_norm() {
    let grid = make_grid(1, 32, 10.0, 0.5, 2).unwrap();
    let orbs = kicked(&grid, shifted_gaussians(&grid, 2, 0.9), 0.5);
    let st = build_slater(&grid, &orbs).unwrap();
    let omega = OneBodyKernel::from_orbitals(&grid, &orbs);
    let r = mixed_norm_of_state(&st, &omega).unwrap();
    assert!(r.t2_part < 1e-12 && r.t3_part < 1e-12);
    // Closed form: int dy |omega(u,y) omega(y,w)|, then the L2 norm.
    let om = slater_kernel(&orbs);
    let m = grid.m;
    let dx = grid.dx;
    let mut total = 0.0;
    for u in 0..m {
        for w in 0..m {
            let t: f64 = (0..m).map(|y| (om(u, y) * om(y, w)).norm()).sum::<f64>() * dx;
            total += t * t;
        }
    }
    let want = (total * dx * dx).sqrt();
    assert!(
        (r.mixed_norm - want).abs() < 1e-10 * want,
        "{} vs {want}",
        r.mixed_norm
    );
    assert!((r.t1_part - want).abs() < 1e-10 * want);
    // Dense two-body kernel gives the same pair diagonal.
    let g2 = gamma2_dense(&st).unwrap();
    let pd = pair_diagonal(&st);
    for u in 0..m {
        for w in 0..m {
            for y in 0..m {
                let d = g2[((u * m + y) * m + w) * m + y];
                assert!((d - pd.get(u, w, y)).norm() < 1e-12);
            }
        }
    }
    let back: MixedNormReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back.to_json(), r.to_json());
}

#[test]
fn factorized_two_body_kernel_has_no_t1() {
    let grid = make_grid(1, 32, 10.0, 0.5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let om_orbs = random_orbitals(&grid, 2, &mut rng);
    let omega = OneBodyKernel::from_orbitals(&grid, &om_orbs);
    let st = superposed(&grid, &mut rng);
    let gamma = gamma1(&st);
    let m = grid.m;
    let o = |x, y| omega.get(x, y);
    let pd = PairDiagonal::from_fn(m, grid.dx, |u, w, y| o(u, w) * o(y, y));
    let r = mixed_norm(&pd, &gamma, &omega).unwrap();
    assert!(r.t1_part < 1e-14);
    // Recombination: gamma2 - gamma gamma = T2 + T3 exactly.
    let g = |x, y| gamma.get(x, y);
    let mut total = 0.0;
    for u in 0..m {
        for w in 0..m {
            let t: f64 = (0..m)
                .map(|y| ((o(u, w) - g(u, w)) * o(y, y) + g(u, w) * (o(y, y) - g(y, y))).norm())
                .sum::<f64>()
                * grid.dx;
            total += t * t;
        }
    }
    let want = (total * grid.dx * grid.dx).sqrt();
    assert!((r.mixed_norm - want).abs() < 1e-10 * want);
    assert!(r.triangle_slack >= -1e-8);
}

#[test]
fn fock_path_mixed_norm_scaling() {
    let s = fock_path_scaling(8, &[2, 3, 4], 0.3).unwrap();
    println!("norms {:?} slope {:.3} r2 {:.4}", s.norms, s.slope, s.r2);
    assert!(s.slope <= 1.3 && s.r2 > 0.9);
    for (r, &n) in s.reports.iter().zip(&s.ns) {
        assert!((r.n - n as f64).abs() < 1e-10);
        assert!(r.triangle_slack >= -1e-8);
        assert!(r.hs_gap > 0.0 && r.trace_gap >= r.hs_gap - 1e-12);
    }
}

#[test]
fn fock_path_unexcited_is_slater() {
    let (r, psi) = fock_path_mixed_norm(8, 3, 0.0).unwrap();
    let w = psi.sector_weights();
    assert!((w[3] - 1.0).abs() < 1e-12);
    assert!(r.t2_part < 1e-12 && r.t3_part < 1e-12 && r.hs_gap < 1e-12);
    assert!(matches!(
        fock_path_mixed_norm(4, 4, 0.1),
        Err(ResidueError::Mismatch(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn triangle_inequality_of_splitting(seed in 0u64..1000, dt in 0.0f64..0.5) {
        let grid = make_grid(1, 16, 10.0, 0.5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let orbs = random_orbitals(&grid, 2, &mut rng);
        let omega = OneBodyKernel::from_orbitals(&grid, &orbs);
        let mut st = superposed(&grid, &mut rng);
        let v = Potential::new(&grid, PotentialKind::Gaussian { amplitude: 1.0, width: 1.0 }).unwrap();
        let steps = (dt / 0.05).round() as usize;
        Propagator::new(&grid, &v, 0.05).unwrap().run(&mut st, steps).unwrap();
        let r = mixed_norm_of_state(&st, &omega).unwrap();
        prop_assert!(r.triangle_slack >= -1e-8);
    }

    #[test]
    fn fock_path_stays_in_sector(theta in 0.0f64..1.5, n in 1usize..5) {
        let (r, psi) = fock_path_mixed_norm(7, n, theta).unwrap();
        prop_assert!((psi.sector_weights()[n] - 1.0).abs() < 1e-10);
        prop_assert!((r.n - n as f64).abs() < 1e-10);
        prop_assert!(r.triangle_slack >= -1e-8);
    }
}
