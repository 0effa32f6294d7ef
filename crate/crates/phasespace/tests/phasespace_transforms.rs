use std::f64::consts::PI;

use husimi_grid::{make_grid, GridSpec, Potential, PotentialKind};
use husimi_manybody::orbitals::{hermite, orthonormalize, shifted_gaussians};
use husimi_manybody::{build_slater, gamma1, propagate, Complex64};
use husimi_phasespace::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(m: usize, l: f64, hbar: f64, n: usize) -> GridSpec {
    make_grid(1, m, l, hbar, n).unwrap()
}

fn coherent(frame: &CoherentFrame, q0: f64, p0: f64) -> Factorized {
    Factorized::from_orbitals(&frame.grid, &[frame.vector(q0, p0)])
}

fn random_orbitals(g: &GridSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    // Smooth random packets: a few random Gaussians with random momenta.
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

#[test]
fn coherent_state_peaks_at_its_centre() {
    let g = grid(128, 12.0, 0.5, 1);
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let lat = PhaseLattice::default_for(&g);
    let (q0, p0) = (lat.qs[lat.qs.len() / 2 + 3], lat.ps[lat.ps.len() / 2 - 2]);
    let h = husimi1(&coherent(&frame, q0, p0), &frame, &lat).unwrap();
    let mut best = (0, 0);
    for i in 0..h.qs.len() {
        for j in 0..h.ps.len() {
            if h.get(i, j) > h.get(best.0, best.1) {
                best = (i, j);
            }
        }
    }
    assert_eq!((h.qs[best.0], h.ps[best.1]), (q0, p0));
    assert!((h.get(best.0, best.1) - 1.0).abs() < 1e-12);
    // Overlap of two Gaussian coherent states.
    for i in 0..h.qs.len() {
        for j in 0..h.ps.len() {
            let d2 = (h.qs[i] - q0).powi(2) + (h.ps[j] - p0).powi(2);
            let exact = (-d2 / (2.0 * g.hbar)).exp();
            assert!(
                (h.get(i, j) - exact).abs() < 1e-10,
                "{} vs {exact}",
                h.get(i, j)
            );
        }
    }
}

#[test]
fn fast_path_matches_direct_quadratic_form() {
    let g = grid(64, 12.0, 0.5, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let orb = random_orbitals(&g, 2, &mut rng);
    let gamma = Factorized::from_kernel(&husimi_manybody::OneBodyKernel::from_orbitals(&g, &orb));
    for frame in [
        CoherentFrame::gaussian(&g).unwrap(),
        CoherentFrame::bump(&g).unwrap(),
    ] {
        let lat = PhaseLattice::strided(&g, 4, 4).unwrap();
        let fast = husimi1(&gamma, &frame, &lat).unwrap();
        let slow = husimi1_direct(&gamma, &frame, &lat).unwrap();
        let gap = fast
            .values
            .iter()
            .zip(&slow.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-13, "{} gap {gap}", frame.window.label());
    }
}

#[test]
fn slater_pair_integrates_to_particle_number() {
    let g = grid(128, 12.0, 0.5, 2);
    let orb = shifted_gaussians(&g, 2, 1.0);
    let state = build_slater(&g, &orb).unwrap();
    let gamma = Factorized::from_kernel(&gamma1(&state));
    assert!((gamma.trace() - 2.0).abs() < 1e-10);
    for frame in [
        CoherentFrame::gaussian(&g).unwrap(),
        CoherentFrame::bump(&g).unwrap(),
    ] {
        let lat = PhaseLattice::default_for(&g);
        let h = husimi1(&gamma, &frame, &lat).unwrap();
        assert!(!h.undersampled);
        assert!(
            (h.mass() - 2.0).abs() < 1e-4,
            "{} mass {}",
            frame.window.label(),
            h.mass()
        );
    }
}

#[test]
fn husimi_positive_and_bounded_on_random_and_propagated_states() {
    let g = grid(64, 12.0, 0.5, 2);
    let v = Potential::new(
        &g,
        PotentialKind::Gaussian {
            amplitude: 1.0,
            width: 0.7,
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gauss = CoherentFrame::gaussian(&g).unwrap();
    let bump = CoherentFrame::bump(&g).unwrap();
    let lat = PhaseLattice::default_for(&g);
    for k in 0..20 {
        let orb = random_orbitals(&g, 2, &mut rng);
        let mut state = build_slater(&g, &orb).unwrap();
        if k % 2 == 1 {
            state = propagate(&state, &v, 1e-2, 50).unwrap();
        }
        let gamma = Factorized::from_kernel(&gamma1(&state));
        for frame in [&gauss, &bump] {
            let h = husimi1(&gamma, frame, &lat).unwrap();
            assert!(h.min() >= -1e-12, "state {k}: min {}", h.min());
            assert!(h.max() <= 1.0 + 1e-8, "state {k}: max {}", h.max());
        }
    }
}

#[test]
fn two_particle_husimi_is_symmetric_and_marginalizes() {
    let g = grid(64, 12.0, 0.5, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let orb = random_orbitals(&g, 2, &mut rng);
    let state = build_slater(&g, &orb).unwrap();
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let mut z = || (rng.random_range(-4.0..4.0), rng.random_range(-3.0..3.0));
    let pairs: Vec<_> = (0..100).map(|_| (z(), z())).collect();
    let points: Vec<_> = (0..50).map(|_| z()).collect();
    let lat = PhaseLattice::strided(&g, 4, 2).unwrap();
    let rep = husimi2_marginal_check(&state, &frame, &pairs, &points, Some(&lat)).unwrap();
    assert!(rep.symmetry_defect < 1e-8, "{}", rep.symmetry_defect);
    assert!(rep.marginal_defect < 1e-4, "{}", rep.marginal_defect);
    // hbar N = 1 here, so the total mass is also checked.
    let (total, expected) = rep.normalization.expect("coupled preset");
    assert!((total - expected).abs() < 1e-4, "{total} vs {expected}");

    let g3 = grid(32, 12.0, 0.5, 3);
    let s3 = build_slater(&g3, &hermite(&g3, 3, 1.0)).unwrap();
    let f3 = CoherentFrame::gaussian(&g3).unwrap();
    let rep = husimi2_marginal_check(&s3, &f3, &pairs[..10], &points[..5], Some(&lat)).unwrap();
    assert!(rep.symmetry_defect < 1e-8);
    assert!(rep.marginal_defect < 1e-4, "{}", rep.marginal_defect);
    assert!(rep.normalization.is_none(), "decoupled preset");
}

#[test]
fn two_particle_husimi_of_product_frame_pair() {
    // For a Slater pair m2 = m_a m_b + m_a' m_b' - 2 Re(...) reduces to a 2x2
    // determinant of overlaps.
    let g = grid(64, 12.0, 0.5, 2);
    let orb = shifted_gaussians(&g, 2, 1.0);
    let state = build_slater(&g, &orb).unwrap();
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let (z1, z2) = ((-0.7, 0.4), (1.1, -0.9));
    let ov = |z: (f64, f64), e: &[Complex64]| -> Complex64 {
        frame
            .vector(z.0, z.1)
            .iter()
            .zip(e)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * g.dx
    };
    let det = ov(z1, &orb[0]) * ov(z2, &orb[1]) - ov(z1, &orb[1]) * ov(z2, &orb[0]);
    let m2 = husimi2_value(&state, &frame, z1, z2).unwrap();
    assert!(
        (m2 - det.norm_sqr()).abs() < 1e-12,
        "{m2} vs {}",
        det.norm_sqr()
    );
}

fn bridge_defect(m: usize) -> f64 {
    let g = grid(m, 12.0, 0.5, 1);
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let gamma = coherent(&frame, 0.3, 0.8);
    let w = wigner1(&gamma, &g, 1, Refinement::Cubic).unwrap();
    let lat = PhaseLattice::strided(&g, m / 64, m / 64).unwrap();
    convolution_bridge_check(&w, &gamma, &frame, &lat, 1)
        .unwrap()
        .max_defect
}

#[test]
fn convolution_bridge_holds_and_converges() {
    let coarse = bridge_defect(128);
    let fine = bridge_defect(256);
    println!(
        "bridge defect M=128 {coarse:.3e}, M=256 {fine:.3e}, ratio {:.2}",
        coarse / fine
    );
    assert!(coarse < 1e-4);
    assert!(coarse / fine >= 3.0);
}

#[test]
fn bridge_refuses_non_gaussian_window() {
    let g = grid(64, 12.0, 0.5, 1);
    let frame = CoherentFrame::bump(&g).unwrap();
    let gamma = coherent(&frame, 0.0, 0.0);
    let w = wigner1(&gamma, &g, 1, Refinement::Cubic).unwrap();
    let lat = PhaseLattice::default_for(&g);
    let e = convolution_bridge_check(&w, &gamma, &frame, &lat, 1).unwrap_err();
    assert!(matches!(e, PhaseSpaceError::NotGaussian(_)));
}

#[test]
fn wigner_momentum_marginal_is_position_density() {
    let g = grid(64, 12.0, 0.5, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let orb = random_orbitals(&g, 2, &mut rng);
    let kernel = husimi_manybody::OneBodyKernel::from_orbitals(&g, &orb);
    let gamma = Factorized::from_kernel(&kernel);
    for scheme in [Refinement::Cubic, Refinement::Spectral] {
        let w = wigner1(&gamma, &g, 2, scheme).unwrap();
        // Direct quadrature oracle for gamma(x;x)/N.
        for (i, marg) in w.position_marginal().iter().enumerate() {
            let direct: f64 = orb.iter().map(|e| e[i].norm_sqr()).sum::<f64>() / 2.0;
            assert!(
                (marg - direct).abs() < 1e-6,
                "{scheme:?} x{i}: {marg} vs {direct}"
            );
        }
        assert!((w.mass() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn gaussian_wigner_matches_closed_form_and_is_nonnegative() {
    // Wide box: the |y| < L/2 cut then costs below 1e-13.
    let g = grid(128, 16.0, 0.5, 1);
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let (q0, p0) = (-0.4, 0.6);
    let gamma = coherent(&frame, q0, p0);
    for (scheme, tol) in [(Refinement::Cubic, 1e-3), (Refinement::Spectral, 1e-9)] {
        let w = wigner1(&gamma, &g, 1, scheme).unwrap();
        if scheme == Refinement::Spectral {
            assert!(w.min() >= -1e-10, "{scheme:?} min {}", w.min());
        } else {
            // Midpoint interpolation leaves O(dx^4) ripples in the tails.
            assert!(w.min() >= -1e-3, "{scheme:?} min {}", w.min());
        }
        let mut gap = 0.0f64;
        for (i, &x) in w.xs.iter().enumerate() {
            for (j, &p) in w.ps.iter().enumerate() {
                let d2 = g.wrap(x - q0).powi(2) + (p - p0).powi(2);
                let exact = 2.0 / g.hbar * (-d2 / g.hbar).exp();
                gap = gap.max((w.get(i, j) - exact).abs());
            }
        }
        assert!(gap < tol, "{scheme:?} gap {gap}");
    }
}

#[test]
fn coherent_state_moments_match_gaussian_integrals() {
    let g = grid(128, 12.0, 0.5, 1);
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let p0 = 0.8;
    let h = husimi1(&coherent(&frame, 0.0, p0), &frame, &PhaseLattice::full(&g)).unwrap();
    let mo = moments(&h);
    assert!((mo.mass - 1.0).abs() < 1e-4);
    assert!(
        (mo.p2_moment - (p0 * p0 + g.hbar)).abs() < 1e-4,
        "{}",
        mo.p2_moment
    );
    assert!(
        (mo.q_moment - (2.0 * g.hbar / PI).sqrt()).abs() < 1e-4,
        "{}",
        mo.q_moment
    );
}

#[test]
fn free_dynamics_keeps_momentum_moment() {
    let g = grid(64, 12.0, 0.5, 2);
    let state = build_slater(&g, &shifted_gaussians(&g, 2, 1.0)).unwrap();
    let v = Potential::zero(&g).unwrap();
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let lat = PhaseLattice::full(&g);
    let p2 = |s: &husimi_manybody::ManyBodyState| {
        moments(&husimi1(&Factorized::from_kernel(&gamma1(s)), &frame, &lat).unwrap()).p2_moment
    };
    let before = p2(&state);
    let after = p2(&propagate(&state, &v, 1e-2, 50).unwrap());
    assert!((before - after).abs() < 1e-6, "{before} vs {after}");
}

#[test]
fn interacting_moment_growth_is_bounded() {
    let g = grid(64, 12.0, 0.5, 2);
    let v = Potential::new(
        &g,
        PotentialKind::Gaussian {
            amplitude: 1.0,
            width: 0.7,
        },
    )
    .unwrap();
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let lat = PhaseLattice::default_for(&g);
    let mut state = build_slater(&g, &shifted_gaussians(&g, 2, 1.0)).unwrap();
    let mut fields = Vec::new();
    for step in 0..=4 {
        if step > 0 {
            state = propagate(&state, &v, 1e-2, 25).unwrap();
        }
        let gamma = Factorized::from_kernel(&gamma1(&state));
        fields.push((state.time, husimi1(&gamma, &frame, &lat).unwrap()));
    }
    let traj: Vec<_> = fields.iter().map(|(t, h)| (*t, h)).collect();
    let rep = moment_growth_check(&traj);
    assert!(rep.finite);
    assert!(rep.c_fit > 0.0);
    assert!((rep.times[4] - 1.0).abs() < 1e-12);
}

fn hbar_ladder() -> Vec<f64> {
    (3..=10).map(|k| 2f64.powi(-k)).collect()
}

#[test]
fn oscillation_slopes_follow_the_shell_rate() {
    for s in [1u32, 2, 3] {
        let phi = KinkProfile::new(s);
        for alpha in [0.6, 0.75, 0.9] {
            let rep = oscillation_decay(&phi, alpha, s as f64, &hbar_ladder(), 0.0).unwrap();
            // Closed-form oracle for each sample.
            for (&h, &v) in rep.hbars.iter().zip(&rep.values) {
                let exact = phi.closed_form_abs(h.powf(alpha) / h);
                assert!(
                    (v - exact).abs() < 1e-6 * exact,
                    "s={s} a={alpha} h={h}: {v} vs {exact}"
                );
            }
            assert!(
                rep.relative_error() < 0.1,
                "s={s} a={alpha}: slope {}",
                rep.slope
            );
        }
    }
}

#[test]
fn oscillation_at_fixed_distance_decays_like_hbar_to_the_s() {
    for s in [1u32, 2, 3] {
        let rep =
            oscillation_decay(&KinkProfile::new(s), 0.0, s as f64, &hbar_ladder(), 0.5).unwrap();
        assert!(rep.relative_error() < 0.1, "s={s}: slope {}", rep.slope);
    }
}

#[test]
fn oscillation_without_phase_is_the_plain_integral() {
    let phi = KinkProfile::new(2);
    let a = oscillatory_integral(&phi, 0.0, 0.1);
    let b = oscillatory_integral(&phi, 0.0, 0.001);
    assert_eq!(a, b);
    assert!((a.re - phi.closed_form_abs(0.0)).abs() < 1e-8);
    assert_eq!(a.im, 0.0);
}

#[test]
fn oscillation_refuses_short_ladders() {
    let e =
        oscillation_decay(&KinkProfile::new(1), 0.75, 1.0, &[0.1, 0.05, 0.02], 0.0).unwrap_err();
    assert!(matches!(e, PhaseSpaceError::TooFewSamples(3)));
}

#[test]
fn smooth_bump_decays_faster_than_any_kink() {
    let bump = BumpProfile {
        center: 0.0,
        radius: 2.0,
    };
    let rep = oscillation_decay(&bump, 0.0, 1.0, &hbar_ladder()[..5], 1.0).unwrap();
    println!("bump slope {:.2} r2 {:.3}", rep.slope, rep.r2);
    assert!(rep.slope > 3.0);
}

#[test]
fn localized_number_single_particle_is_ball_length() {
    let g = grid(64, 12.0, 0.5, 1);
    let state = build_slater(&g, &hermite(&g, 1, 1.0)).unwrap();
    let r = localized_number_check(&state, 1.5);
    assert!((r.value - 2.0 * g.hbar.sqrt() * 1.5).abs() < 1e-10);
    // Doubling R at most doubles the value.
    let r2 = localized_number_check(&state, 3.0);
    assert!(r2.value <= 2.0 * r.value + 1e-12);
}

#[test]
fn localized_number_matches_double_quadrature_and_scales_across_hbar() {
    let mut ratios = Vec::new();
    for n in [2usize, 4, 8] {
        let hbar = 1.0 / n as f64;
        // Only the one-body density enters, so build it from orbitals.
        let g = grid(128, 12.0, hbar, 1);
        let orb = hermite(&g, n, 1.0);
        let kernel = husimi_manybody::OneBodyKernel::from_orbitals(&g, &orb);
        let r = localized_number(&g, &kernel, 1.0);
        // Direct double quadrature on a fine q lattice.
        let rho = kernel.density();
        let radius = hbar.sqrt();
        let nq = 24000;
        let dq = g.l / nq as f64;
        let mut direct = 0.0;
        for a in 0..nq {
            let q = -0.5 * g.l + (a as f64 + 0.5) * dq;
            for (j, &x) in g.positions().iter().enumerate() {
                if g.wrap(x - q).abs() <= radius {
                    direct += rho[j] * g.dx * dq;
                }
            }
        }
        assert!(
            (direct - r.value).abs() < 1e-3 * r.value,
            "{direct} vs {}",
            r.value
        );
        ratios.push(r.ratio);
    }
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 2.0, "{ratios:?}");
}

#[test]
fn fields_export_csv_and_snapshot() {
    let g = grid(32, 12.0, 0.5, 1);
    let frame = CoherentFrame::gaussian(&g).unwrap();
    let gamma = coherent(&frame, 0.0, 0.0);
    let lat = PhaseLattice::default_for(&g);
    let h = husimi1(&gamma, &frame, &lat).unwrap();
    let dir = tempfile::tempdir().unwrap();
    h.write_csv(&dir.path().join("m.csv")).unwrap();
    let text = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert!(text.starts_with("q,p,value\n"));
    assert_eq!(text.lines().count(), 1 + lat.len());
    h.write_snapshot(&dir.path().join("m.bin"), 0.5).unwrap();
    let mut f = std::fs::File::open(dir.path().join("m.bin")).unwrap();
    let (head, data) = husimi_manybody::snapshot::read(&mut f).unwrap();
    assert_eq!(head.version, 0x0101);
    assert_eq!(data.len(), lat.len());
    assert_eq!(data[7].re, h.values[7]);
    let w = wigner1(&gamma, &g, 1, Refinement::Cubic).unwrap();
    w.write_csv(&dir.path().join("w.csv")).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn coherent_husimi_stays_in_unit_interval(q0 in -3.0f64..3.0, p0 in -2.0f64..2.0) {
        let g = grid(64, 12.0, 0.5, 1);
        let frame = CoherentFrame::gaussian(&g).unwrap();
        let lat = PhaseLattice::default_for(&g);
        let h = husimi1(&coherent(&frame, q0, p0), &frame, &lat).unwrap();
        prop_assert!(h.min() >= -1e-12);
        prop_assert!(h.max() <= 1.0 + 1e-8);
    }

    #[test]
    fn husimi_is_phase_invariant(theta in 0.0f64..6.28) {
        let g = grid(32, 12.0, 0.5, 1);
        let frame = CoherentFrame::bump(&g).unwrap();
        let v = frame.vector(0.5, 0.3);
        let rotated: Vec<Complex64> = v.iter().map(|z| z * Complex64::from_polar(1.0, theta)).collect();
        let lat = PhaseLattice::strided(&g, 4, 4).unwrap();
        let a = husimi1(&Factorized::from_orbitals(&g, &[v]), &frame, &lat).unwrap();
        let b = husimi1(&Factorized::from_orbitals(&g, &[rotated]), &frame, &lat).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }
}
