use crate::HusimiField;

/// Phase-space moments of a Husimi field, each with the `1/(2 pi hbar)` measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mass: f64,
    pub q_moment: f64,
    pub p2_moment: f64,
}

impl Moments {
    /// `|q| + |p|^2` moment.
    pub fn combined(&self) -> f64 {
        self.q_moment + self.p2_moment
    }
}

/// Lattice sums with the `1/(2 pi hbar)` measure.
///
/// The kink of `|q|` at the origin costs the plain sum `dq^2 F(0) / 6`, where
/// `F(0)` is the position marginal at `q = 0`; when the origin is a lattice
/// row that term is added back, leaving a fourth-order error.
pub fn moments(h: &HusimiField) -> Moments {
    let mut q_moment = h.integrate(|q, _| q.abs());
    if let Some(i0) = h.qs.iter().position(|q| q.abs() < 1e-9 * h.dq) {
        let row: f64 = (0..h.ps.len()).map(|j| h.get(i0, j)).sum();
        let marginal = row * h.dp / (2.0 * std::f64::consts::PI * h.hbar);
        q_moment += h.dq * h.dq * marginal / 6.0;
    }
    Moments {
        mass: h.mass(),
        q_moment,
        p2_moment: h.integrate(|_, p| p * p),
    }
}

/// Smallest `C` with `moment(t) <= C (1 + t^3)` along a trajectory.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub times: Vec<f64>,
    pub moments: Vec<f64>,
    pub c_fit: f64,
    pub finite: bool,
}

pub fn moment_growth_check(trajectory: &[(f64, &HusimiField)]) -> GrowthReport {
    let times: Vec<f64> = trajectory.iter().map(|(t, _)| *t).collect();
    let moments: Vec<f64> = trajectory
        .iter()
        .map(|(_, h)| moments(h).combined())
        .collect();
    let c_fit = times
        .iter()
        .zip(&moments)
        .map(|(t, m)| m / (1.0 + t.powi(3)))
        .fold(0.0, f64::max);
    let finite = moments.iter().all(|m| m.is_finite()) && c_fit.is_finite();
    GrowthReport {
        times,
        moments,
        c_fit,
        finite,
    }
}
