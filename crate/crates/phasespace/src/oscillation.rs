use husimi_grid::{bump_derivative, gauss_legendre8, loglog_fit};
use num_complex::Complex64;

use crate::PhaseSpaceError;

/// A one-dimensional momentum profile with compact support.
pub trait Profile1D {
    fn eval(&self, p: f64) -> f64;
    /// Support interval `[lo, hi]`.
    fn support(&self) -> (f64, f64);
    /// Points where the profile is not smooth; quadrature panels break there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    fn label(&self) -> String;
}

fn smooth_step(t: f64) -> f64 {
    let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let a = f(t);
    let b = f(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// `p_+^(s-1) e^{-p/R} chi(p)`: exactly `s - 1` continuous derivatives at the
/// origin, so its oscillatory integral decays like `(hbar/|x|)^s`. The
/// cutoff `chi` falls smoothly from 1 to 0 on `[cut, cut + width]`.
#[derive(Clone, Copy, Debug)]
pub struct KinkProfile {
    pub s: u32,
    pub scale: f64,
    pub cut: f64,
    pub width: f64,
}

impl KinkProfile {
    pub fn new(s: u32) -> Self {
        Self {
            s,
            scale: 8.0,
            cut: 300.0,
            width: 100.0,
        }
    }

    /// `|int e^{i p k} p^(s-1) e^{-p/R} dp| = Gamma(s) R^s (1 + k^2 R^2)^(-s/2)`,
    /// the closed form without the far cutoff.
    pub fn closed_form_abs(&self, k: f64) -> f64 {
        let r = self.scale;
        let gamma: f64 = (1..self.s).map(|j| j as f64).product();
        gamma * r.powi(self.s as i32) * (1.0 + k * k * r * r).powf(-0.5 * self.s as f64)
    }
}

impl Profile1D for KinkProfile {
    fn eval(&self, p: f64) -> f64 {
        if p < 0.0 || p > self.cut + self.width {
            return 0.0;
        }
        let chi = 1.0 - smooth_step((p - self.cut) / self.width);
        p.powi(self.s as i32 - 1) * (-p / self.scale).exp() * chi
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.cut + self.width)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.cut]
    }

    fn label(&self) -> String {
        format!("kink(s={})", self.s)
    }
}

/// A smooth bump on `[center - radius, center + radius]`; its integrals decay
/// faster than any power.
#[derive(Clone, Copy, Debug)]
pub struct BumpProfile {
    pub center: f64,
    pub radius: f64,
}

impl Profile1D for BumpProfile {
    fn eval(&self, p: f64) -> f64 {
        bump_derivative(self.center, self.radius, p, 0)
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    fn label(&self) -> String {
        "bump".into()
    }
}

/// `int e^{i p x / hbar} phi(p) dp` by composite 8-point Gauss-Legendre with
/// panels no wider than a fraction of the oscillation period.
pub fn oscillatory_integral(phi: &dyn Profile1D, x: f64, hbar: f64) -> Complex64 {
    let k = x / hbar;
    let width = if k.abs() > 0.0 {
        0.25f64.min(2.0 / k.abs())
    } else {
        0.25
    };
    let (lo, hi) = phi.support();
    let mut cuts = vec![lo];
    cuts.extend(phi.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    let nodes = gauss_legendre8();
    let mut total = Complex64::default();
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let panels = ((b - a) / width).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        let mut acc = Complex64::default();
        for j in 0..panels {
            let p0 = a + j as f64 * h;
            for &(t, w) in &nodes {
                let p = p0 + t * h;
                acc += Complex64::from_polar(w * phi.eval(p), k * p);
            }
        }
        total += acc * h;
    }
    total
}

/// Measured decay of the oscillatory integral on the shell `|x| = hbar^alpha`
/// (or `|x| = delta` when `alpha = 0`).
#[derive(Clone, Debug)]
pub struct OscillationReport {
    pub alpha: f64,
    pub s: f64,
    pub hbars: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
    /// `(1 - alpha) s`.
    pub expected: f64,
}

impl OscillationReport {
    pub fn relative_error(&self) -> f64 {
        (self.slope - self.expected).abs() / self.expected
    }
}

pub fn oscillation_decay(
    phi: &dyn Profile1D,
    alpha: f64,
    s: f64,
    hbars: &[f64],
    delta: f64,
) -> Result<OscillationReport, PhaseSpaceError> {
    if hbars.len() < 4 {
        return Err(PhaseSpaceError::TooFewSamples(hbars.len()));
    }
    let values: Vec<f64> = hbars
        .iter()
        .map(|&h| {
            let r = if alpha == 0.0 { delta } else { h.powf(alpha) };
            oscillatory_integral(phi, r, h)
                .norm()
                .max(oscillatory_integral(phi, -r, h).norm())
        })
        .collect();
    let (slope, r2) = loglog_fit(hbars, &values)?;
    Ok(OscillationReport {
        alpha,
        s,
        hbars: hbars.to_vec(),
        values,
        slope,
        r2,
        expected: (1.0 - alpha) * s,
    })
}
