use crate::{GridError, GridSpec, Jet};

/// Derivative of order `k` of the bump `exp(-1/(1 - r^2))`, `r = (x - center)/radius`.
///
/// The peak value is `exp(-1)`; no further normalization is applied.
pub fn bump_derivative(center: f64, radius: f64, x: f64, k: usize) -> f64 {
    let t = (x - center) / radius;
    let gap = 1.0 - t * t;
    // exp(-700) underflows anyway; avoid inf * 0 in the series.
    if gap <= 1.0 / 700.0 {
        return 0.0;
    }
    let tj = Jet::variable(t, k);
    let u = Jet::constant(1.0, k).add(&tj.mul(&tj).scale(-1.0));
    let g = u.recip().scale(-1.0).exp();
    g.derivative(k) / radius.powi(k as i32)
}

/// Smooth compactly supported bump tabulated with its derivatives.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub center: f64,
    pub radius: f64,
    pub s: usize,
    pub points: Vec<f64>,
    /// `table[k][j]` is the `k`-th derivative at `points[j]`, `k = 0..=s+1`.
    pub table: Vec<Vec<f64>>,
}

/// Bump on the periodic grid; the support must stay inside the box.
pub fn bump_test_function(
    grid: &GridSpec,
    center: f64,
    radius: f64,
    s: usize,
) -> Result<TestFunction, GridError> {
    let half = 0.5 * grid.l;
    if !(radius > 0.0) {
        return Err(GridError::BadTestFunction(format!("radius {radius}")));
    }
    let (lo, hi) = (center - radius, center + radius);
    if lo < -half || hi >= half {
        return Err(GridError::SupportCrossesBoundary { lo, hi, half });
    }
    Ok(TestFunction::on_points(grid.positions(), center, radius, s))
}

impl TestFunction {
    /// Bump tabulated on arbitrary points (e.g. a momentum axis).
    pub fn on_points(points: Vec<f64>, center: f64, radius: f64, s: usize) -> Self {
        let table = (0..=s + 1)
            .map(|k| {
                points
                    .iter()
                    .map(|&x| bump_derivative(center, radius, x, k))
                    .collect()
            })
            .collect();
        Self {
            center,
            radius,
            s,
            points,
            table,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.table[0]
    }

    pub fn derivative(&self, k: usize) -> &[f64] {
        &self.table[k]
    }

    pub fn eval(&self, x: f64, k: usize) -> f64 {
        bump_derivative(self.center, self.radius, x, k)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    pub fn label(&self) -> String {
        format!("bump(c={},r={},s={})", self.center, self.radius, self.s)
    }
}
