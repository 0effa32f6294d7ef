use crate::GridError;

/// Least-squares slope of `log y` against `log x`, with the coefficient of determination.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64), GridError> {
    if x.len() != y.len() {
        return Err(GridError::Fit(format!(
            "length mismatch: {} x values, {} y values",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(GridError::Fit(format!(
            "need at least 3 points, got {}",
            x.len()
        )));
    }
    let bad: Vec<String> = x
        .iter()
        .zip(y)
        .enumerate()
        .filter(|(_, (a, b))| !(**a > 0.0 && **b > 0.0))
        .map(|(i, (a, b))| format!("#{i} (x={a}, y={b})"))
        .collect();
    if !bad.is_empty() {
        return Err(GridError::Fit(format!(
            "non-positive values: {}",
            bad.join(", ")
        )));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(GridError::Fit("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    // A perfect constant has no variance to explain.
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok((slope, r2))
}
