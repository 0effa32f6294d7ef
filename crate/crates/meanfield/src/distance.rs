use husimi_phasespace::HusimiField;

use crate::{MeanFieldError, VlasovState};

/// Lattice distances between a Husimi field and a Vlasov density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceReport {
    /// `kappa sum |m_1 - m_2| dq dp`.
    pub l1: f64,
    /// Sum of the one-dimensional transport distances of the `q` and `p`
    /// marginals, each from cumulative distributions.
    pub w1_proxy: f64,
    /// Masses differed by more than 1% and both were normalized first.
    pub renormalized: bool,
}

fn cdf_distance(a: &[f64], b: &[f64], cell: f64) -> f64 {
    let mut ca = 0.0;
    let mut cb = 0.0;
    let mut total = 0.0;
    for (x, y) in a.iter().zip(b) {
        ca += x;
        cb += y;
        total += (ca - cb).abs();
    }
    total * cell
}

/// Both arguments must share the lattice; values are scaled by `kappa` into
/// probability densities.
pub fn husimi_vlasov_distance(
    husimi: &HusimiField,
    vlasov: &VlasovState,
) -> Result<DistanceReport, MeanFieldError> {
    let same = husimi.qs.len() == vlasov.qs.len()
        && husimi.ps.len() == vlasov.ps.len()
        && husimi
            .qs
            .iter()
            .zip(&vlasov.qs)
            .all(|(a, b)| (a - b).abs() < 1e-9)
        && husimi
            .ps
            .iter()
            .zip(&vlasov.ps)
            .all(|(a, b)| (a - b).abs() < 1e-9);
    if !same {
        return Err(MeanFieldError::Mismatch(format!(
            "{}x{} vs {}x{}",
            husimi.qs.len(),
            husimi.ps.len(),
            vlasov.qs.len(),
            vlasov.ps.len()
        )));
    }
    let cell = vlasov.dq * vlasov.dp;
    let k = vlasov.kappa();
    let a: Vec<f64> = husimi.values.iter().map(|v| v * k * cell).collect();
    let b: Vec<f64> = vlasov.values.iter().map(|v| v * k * cell).collect();
    distance_of_masses(
        &a,
        &b,
        vlasov.qs.len(),
        vlasov.ps.len(),
        vlasov.dq,
        vlasov.dp,
    )
}

/// Distances between two cell-mass arrays laid out row-major in `(q, p)`.
pub fn distance_of_masses(
    a: &[f64],
    b: &[f64],
    nq: usize,
    np: usize,
    dq: f64,
    dp: f64,
) -> Result<DistanceReport, MeanFieldError> {
    if a.len() != nq * np || b.len() != nq * np {
        return Err(MeanFieldError::Mismatch("array length".into()));
    }
    let ma: f64 = a.iter().sum();
    let mb: f64 = b.iter().sum();
    let renormalized = (ma - mb).abs() > 0.01 * ma.abs().max(mb.abs());
    let (sa, sb) = if renormalized {
        (1.0 / ma, 1.0 / mb)
    } else {
        (1.0, 1.0)
    };
    let l1 = a.iter().zip(b).map(|(x, y)| (x * sa - y * sb).abs()).sum();
    let qa: Vec<f64> = a
        .chunks_exact(np)
        .map(|r| r.iter().sum::<f64>() * sa)
        .collect();
    let qb: Vec<f64> = b
        .chunks_exact(np)
        .map(|r| r.iter().sum::<f64>() * sb)
        .collect();
    let pa: Vec<f64> = (0..np)
        .map(|j| (0..nq).map(|i| a[i * np + j]).sum::<f64>() * sa)
        .collect();
    let pb: Vec<f64> = (0..np)
        .map(|j| (0..nq).map(|i| b[i * np + j]).sum::<f64>() * sb)
        .collect();
    Ok(DistanceReport {
        l1,
        w1_proxy: cdf_distance(&qa, &qb, dq) + cdf_distance(&pa, &pb, dp),
        renormalized,
    })
}
