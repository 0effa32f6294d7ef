use serde::{Deserialize, Serialize};

use crate::{
    d_gamma, pair_annihilate, pair_create, BogoliubovMap, FockError, FockState, OneBodyOperator,
};

/// One sampled instance of a norm inequality `lhs <= rhs`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl InequalityCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }

    pub fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else if self.lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// The seven second-quantization bounds for one operator and one state.
///
/// The trace-class bounds are stated for normalized states, so `psi` is
/// normalized before those are evaluated.
pub fn one_body_inequalities(
    o: &OneBodyOperator,
    psi: &FockState,
) -> Result<[InequalityCheck; 7], FockError> {
    let n_psi = psi.number_function(|n| n).norm();
    let sqrt_n = psi.number_function(|n| n.sqrt()).norm();
    let sqrt_n1 = psi.number_function(|n| (n + 1.0).sqrt()).norm();
    let dg = d_gamma(&o.matrix, psi)?.norm();
    let aa = pair_annihilate(&o.matrix, psi)?.norm();
    let cc = pair_create(&o.matrix, psi)?.norm();
    let unit = psi.clone().normalized();
    let dg1 = d_gamma(&o.matrix, &unit)?.norm();
    let aa1 = pair_annihilate(&o.matrix, &unit)?.norm();
    let cc1 = pair_create(&o.matrix, &unit)?.norm();
    Ok([
        InequalityCheck {
            name: "dgamma_op_number",
            lhs: dg,
            rhs: o.op_norm * n_psi,
        },
        InequalityCheck {
            name: "dgamma_hs_sqrt_number",
            lhs: dg,
            rhs: o.hs_norm * sqrt_n,
        },
        InequalityCheck {
            name: "pair_annihilate_hs",
            lhs: aa,
            rhs: o.hs_norm * sqrt_n,
        },
        InequalityCheck {
            name: "pair_create_hs",
            lhs: cc,
            rhs: 2.0 * o.hs_norm * sqrt_n1,
        },
        InequalityCheck {
            name: "dgamma_trace",
            lhs: dg1,
            rhs: 2.0 * o.tr_norm,
        },
        InequalityCheck {
            name: "pair_annihilate_trace",
            lhs: aa1,
            rhs: 2.0 * o.tr_norm,
        },
        InequalityCheck {
            name: "pair_create_trace",
            lhs: cc1,
            rhs: 2.0 * o.tr_norm,
        },
    ])
}

/// Both sides of the two-body factorization bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WickGap {
    pub lhs: f64,
    pub rhs: f64,
}

/// `lhs = |Tr (O1 x O2)(gamma2_Psi - omega x omega)|` with `Psi = R xi`,
/// `rhs = N |O1|_HS |O2| |(N+1) xi|`.
pub fn wick_gap_bound_check(
    o1: &OneBodyOperator,
    o2: &OneBodyOperator,
    xi: &FockState,
    map: &BogoliubovMap,
) -> Result<WickGap, FockError> {
    let r = map.unitary()?;
    let psi = r.apply(xi);
    // dGamma(O1) dGamma(O2) - dGamma(O1 O2) = sum O1(x1,y1) O2(x2,y2) a*_x1 a*_x2 a_y2 a_y1
    let b = d_gamma(&o1.matrix, &d_gamma(&o2.matrix, &psi)?)?
        .sub(&d_gamma(&(&o1.matrix * &o2.matrix), &psi)?);
    let two = psi.inner(&b);
    let omega = map.omega();
    let factored = o1.trace_against(&omega) * o2.trace_against(&omega);
    let lhs = (two - factored).norm();
    let n = map.particles() as f64;
    let rhs = n * o1.hs_norm * o2.op_norm * xi.number_function(|k| k + 1.0).norm();
    Ok(WickGap { lhs, rhs })
}

/// Summary of a batch of sampled inequalities.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BatchReport {
    pub name: String,
    pub instances: usize,
    pub max_lhs_over_rhs: f64,
    pub min_slack: f64,
    pub violations: usize,
}

impl BatchReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            instances: 0,
            max_lhs_over_rhs: 0.0,
            min_slack: f64::INFINITY,
            violations: 0,
        }
    }

    pub fn record(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.instances += 1;
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > tol {
            f64::INFINITY
        } else {
            0.0
        };
        self.max_lhs_over_rhs = self.max_lhs_over_rhs.max(ratio);
        self.min_slack = self.min_slack.min(rhs - lhs);
        if lhs > rhs + tol {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.instances > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}
