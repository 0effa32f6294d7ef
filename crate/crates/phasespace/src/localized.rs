use husimi_grid::GridSpec;
use husimi_manybody::{gamma1, ManyBodyState, OneBodyKernel};

/// `int dq int dx rho(x) chi(|x - q| <= sqrt(hbar) R)` and its ratio to `hbar^(-1/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalizedNumber {
    pub value: f64,
    pub ratio: f64,
}

/// The `q` integral of the indicator is the periodic ball length
/// `min(2 sqrt(hbar) R, L)` for every `x`.
pub fn localized_number(grid: &GridSpec, gamma: &OneBodyKernel, radius: f64) -> LocalizedNumber {
    let mass: f64 = gamma.density().iter().sum::<f64>() * grid.dx;
    let ball = (2.0 * grid.hbar.sqrt() * radius).min(grid.l);
    let value = mass * ball;
    LocalizedNumber {
        value,
        ratio: value * grid.hbar.sqrt(),
    }
}

pub fn localized_number_check(state: &ManyBodyState, radius: f64) -> LocalizedNumber {
    localized_number(&state.grid, &gamma1(state), radius)
}
