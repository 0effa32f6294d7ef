use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::{jw_sign, FockError, MAX_MODES};

/// Vector in the fermionic Fock space over `modes` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    modes: usize,
    amps: Vec<Complex64>,
}

impl FockState {
    pub fn zero(modes: usize) -> Result<Self, FockError> {
        if modes == 0 || modes > MAX_MODES {
            return Err(FockError::TooManyModes(modes));
        }
        Ok(Self {
            modes,
            amps: vec![Complex64::new(0.0, 0.0); 1 << modes],
        })
    }

    pub fn vacuum(modes: usize) -> Result<Self, FockError> {
        Self::basis(modes, 0)
    }

    pub fn basis(modes: usize, mask: usize) -> Result<Self, FockError> {
        let mut s = Self::zero(modes)?;
        if mask >= s.amps.len() {
            return Err(FockError::Dimension {
                expected: s.amps.len(),
                got: mask,
            });
        }
        s.amps[mask] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(modes: usize, amps: Vec<Complex64>) -> Result<Self, FockError> {
        if modes == 0 || modes > MAX_MODES {
            return Err(FockError::TooManyModes(modes));
        }
        if amps.len() != 1 << modes {
            return Err(FockError::Dimension {
                expected: 1 << modes,
                got: amps.len(),
            });
        }
        Ok(Self { modes, amps })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub(crate) fn blank(&self) -> Self {
        Self {
            modes: self.modes,
            amps: vec![Complex64::new(0.0, 0.0); self.amps.len()],
        }
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
        self
    }

    pub fn scale(mut self, c: Complex64) -> Self {
        for a in &mut self.amps {
            *a *= c;
        }
        self
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// Squared norms of each particle-number sector.
    pub fn sector_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.modes + 1];
        for (mask, a) in self.amps.iter().enumerate() {
            w[mask.count_ones() as usize] += a.norm_sqr();
        }
        w
    }

    pub fn project_sector(&self, n: usize) -> Self {
        let mut out = self.clone();
        for (mask, a) in out.amps.iter_mut().enumerate() {
            if mask.count_ones() as usize != n {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Applies a real diagonal function of the particle number.
    pub fn number_function(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for (mask, a) in out.amps.iter_mut().enumerate() {
            *a *= f(mask.count_ones() as f64);
        }
        out
    }

    /// Writes `bitmask,re,im` rows.
    pub fn write_csv(&self, path: &Path) -> Result<(), FockError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "bitmask,re,im")?;
        for (mask, a) in self.amps.iter().enumerate() {
            writeln!(f, "{mask},{:.17e},{:.17e}", a.re, a.im)?;
        }
        f.flush()?;
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<(), FockError> {
        if mode >= self.modes {
            Err(FockError::BadMode {
                mode,
                modes: self.modes,
            })
        } else {
            Ok(())
        }
    }
}

/// `a*_mode state`.
pub fn create(state: &FockState, mode: usize) -> Result<FockState, FockError> {
    state.check_mode(mode)?;
    let bit = 1usize << mode;
    let mut out = state.blank();
    for (mask, a) in state.amps.iter().enumerate() {
        if mask & bit == 0 && *a != Complex64::new(0.0, 0.0) {
            out.amps[mask | bit] = a * jw_sign(mask, mode);
        }
    }
    Ok(out)
}

/// `a_mode state`.
pub fn annihilate(state: &FockState, mode: usize) -> Result<FockState, FockError> {
    state.check_mode(mode)?;
    let bit = 1usize << mode;
    let mut out = state.blank();
    for (mask, a) in state.amps.iter().enumerate() {
        if mask & bit != 0 {
            out.amps[mask ^ bit] = a * jw_sign(mask, mode);
        }
    }
    Ok(out)
}

pub fn number_operator(state: &FockState) -> FockState {
    state.number_function(|n| n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn create_on_vacuum() {
        let omega = FockState::vacuum(4).unwrap();
        let s = create(&omega, 0).unwrap();
        assert_eq!(s, FockState::basis(4, 1).unwrap());
        assert_eq!(annihilate(&omega, 0).unwrap().norm(), 0.0);
    }

    #[test]
    fn ordered_product_has_positive_sign() {
        let omega = FockState::vacuum(5).unwrap();
        let s = create(&create(&create(&omega, 4).unwrap(), 2).unwrap(), 1).unwrap();
        assert_eq!(s.amplitudes()[0b10110], Complex64::new(1.0, 0.0));
        // Reversed order is an odd permutation of three factors.
        let t = create(&create(&create(&omega, 1).unwrap(), 2).unwrap(), 4).unwrap();
        assert_eq!(t.amplitudes()[0b10110].re, -1.0);
        let u = create(&create(&omega, 1).unwrap(), 2).unwrap();
        assert_eq!(u.amplitudes()[0b110], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn mode_cap() {
        assert!(FockState::zero(15).is_err());
        assert!(FockState::zero(14).is_ok());
        let s = FockState::vacuum(3).unwrap();
        assert!(create(&s, 3).is_err());
    }

    #[test]
    fn sectors_sum_to_norm() {
        let amps = (0..16).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let s = FockState::from_amplitudes(4, amps).unwrap();
        let total: f64 = s.sector_weights().iter().sum();
        assert!((total - s.norm().powi(2)).abs() < 1e-9);
    }
}
