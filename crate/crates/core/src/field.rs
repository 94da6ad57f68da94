//! Discrete-mode zero-point field and coherent-state amplitudes.
//!
//! A `d`-mode state is a coherent amplitude `alpha` along a unit direction
//! `psi`. One realization of the field adds independent vacuum noise to every
//! mode: `a = alpha * psi + z / sqrt(2)` with `z` iid standard complex
//! Gaussian.
//!
//! Thermal light only rescales the noise (`z / sqrt(2)` becomes `sigma * z`),
//! which is equivalent to rescaling the detection threshold, so only the zero
//! temperature field is modelled.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BornError, Result};
use crate::rng::RngStream;

pub type ComplexNum = Complex64;

/// Tolerance on `||psi|| = 1` accepted by [`CoherentVector::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentVector {
    alpha: Complex64,
    psi: Vec<Complex64>,
}

impl CoherentVector {
    /// Fails unless `psi` is non-empty, finite and of unit norm.
    pub fn new(alpha: Complex64, psi: Vec<Complex64>) -> Result<Self> {
        check_components(alpha, &psi)?;
        let norm = l2_norm(&psi);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(BornError::InvalidState(format!(
                "direction vector has norm {norm}, expected 1"
            )));
        }
        Ok(Self { alpha, psi })
    }

    /// Like [`CoherentVector::new`] but rescales `psi` to unit norm.
    pub fn normalized(alpha: Complex64, psi: Vec<Complex64>) -> Result<Self> {
        check_components(alpha, &psi)?;
        let norm = l2_norm(&psi);
        if norm == 0.0 {
            return Err(BornError::InvalidState("zero direction vector".into()));
        }
        let psi = psi.into_iter().map(|c| c / norm).collect();
        Ok(Self { alpha, psi })
    }

    /// `alpha` on mode `mode` of a `d`-mode field, vacuum elsewhere.
    pub fn basis(alpha: Complex64, d: usize, mode: usize) -> Result<Self> {
        if d == 0 {
            return Err(BornError::InvalidDimension("d must be at least 1".into()));
        }
        if mode >= d {
            return Err(BornError::InvalidDimension(format!(
                "mode {mode} out of range for d = {d}"
            )));
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); d];
        psi[mode] = Complex64::new(1.0, 0.0);
        Self::new(alpha, psi)
    }

    pub fn single_mode(alpha: Complex64) -> Result<Self> {
        Self::basis(alpha, 1, 0)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    /// Mean field amplitude `alpha * psi_i` on every mode.
    pub fn mean_amplitudes(&self) -> Vec<Complex64> {
        self.psi.iter().map(|p| self.alpha * p).collect()
    }

    /// `|alpha * psi_i|` on every mode.
    pub fn mode_magnitudes(&self) -> Vec<f64> {
        let a = self.alpha.norm();
        self.psi.iter().map(|p| a * p.norm()).collect()
    }
}

fn check_components(alpha: Complex64, psi: &[Complex64]) -> Result<()> {
    if psi.is_empty() {
        return Err(BornError::InvalidDimension("d must be at least 1".into()));
    }
    if !alpha.is_finite() || psi.iter().any(|c| !c.is_finite()) {
        return Err(BornError::InvalidState("non-finite amplitude".into()));
    }
    Ok(())
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// One draw of the vacuum noise, `d` iid standard complex Gaussians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRealization {
    z: Vec<Complex64>,
}

impl NoiseRealization {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.is_empty() {
            return Err(BornError::InvalidDimension("d must be at least 1".into()));
        }
        if z.iter().any(|c| !c.is_finite()) {
            return Err(BornError::InvalidState("non-finite noise".into()));
        }
        Ok(Self { z })
    }

    /// The noiseless realization, for testing the deterministic limit.
    pub fn zeros(d: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); d])
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }
}

/// Field amplitudes `a_j` of one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSample {
    a: Vec<Complex64>,
}

impl AmplitudeSample {
    pub fn new(a: Vec<Complex64>) -> Result<Self> {
        if a.is_empty() {
            return Err(BornError::InvalidDimension("d must be at least 1".into()));
        }
        if a.iter().any(|c| !c.is_finite()) {
            return Err(BornError::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }
}

/// Draws `d` standard complex Gaussians, consuming exactly `2d` normal
/// (and `2d` raw) draws from `rng`.
pub fn sample_noise(d: usize, rng: &mut RngStream) -> Result<NoiseRealization> {
    if d == 0 {
        return Err(BornError::InvalidDimension("d must be at least 1".into()));
    }
    let z = (0..d).map(|_| rng.standard_complex_normal()).collect();
    Ok(NoiseRealization { z })
}

/// `a = alpha * psi + z / sqrt(2)` with fresh noise.
pub fn realize(state: &CoherentVector, rng: &mut RngStream) -> AmplitudeSample {
    let a = state
        .psi
        .iter()
        .map(|p| state.alpha * p + rng.standard_complex_normal() * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    AmplitudeSample { a }
}

/// `a = alpha * psi + z / sqrt(2)` for a caller-supplied noise draw.
pub fn realize_with_noise(
    state: &CoherentVector,
    noise: &NoiseRealization,
) -> Result<AmplitudeSample> {
    if noise.dim() != state.dim() {
        return Err(BornError::DimensionMismatch {
            expected: state.dim(),
            got: noise.dim(),
        });
    }
    let a = state
        .psi
        .iter()
        .zip(&noise.z)
        .map(|(p, z)| state.alpha * p + z * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    Ok(AmplitudeSample { a })
}

/// Physical constants for the energy-density bookkeeping. Everything else in
/// the crate works in the dimensionless single-mode limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldUnits {
    pub hbar: f64,
}

impl Default for FieldUnits {
    fn default() -> Self {
        Self { hbar: 1.0 }
    }
}

impl FieldUnits {
    /// Expected time-averaged energy density `(|alpha|^2 + 1/2) hbar omega / V`
    /// of a single-mode coherent state.
    pub fn mean_energy_density(
        &self,
        state: &CoherentVector,
        omega: f64,
        volume: f64,
    ) -> Result<f64> {
        if state.dim() != 1 {
            return Err(BornError::InvalidDimension(format!(
                "energy density needs a single-mode state, got d = {}",
                state.dim()
            )));
        }
        if !(omega > 0.0 && omega.is_finite()) || !(volume > 0.0 && volume.is_finite()) {
            return Err(BornError::Domain(
                "omega and V must be positive and finite".into(),
            ));
        }
        Ok((state.alpha.norm_sqr() + 0.5) * self.hbar * omega / volume)
    }
}

/// [`FieldUnits::mean_energy_density`] with `hbar = 1`.
pub fn mean_energy_density(state: &CoherentVector, omega: f64, volume: f64) -> Result<f64> {
    FieldUnits::default().mean_energy_density(state, omega, volume)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_bad_states() {
        assert!(CoherentVector::new(c(1.0), vec![]).is_err());
        assert!(CoherentVector::new(c(1.0), vec![c(0.5), c(0.5)]).is_err());
        assert!(CoherentVector::new(c(f64::NAN), vec![c(1.0)]).is_err());
        assert!(CoherentVector::normalized(c(1.0), vec![c(0.0)]).is_err());
        assert!(CoherentVector::basis(c(1.0), 2, 2).is_err());
    }

    #[test]
    fn normalized_rescales() {
        let s = CoherentVector::normalized(c(1.0), vec![c(3.0), c(4.0)]).unwrap();
        assert!((l2_norm(s.psi()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sample_noise_shape_and_errors() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(sample_noise(3, &mut rng).unwrap().dim(), 3);
        assert!(matches!(
            sample_noise(0, &mut rng),
            Err(BornError::InvalidDimension(_))
        ));
    }

    #[test]
    fn sample_noise_is_deterministic() {
        let a = sample_noise(4, &mut RngStream::new(77, 3)).unwrap();
        let b = sample_noise(4, &mut RngStream::new(77, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn realize_matches_noise_hook() {
        let state =
            CoherentVector::normalized(c(0.7), vec![c(1.0), Complex64::new(0.0, 1.0)]).unwrap();
        let mut r1 = RngStream::new(5, 5);
        let mut r2 = RngStream::new(5, 5);
        let a = realize(&state, &mut r1);
        let z = sample_noise(2, &mut r2).unwrap();
        let b = realize_with_noise(&state, &z).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noiseless_limit() {
        let state = CoherentVector::single_mode(c(2.0)).unwrap();
        let a = realize_with_noise(&state, &NoiseRealization::zeros(1).unwrap()).unwrap();
        assert_eq!(a.a(), &[c(2.0)]);
        let wrong = NoiseRealization::zeros(2).unwrap();
        assert!(realize_with_noise(&state, &wrong).is_err());
    }

    #[test]
    fn energy_density_values() {
        let vac = CoherentVector::single_mode(c(0.0)).unwrap();
        let one = CoherentVector::single_mode(Complex64::new(0.6, 0.8)).unwrap();
        assert!((mean_energy_density(&vac, 2.0, 4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((mean_energy_density(&one, 2.0, 4.0).unwrap() - 0.75).abs() < 1e-15);
        let v1 = mean_energy_density(&one, 3.0, 5.0).unwrap();
        let v2 = mean_energy_density(&one, 3.0, 10.0).unwrap();
        assert!((v1 - 2.0 * v2).abs() < 1e-15);
        let units = FieldUnits {
            hbar: 1.054_571_817e-34,
        };
        let e = units.mean_energy_density(&vac, 1.0, 1.0).unwrap();
        assert!((e - 0.5 * 1.054_571_817e-34).abs() < 1e-48);
    }

    #[test]
    fn energy_density_needs_single_mode() {
        let s = CoherentVector::basis(c(1.0), 2, 0).unwrap();
        assert!(matches!(
            mean_energy_density(&s, 1.0, 1.0),
            Err(BornError::InvalidDimension(_))
        ));
        let s1 = CoherentVector::single_mode(c(1.0)).unwrap();
        assert!(mean_energy_density(&s1, 0.0, 1.0).is_err());
    }
}
