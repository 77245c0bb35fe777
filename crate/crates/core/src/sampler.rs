//! Explicit admissible pairs `(f, F)` and functional values at them.
//!
//! The family is
//!
//! ```text
//! f(z)    = R e^{i theta1} z (1 + a z) / (1 + |a|),   |a| <= 1/2
//! F(zeta) = R e^{i theta2} zeta
//! ```
//!
//! Admissibility: `z + a z^2` has derivative `1 + 2 a z`, which has positive
//! real part on the unit disk when `|a| <= 1/2`, so it is univalent there
//! (Noshiro-Warschawski). Since `|z (1 + a z)| < 1 + |a|` on the disk, `f`
//! maps it into the open disk of radius `R`, while `F` maps the exterior of
//! the unit disk onto the exterior of the closed disk of radius `R`. The two
//! images are therefore disjoint, `f(0) = 0` and `F(inf) = inf`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SamplerError;
use crate::functional::{EvalPoint, FunctionalSpec};
use crate::reduction::ProblemConfig;

/// Largest distortion coefficient for which `z (1 + a z)` stays univalent.
pub const MAX_DISTORTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub scale: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub a: Complex64,
    /// `f(r)`
    pub w1: Complex64,
    /// `F(rho)`
    pub w2: Complex64,
}

impl PairSample {
    pub fn point(&self) -> EvalPoint {
        EvalPoint {
            w1: self.w1,
            w2: self.w2,
        }
    }
}

/// Interior map of the family at `z`.
pub fn family_f(scale: f64, theta1: f64, a: Complex64, z: Complex64) -> Complex64 {
    Complex64::from_polar(scale, theta1) * z * (1.0 + a * z) / (1.0 + a.norm())
}

/// Exterior map of the family at `zeta`.
pub fn family_big_f(scale: f64, theta2: f64, zeta: Complex64) -> Complex64 {
    Complex64::from_polar(scale, theta2) * zeta
}

pub fn sample_pair(
    scale: f64,
    theta1: f64,
    theta2: f64,
    a: Complex64,
    cfg: &ProblemConfig,
) -> Result<PairSample, SamplerError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(SamplerError::Parameter(format!("R must be positive and finite, got {scale}")));
    }
    if !(theta1.is_finite() && theta2.is_finite()) {
        return Err(SamplerError::Parameter("rotation angles must be finite".into()));
    }
    if a.norm().is_nan() || a.norm() > MAX_DISTORTION {
        return Err(SamplerError::Parameter(format!(
            "|a| must not exceed {MAX_DISTORTION}, got {}",
            a.norm()
        )));
    }
    cfg.validate()
        .map_err(|e| SamplerError::Parameter(e.to_string()))?;
    Ok(PairSample {
        scale,
        theta1,
        theta2,
        a,
        w1: family_f(scale, theta1, a, Complex64::new(cfg.r, 0.0)),
        w2: family_big_f(scale, theta2, Complex64::new(cfg.rho, 0.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub value: Complex64,
    pub pair: PairSample,
}

/// `count` functional values at random family members: `log R` uniform on
/// `[-1, 1]`, rotations uniform on `[0, 2 pi)`, `a` uniform on the disk of
/// radius 1/2. The same seed always yields the same cloud.
pub fn sample_cloud(
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    count: usize,
    seed: u64,
) -> Result<Vec<CloudPoint>, SamplerError> {
    if count == 0 {
        return Err(SamplerError::Parameter("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let scale = rng.gen_range(-1.0..=1.0f64).exp();
        let theta1 = rng.gen_range(0.0..TAU);
        let theta2 = rng.gen_range(0.0..TAU);
        let radius = MAX_DISTORTION * rng.gen::<f64>().sqrt();
        let a = Complex64::from_polar(radius, rng.gen_range(0.0..TAU));
        let pair = sample_pair(scale, theta1, theta2, a, cfg)?;
        let value = spec.eval(&pair.point())?;
        out.push(CloudPoint { value, pair });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ProblemConfig {
        ProblemConfig::default()
    }

    #[test]
    fn identity_member() {
        let s = sample_pair(1.0, 0.0, 0.0, Complex64::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(s.w1, Complex64::new(0.5, 0.0));
        assert_eq!(s.w2, Complex64::new(2.0, 0.0));
    }

    #[test]
    fn distorted_member() {
        let s = sample_pair(1.0, 0.0, 0.0, Complex64::new(0.5, 0.0), &cfg()).unwrap();
        assert!((s.w1.re - 0.5 * 1.25 / 1.5).abs() < 1e-16);
        assert_eq!(s.w1.im, 0.0);
    }

    #[test]
    fn parameter_errors() {
        let zero = Complex64::new(0.0, 0.0);
        assert!(sample_pair(0.0, 0.0, 0.0, zero, &cfg()).is_err());
        assert!(sample_pair(-1.0, 0.0, 0.0, zero, &cfg()).is_err());
        assert!(sample_pair(1.0, 0.0, 0.0, Complex64::new(0.4, 0.4), &cfg()).is_err());
        assert!(sample_pair(1.0, f64::NAN, 0.0, zero, &cfg()).is_err());
    }

    #[test]
    fn modulus_bound_and_scale_invariance() {
        let spec = FunctionalSpec::ratio();
        let cloud = sample_cloud(&spec, &cfg(), 2000, 3).unwrap();
        assert!(cloud.iter().all(|c| c.value.norm() < 0.25));

        let a = Complex64::new(0.1, -0.3);
        let s1 = sample_pair(0.5, 1.0, 2.0, a, &cfg()).unwrap();
        let s2 = sample_pair(2.0, 1.0, 2.0, a, &cfg()).unwrap();
        let (i1, i2) = (spec.eval(&s1.point()).unwrap(), spec.eval(&s2.point()).unwrap());
        assert!((i1 - i2).norm() <= 1e-15 * i1.norm());
    }

    #[test]
    fn seeded_cloud_is_reproducible() {
        let spec = FunctionalSpec::ratio();
        let a = sample_cloud(&spec, &cfg(), 50, 11).unwrap();
        let b = sample_cloud(&spec, &cfg(), 50, 11).unwrap();
        assert_eq!(a, b);
        assert!(sample_cloud(&spec, &cfg(), 0, 11).is_err());
    }
}
