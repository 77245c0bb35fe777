//! Double-exponential (tanh-sinh) quadrature for complex-valued integrands of
//! a real variable, tolerant of algebraic endpoint singularities.
//!
//! The integrand receives `(x, x - a, b - x)` with both endpoint distances
//! computed without cancellation, so factors like `1/sqrt(b - x)` keep full
//! relative accuracy right up to the endpoint.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::QuadError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// An interval endpoint with the declared exponent of the integrand's
/// algebraic behaviour `(distance)^exponent` there (0 for regular).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub position: f64,
    pub exponent: f64,
}

impl Endpoint {
    pub fn regular(position: f64) -> Self {
        Self { position, exponent: 0.0 }
    }

    pub fn singular(position: f64, exponent: f64) -> Self {
        Self { position, exponent }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Relative tolerance on the change between successive levels.
    pub tolerance: f64,
    pub max_levels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_levels: 12,
        }
    }
}

/// Abscissa half-range in the transformed variable; beyond it weights are
/// below 1e-300 relative.
const T_MAX: f64 = 4.0;

/// Integrates `integrand(x, x - a, b - x)` over `[a, b]` with default options.
pub fn quad_singular<F>(integrand: F, a: Endpoint, b: Endpoint) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    quad_singular_with(integrand, a, b, QuadOptions::default())
}

pub fn quad_singular_with<F>(
    integrand: F,
    a: Endpoint,
    b: Endpoint,
    options: QuadOptions,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    for end in [a, b] {
        if end.exponent <= -1.0 || !end.exponent.is_finite() {
            return Err(QuadError::NonIntegrable(end.exponent));
        }
    }
    if !(a.position.is_finite() && b.position.is_finite()) || a.position >= b.position {
        return Err(QuadError::Interval(a.position, b.position));
    }
    let half = 0.5 * (b.position - a.position);
    let mut evaluations = 0usize;

    // Node at transformed abscissa t: returns weight * f(x) (without step h).
    let mut node = |t: f64| -> Result<Complex64, QuadError> {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let weight = FRAC_PI_2 * t.cosh() / (cu * cu);
        // distances to the endpoints, free of cancellation
        let from_a = half * (u.exp() / cu);
        let to_b = half * ((-u).exp() / cu);
        if weight == 0.0 || from_a == 0.0 || to_b == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let x = if t < 0.0 { a.position + from_a } else { b.position - to_b };
        evaluations += 1;
        let fx = integrand(x, from_a, to_b);
        if !(fx.re.is_finite() && fx.im.is_finite()) {
            return Err(QuadError::NonFinite(x));
        }
        Ok(fx * weight)
    };

    // level 0: step 1
    let mut h = 1.0;
    let mut sum = node(0.0)?;
    let mut k = 1.0;
    while k <= T_MAX {
        sum += node(k)? + node(-k)?;
        k += 1.0;
    }
    let mut estimate = sum * h * half;
    let mut error = f64::INFINITY;

    for _level in 1..=options.max_levels {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            sum += node(t)? + node(-t)?;
            t += 2.0 * h;
        }
        let next = sum * h * half;
        error = (next - estimate).norm();
        estimate = next;
        if error <= options.tolerance * estimate.norm().max(f64::MIN_POSITIVE)
            || error <= 1e-300
        {
            return Ok(QuadResult {
                value: estimate,
                error_estimate: error,
                evaluations,
            });
        }
    }
    Err(QuadError::NoConvergence {
        levels: options.max_levels,
        estimate: error,
    })
}

/// Continuous square root of a complex function sampled along a real
/// parameter interval, anchored at the principal root at the left end.
///
/// The crossings of the radicand over the negative real axis are located
/// once by a dense scan; afterwards the continued root at any parameter is
/// the principal root times `(-1)^(crossings to the left)`.
#[derive(Debug, Clone)]
pub struct ContinuousSqrt {
    crossings: Vec<f64>,
    anchor_sign: f64,
}

impl ContinuousSqrt {
    /// `radicand` must be continuous and nonvanishing on `[a, b]`.
    pub fn new<F>(radicand: F, a: f64, b: f64, samples: usize) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        let samples = samples.max(16);
        let mut crossings = Vec::new();
        let step = (b - a) / samples as f64;
        let mut prev_x = a;
        let mut prev = radicand(a).sqrt();
        for i in 1..=samples {
            let x = if i == samples { b } else { a + step * i as f64 };
            let cur = radicand(x).sqrt();
            if jumped(prev, cur) {
                // bisect on the jump
                let (mut lo, mut hi) = (prev_x, x);
                let mut lo_val = prev;
                for _ in 0..60 {
                    let m = 0.5 * (lo + hi);
                    let mv = radicand(m).sqrt();
                    if jumped(lo_val, mv) {
                        hi = m;
                    } else {
                        lo = m;
                        lo_val = mv;
                    }
                }
                crossings.push(hi);
            }
            prev = cur;
            prev_x = x;
        }
        Self { crossings, anchor_sign: 1.0 }
    }

    /// Chooses the sign at the left anchor.
    pub fn with_anchor_sign(mut self, sign: f64) -> Self {
        self.anchor_sign = sign.signum();
        self
    }

    pub fn crossings(&self) -> &[f64] {
        &self.crossings
    }

    /// Continued root of `value = radicand(x)`.
    pub fn at(&self, x: f64, value: Complex64) -> Complex64 {
        let flips = self.crossings.iter().take_while(|&&c| c <= x).count();
        let sign = if flips % 2 == 0 { self.anchor_sign } else { -self.anchor_sign };
        value.sqrt() * sign
    }
}

fn jumped(prev: Complex64, cur: Complex64) -> bool {
    (cur - prev).norm() > (cur + prev).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn beta_integral() {
        let r = quad_singular(
            |_, da, db| Complex64::new(1.0 / (da * db).sqrt(), 0.0),
            Endpoint::singular(0.0, -0.5),
            Endpoint::singular(1.0, -0.5),
        )
        .unwrap();
        assert!((r.value.re - PI).abs() < 1e-13, "{}", r.value);
        assert!(r.error_estimate >= 0.0);
    }

    #[test]
    fn inverse_sqrt() {
        let r = quad_singular(
            |x, _, _| Complex64::new(1.0 / x.sqrt(), 0.0),
            Endpoint::singular(0.0, -0.5),
            Endpoint::regular(1.0),
        )
        .unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_integrable_and_bad_interval() {
        let f = |_: f64, _: f64, _: f64| Complex64::new(1.0, 0.0);
        assert!(matches!(
            quad_singular(f, Endpoint::singular(0.0, -1.0), Endpoint::regular(1.0)),
            Err(QuadError::NonIntegrable(_))
        ));
        assert!(matches!(
            quad_singular(f, Endpoint::regular(1.0), Endpoint::regular(0.0)),
            Err(QuadError::Interval(..))
        ));
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions { tolerance: 1e-300, max_levels: 2 };
        let r = quad_singular_with(
            |x, _, _| Complex64::new((40.0 * x).sin(), 0.0),
            Endpoint::regular(0.0),
            Endpoint::regular(1.0),
            opts,
        );
        assert!(matches!(r, Err(QuadError::NoConvergence { .. })));
    }

    #[test]
    fn tighter_tolerance_stays_within_estimate() {
        let f = |x: f64, _: f64, db: f64| Complex64::new(x.cos(), x) / db.sqrt();
        let loose = quad_singular_with(
            f,
            Endpoint::regular(0.0),
            Endpoint::singular(2.0, -0.5),
            QuadOptions { tolerance: 1e-6, max_levels: 12 },
        )
        .unwrap();
        let tight = quad_singular_with(
            f,
            Endpoint::regular(0.0),
            Endpoint::singular(2.0, -0.5),
            QuadOptions { tolerance: 1e-12, max_levels: 12 },
        )
        .unwrap();
        assert!((tight.value - loose.value).norm() <= loose.error_estimate);
    }

    #[test]
    fn continuous_sqrt_tracks_winding() {
        // radicand e^{i 3 x}: crosses the cut at x = pi/3
        let f = |x: f64| Complex64::from_polar(1.0, 3.0 * x);
        let cs = ContinuousSqrt::new(f, 0.0, 2.0, 256);
        assert_eq!(cs.crossings().len(), 1);
        assert!((cs.crossings()[0] - PI / 3.0).abs() < 1e-12);
        let x = 1.8;
        let expected = Complex64::from_polar(1.0, 1.5 * x);
        assert!((cs.at(x, f(x)) - expected).norm() < 1e-14);
    }
}
