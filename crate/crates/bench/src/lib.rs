//! Shared fixtures for the benchmarks.

use nonoverlap::{Complex64, EvalPoint, FunctionalSpec, ProblemConfig};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Default problem `(r, rho) = (0.5, 2)`.
pub fn problem() -> ProblemConfig {
    ProblemConfig::default()
}

pub fn ratio() -> FunctionalSpec {
    FunctionalSpec::ratio()
}

/// Boundary point of `w1/w3` at angle zero for the default problem.
pub fn seed_point() -> EvalPoint {
    EvalPoint::new(c(-0.10518374264600001, 0.0), c(2.0, 0.0)).expect("valid point")
}

/// Carlson arguments off the real axis, including one with `Re p < 0`.
pub fn carlson_args() -> [(Complex64, Complex64, Complex64, Complex64); 2] {
    [
        (c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0), c(4.0, -2.0)),
        (c(0.3, 0.4), c(2.0, 0.0), c(-0.5, -0.5), c(-1.0, 0.1)),
    ]
}
