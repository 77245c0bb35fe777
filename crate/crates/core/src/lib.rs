//! Range boundary of a functional defined on pairs of univalent functions
//! mapping the unit disk and its exterior onto nonoverlapping domains.
//!
//! The crate is organised bottom-up:
//!
//! * [`functional`] parses and differentiates the rational functional
//!   `J(w1, conj w1, w2, conj w2)` and forms the coefficients `p`, `q`.
//! * [`elliptic`] provides Carlson symmetric forms and the Legendre integrals
//!   of the first and third kind (characteristic convention `1 + n sin^2 t`).
//! * [`reduction`] derives every constant of the integrated boundary
//!   equations and evaluates their residuals.
//! * [`quad`] and [`oracle`] re-derive each closed form by direct quadrature.
//! * [`tracer`] solves the boundary system over the angle sweep and builds
//!   the boundary polyline.
//! * [`sampler`] draws admissible pairs from an explicit univalent family.
//! * [`report`] writes CSV / JSON artifacts.

pub mod elliptic;
pub mod error;
pub mod functional;
pub mod oracle;
pub mod quad;
pub mod reduction;
pub mod report;
pub mod sampler;
pub mod tracer;

pub use num_complex::Complex64;

pub use error::{
    EllipticError, FunctionalError, OracleError, QuadError, ReductionError, SamplerError,
    TraceError,
};
pub use functional::{EvalPoint, FunctionalSpec, GradientPair, Term};
pub use reduction::{BranchChoice, ProblemConfig, ReductionConstants, Sign, SqrtAB};
pub use tracer::{BoundaryPoint, Containment, SolverOptions, TraceOptions, TraceResult};
