use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("functional is constant; at least one term must depend on w1..w4")]
    Constant,
    #[error("functional has no terms")]
    Empty,
    #[error("domain violation: w{coordinate} is zero but is raised to a negative power")]
    Domain { coordinate: usize },
    #[error("invalid evaluation point: {0}")]
    Point(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error("{function}: argument lies on the branch cut or is non-finite")]
    Domain { function: &'static str },
    #[error("{function}: more than one argument is zero")]
    TwoZeros { function: &'static str },
    #[error("{function}: pole on the integration path")]
    Pole { function: &'static str },
    #[error("{function}: duplication did not converge in {iterations} iterations")]
    NoConvergence {
        function: &'static str,
        iterations: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge after {levels} levels (estimate {estimate:e})")]
    NoConvergence { levels: usize, estimate: f64 },
    #[error("endpoint exponent {0} is not integrable")]
    NonIntegrable(f64),
    #[error("integrand is non-finite at x = {0}")]
    NonFinite(f64),
    #[error("invalid interval [{0}, {1}]")]
    Interval(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("degenerate constants: {0} vanishes")]
    Degenerate(&'static str),
    #[error("constant {0} is not finite")]
    NonFinite(&'static str),
    #[error("invalid problem configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("singularity {name} = {value} lies within {margin} of the integration path")]
    Guard {
        name: &'static str,
        value: String,
        margin: f64,
    },
    #[error("defining integral diverges: {0}")]
    Divergent(&'static str),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("converged to an inadmissible point: {0}")]
    Inadmissible(String),
    #[error("residual undefined at iterate: {0}")]
    Undefined(ReductionError),
    #[error("seed search found no admissible starting point at alpha = {0}")]
    NoSeed(f64),
    #[error("trace aborted: {failed} of {total} angles failed")]
    Aborted {
        failed: usize,
        total: usize,
        /// Everything solved before the abort.
        partial: Box<crate::tracer::TraceResult>,
    },
    #[error("trace is not closed")]
    NotClosed,
    #[error("invalid trace options: {0}")]
    Options(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}
