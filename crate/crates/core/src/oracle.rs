//! Independent verification of the closed-form reductions by direct
//! quadrature of their defining integrals.
//!
//! Every integrand square root is continued along the straight integration
//! path starting from the principal value at the left end
//! ([`ContinuousSqrt`]); closed forms come from square-root extractions with
//! an unspecified global sign, so each comparison accepts `+closed` or
//! `-closed` and records which one matched. Tuples whose singularities come
//! within [`GUARD_MARGIN`] of the path are rejected, not deformed around.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elliptic::{ellip_f, ellip_k, ellip_pi, ellip_pi_complete};
use crate::error::OracleError;
use crate::functional::EvalPoint;
use crate::quad::{quad_singular_with, ContinuousSqrt, Endpoint, QuadOptions};
use crate::reduction::{derive_constants, ProblemConfig, ReductionConstants, Sign};

/// Minimum distance between a path singularity and the integration path.
pub const GUARD_MARGIN: f64 = 0.02;

const BRANCH_SAMPLES: usize = 2048;

fn quad_options() -> QuadOptions {
    QuadOptions {
        tolerance: 1e-10,
        max_levels: 12,
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One quadrature-versus-closed-form comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub quad: Complex64,
    pub closed: Complex64,
    /// Sign of `closed` that matches `quad`.
    pub sign: Sign,
    pub rel_error: f64,
    pub quad_error: f64,
}

impl ReductionCheck {
    fn new(quad: Complex64, closed: Complex64, quad_error: f64) -> Self {
        let plus = (quad - closed).norm();
        let minus = (quad + closed).norm();
        let (sign, diff) = if plus <= minus {
            (Sign::Plus, plus)
        } else {
            (Sign::Minus, minus)
        };
        let rel_error = if diff == 0.0 { 0.0 } else { diff / closed.norm() };
        Self {
            quad,
            closed,
            sign,
            rel_error,
            quad_error,
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.rel_error <= tol
    }
}

fn distance_to_segment(z: Complex64, lo: f64, hi: f64) -> f64 {
    let x = z.re.clamp(lo, hi);
    c(z.re - x, z.im).norm()
}

fn guard(name: &'static str, z: Complex64, lo: f64, hi: f64) -> Result<(), OracleError> {
    if distance_to_segment(z, lo, hi) < GUARD_MARGIN {
        return Err(OracleError::Guard {
            name,
            value: format!("{z}"),
            margin: GUARD_MARGIN,
        });
    }
    Ok(())
}

/// Rejects a zero that sits between the straight path `[0, 1]` and its image
/// under `u = t (pole - 1) / (pole - t)`, the substitution behind the
/// closed forms; there the two paths are not homotopic.
fn substitution_guard(name: &'static str, zero: Option<Complex64>, pole: Complex64) -> Result<(), OracleError> {
    let Some(zero) = zero else { return Ok(()) };
    let one = c(1.0, 0.0);
    let far = one - pole;
    if far.im == 0.0 {
        return Ok(());
    }
    let u = zero * (pole - one) / (pole - zero);
    // circle through 0, 1 and `far`; the image arc is on the side opposite `far`
    let center = c(0.5, (far.norm_sqr() - far.re) / (2.0 * far.im));
    if (u - center).norm() < center.norm() && u.im * far.im < 0.0 {
        return Err(OracleError::Guard {
            name,
            value: format!("{zero}"),
            margin: 0.0,
        });
    }
    Ok(())
}

/// `∫ sqrt(radicand(x)) * weight(x, x-a, b-x) dx` over `[a, b]` with the root
/// continued from the principal value at `a`.
fn integrate_continued<R, W>(
    radicand: R,
    weight: W,
    a: Endpoint,
    b: Endpoint,
) -> Result<(Complex64, f64), OracleError>
where
    R: Fn(f64) -> Complex64,
    W: Fn(f64, f64, f64) -> Complex64,
{
    let root = ContinuousSqrt::new(&radicand, a.position, b.position, BRANCH_SAMPLES);
    let res = quad_singular_with(
        |x, da, db| root.at(x, radicand(x)) * weight(x, da, db),
        a,
        b,
        quad_options(),
    )?;
    Ok((res.value, res.error_estimate))
}

// ---------------------------------------------------------------------------
// Defining integrals of the elliptic functions
// ---------------------------------------------------------------------------

/// `∫_0^phi dt / ((1 + n sin^2 t) sqrt(1 - k^2 sin^2 t))` along `t = s phi`,
/// with the root equal to 1 at `t = 0`.
pub fn pi_by_quadrature(phi: Complex64, n: Complex64, k: Complex64) -> Result<Complex64, OracleError> {
    if phi == c(0.0, 0.0) {
        return Ok(c(0.0, 0.0));
    }
    let one = c(1.0, 0.0);
    let radicand = |s: f64| one - k * k * (phi * s).sin().powi(2);
    let weight = |s: f64, _: f64, _: f64| phi / ((one + n * (phi * s).sin().powi(2)) * radicand(s));
    // sqrt(R)/R = 1/sqrt(R)
    let (v, _) = integrate_continued(radicand, weight, Endpoint::regular(0.0), Endpoint::regular(1.0))?;
    Ok(v)
}

pub fn f_by_quadrature(phi: Complex64, k: Complex64) -> Result<Complex64, OracleError> {
    pi_by_quadrature(phi, c(0.0, 0.0), k)
}

pub fn k_by_quadrature(k: Complex64) -> Result<Complex64, OracleError> {
    pi_by_quadrature(c(FRAC_PI_2, 0.0), c(0.0, 0.0), k)
}

pub fn pi_complete_by_quadrature(n: Complex64, k: Complex64) -> Result<Complex64, OracleError> {
    pi_by_quadrature(c(FRAC_PI_2, 0.0), n, k)
}

/// Arguments `(phi, n, k)` for which both the defining integral and the
/// principal-branch Carlson route are well separated from singular loci.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticSample {
    pub phi: Complex64,
    pub n: Complex64,
    pub k: Complex64,
}

/// Minimum distance kept from zeros and branch cuts by [`sample_elliptic_args`].
pub const ELLIPTIC_MARGIN: f64 = 0.05;

fn distance_to_cut(z: Complex64) -> f64 {
    if z.re >= 0.0 {
        z.norm()
    } else {
        z.im.abs()
    }
}

/// True when every Carlson argument along `t = s phi`, `s in [0, 1]`, keeps
/// [`ELLIPTIC_MARGIN`] from the cut `(-inf, 0]`.
pub fn in_safe_region(sample: &EllipticSample) -> bool {
    let EllipticSample { phi, n, k } = *sample;
    if sample.k.norm() > 0.9 || sample.n.norm() > 0.9 || sample.phi.norm() > FRAC_PI_2 {
        return false;
    }
    let one = c(1.0, 0.0);
    (0..=200).all(|i| {
        let t = phi * (i as f64 / 200.0);
        let s2 = t.sin().powi(2);
        let cos2 = t.cos().powi(2);
        distance_to_cut(one - k * k * s2) >= ELLIPTIC_MARGIN
            && distance_to_cut(one + n * s2) >= ELLIPTIC_MARGIN
            && (i == 0 || distance_to_cut(cos2) >= ELLIPTIC_MARGIN)
    }) && distance_to_cut(one - k * k) >= ELLIPTIC_MARGIN
        && distance_to_cut(one + n) >= ELLIPTIC_MARGIN
}

fn disk_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let rad = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rad, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Rejection-samples `(phi, n, k)` uniformly from the disks `|phi| <= pi/2`,
/// `|n| <= 0.9`, `|k| <= 0.9` restricted to [`in_safe_region`].
pub fn sample_elliptic_args<R: Rng>(rng: &mut R) -> EllipticSample {
    loop {
        let s = EllipticSample {
            phi: disk_point(rng, FRAC_PI_2),
            n: disk_point(rng, 0.9),
            k: disk_point(rng, 0.9),
        };
        if in_safe_region(&s) {
            return s;
        }
    }
}

// ---------------------------------------------------------------------------
// Right-hand side integrals
// ---------------------------------------------------------------------------

/// `∫_0^r dz / sqrt(z (r - z)(1 - r z))`, positive integrand; equals `2 K(r)`.
pub fn anchor_identity(r: f64) -> Result<ReductionCheck, OracleError> {
    let res = quad_singular_with(
        |z, dz0, dzr| c(1.0 / (dz0 * dzr * (1.0 - r * z)).sqrt(), 0.0),
        Endpoint::singular(0.0, -0.5),
        Endpoint::singular(r, -0.5),
        quad_options(),
    )?;
    let closed = 2.0 * ellip_k(c(r, 0.0))?;
    Ok(ReductionCheck::new(res.value, closed, res.error_estimate))
}

/// `-∫_{-1}^0 dz / sqrt(z (r - z)(1 - r z))` against `i K(sqrt(1 - r^2))`
/// (the common factor `sqrt(A)` removed).
pub fn check_t1(cfg: &ProblemConfig) -> Result<ReductionCheck, OracleError> {
    let r = cfg.r;
    // the radicand is negative on (-1, 0) and never crosses the cut
    let res = quad_singular_with(
        |z, _, dz0| -1.0 / c(-dz0 * (r - z) * (1.0 - r * z), 0.0).sqrt(),
        Endpoint::regular(-1.0),
        Endpoint::singular(0.0, -0.5),
        quad_options(),
    )?;
    let closed = c(0.0, 1.0) * ellip_k(c((1.0 - r * r).sqrt(), 0.0))?;
    Ok(ReductionCheck::new(res.value, closed, res.error_estimate))
}

/// Arc integral from `z = -1` to `z = -e^{i alpha}` counterclockwise,
/// against `-(2 alpha / pi) K(r)` (factor `sqrt(A)` removed).
pub fn check_t2(cfg: &ProblemConfig, alpha: f64) -> Result<ReductionCheck, OracleError> {
    let r = cfg.r;
    let closed = -(2.0 * alpha / PI) * ellip_k(c(r, 0.0))?;
    if alpha == 0.0 {
        return Ok(ReductionCheck::new(c(0.0, 0.0), closed, 0.0));
    }
    let radicand = move |phi: f64| {
        let e = Complex64::from_polar(1.0, phi);
        -e * (r + e) * (1.0 + r * e)
    };
    let weight = move |phi: f64, _: f64, _: f64| {
        let e = Complex64::from_polar(1.0, phi);
        // d(-e^{i phi}) / sqrt(R) = -i e^{i phi} sqrt(R) / R
        -Complex64::i() * e / radicand(phi)
    };
    let (quad, err) = integrate_continued(radicand, weight, Endpoint::regular(0.0), Endpoint::regular(alpha))?;
    Ok(ReductionCheck::new(quad, closed, err))
}

/// `∫_1^rho dzeta / sqrt(zeta (rho - zeta)(1 - rho zeta))` against
/// `(i/rho) K(sqrt(1 - 1/rho^2))` (factor `sqrt(B)` removed).
pub fn check_t3(cfg: &ProblemConfig) -> Result<ReductionCheck, OracleError> {
    let rho = cfg.rho;
    let res = quad_singular_with(
        |z, _, d_rho| {
            // radicand negative on (1, rho); principal root is i*sqrt(|.|)
            let value = c(z * d_rho * (1.0 - rho * z), 0.0);
            1.0 / value.sqrt()
        },
        Endpoint::regular(1.0),
        Endpoint::singular(rho, -0.5),
        quad_options(),
    )?;
    let inv = 1.0 / rho;
    let closed = c(0.0, inv) * ellip_k(c((1.0 - inv * inv).sqrt(), 0.0))?;
    Ok(ReductionCheck::new(res.value, closed, res.error_estimate))
}

// ---------------------------------------------------------------------------
// Left-hand side reductions
// ---------------------------------------------------------------------------

/// `J = ∫_0^1 sqrt((C1 c t - C2/w2) / (1 - c t)) / sqrt(t (1 - t)) dt`,
/// the left side after `t = f(z)/f(r)`, against `-2 p h Pi(n, k)`.
pub fn check_j_reduction(
    p: Complex64,
    q: Complex64,
    pt: &EvalPoint,
) -> Result<ReductionCheck, OracleError> {
    let rc = derive_constants(p, q, pt)?;
    if let Some(b) = rc.b {
        guard("b", b, 0.0, 1.0)?;
    }
    guard("1/c", 1.0 / rc.c, 0.0, 1.0)?;
    substitution_guard("b (substitution path)", rc.b, 1.0 / rc.c)?;
    let ReductionConstants { c1, c2, c: cc, .. } = rc;
    let w2 = pt.w2;
    let one = c(1.0, 0.0);
    let radicand = move |t: f64| (c1 * cc * t - c2 / w2) / (one - cc * t);
    let weight = |_: f64, da: f64, db: f64| c(1.0 / (da * db).sqrt(), 0.0);
    let (quad, err) = integrate_continued(
        radicand,
        weight,
        Endpoint::singular(0.0, -0.5),
        Endpoint::singular(1.0, -0.5),
    )?;
    let closed = 2.0 * rc.j_side(p)?;
    Ok(ReductionCheck::new(quad, closed, err))
}

/// `L = ∫_1^inf` of the left side after `t = F(zeta)/F(rho)`, mapped by
/// `t = 1/x`, against `2 (l Pi(phi, m, k) - h0 F(phi, k))`.
///
/// The integrand decays like `C1 / t` at infinity, so only `C1 = 0` tuples
/// converge; others are rejected as divergent.
pub fn check_l_reduction(
    p: Complex64,
    q: Complex64,
    pt: &EvalPoint,
) -> Result<ReductionCheck, OracleError> {
    let rc = derive_constants(p, q, pt)?;
    if let Some(bs) = rc.b_star {
        guard("b*", bs, 1.0, f64::INFINITY)?;
    }
    guard("1/c*", 1.0 / rc.c_star, 1.0, f64::INFINITY)?;
    // in x = 1/t the pole sits at c*
    guard("c*", rc.c_star, 0.0, 1.0)?;
    if rc.c1 != c(0.0, 0.0) {
        return Err(OracleError::Divergent("L integrand ~ C1/t at infinity"));
    }
    let (c2, w1, cs) = (rc.c2, pt.w1, rc.c_star);
    let radicand = move |x: f64| c2 / (w1 * (x - cs));
    let weight = |_: f64, dx0: f64, dx1: f64| c(1.0 / (dx0 * dx1).sqrt(), 0.0);
    let (quad, err) = integrate_continued(
        radicand,
        weight,
        Endpoint::singular(0.0, -0.5),
        Endpoint::singular(1.0, -0.5),
    )?;
    let closed = 2.0 * rc.l_side(false)?;
    Ok(ReductionCheck::new(quad, closed, err))
}

/// `T = ∫_0^{F(rho)} sqrt((C1 w - C2)/(w (w - F(rho))(w - f(r)))) dw` along
/// the straight segment, against `2 i q h* Pi(n*, k')`.
pub fn check_t_reduction(
    p: Complex64,
    q: Complex64,
    pt: &EvalPoint,
) -> Result<ReductionCheck, OracleError> {
    let rc = derive_constants(p, q, pt)?;
    if let Some(bs) = rc.b_star {
        guard("b*", bs, 0.0, 1.0)?;
    }
    guard("1/c*", 1.0 / rc.c_star, 0.0, 1.0)?;
    substitution_guard("b* (substitution path)", rc.b_star, rc.c)?;
    let (c1, c2, w1, w2) = (rc.c1, rc.c2, pt.w1, pt.w2);
    let radicand = move |t: f64| (c1 * w2 * t - c2) / (w1 - w2 * t);
    let weight = |_: f64, da: f64, db: f64| c(1.0 / (da * db).sqrt(), 0.0);
    let (quad, err) = integrate_continued(
        radicand,
        weight,
        Endpoint::singular(0.0, -0.5),
        Endpoint::singular(1.0, -0.5),
    )?;
    let closed = 2.0 * Complex64::i() * rc.t_side(q)?;
    Ok(ReductionCheck::new(quad, closed, err))
}

/// Random `(p, q, w1, w2)` for the reduction checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionTuple {
    pub p: Complex64,
    pub q: Complex64,
    pub w1: Complex64,
    pub w2: Complex64,
}

impl ReductionTuple {
    pub fn point(&self) -> EvalPoint {
        EvalPoint {
            w1: self.w1,
            w2: self.w2,
        }
    }
}

fn annulus_point<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Draws a tuple with `|w1| < 1 < |w2|`; when `balanced`, `q = -p w1 / w2`
/// so that `C1 = 0`.
pub fn random_tuple<R: Rng>(rng: &mut R, balanced: bool) -> ReductionTuple {
    let p = annulus_point(rng, 0.2, 2.0);
    let w1 = annulus_point(rng, 0.1, 0.9);
    let w2 = annulus_point(rng, 1.1, 3.0);
    let q = if balanced {
        -p * w1 / w2
    } else {
        annulus_point(rng, 0.2, 2.0)
    };
    ReductionTuple { p, q, w1, w2 }
}

/// Draws until `check` accepts the tuple (guard and domain rejections are
/// redrawn). Returns the tuple and the check outcome.
pub fn admissible_check<R, F>(
    rng: &mut R,
    balanced: bool,
    check: F,
) -> (ReductionTuple, ReductionCheck)
where
    R: Rng,
    F: Fn(Complex64, Complex64, &EvalPoint) -> Result<ReductionCheck, OracleError>,
{
    loop {
        let t = random_tuple(rng, balanced);
        match check(t.p, t.q, &t.point()) {
            Ok(result) => return (t, result),
            Err(OracleError::Guard { .. }) | Err(OracleError::Reduction(_)) => continue,
            Err(OracleError::Elliptic(_)) => continue,
            Err(e) => panic!("oracle failure on admissible tuple {t:?}: {e}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Verification report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub parameters: BTreeMap<String, Complex64>,
    pub quad: Option<Complex64>,
    pub closed: Option<Complex64>,
    pub sign: Option<Sign>,
    pub rel_error: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

impl CheckRecord {
    fn from_outcome(
        check: &str,
        parameters: BTreeMap<String, Complex64>,
        outcome: Result<ReductionCheck, OracleError>,
        tolerance: f64,
    ) -> Self {
        match outcome {
            Ok(r) => Self {
                check: check.to_string(),
                parameters,
                quad: Some(r.quad),
                closed: Some(r.closed),
                sign: Some(r.sign),
                rel_error: Some(r.rel_error),
                tolerance,
                passed: r.passes(tolerance),
                error: None,
            },
            Err(e) => Self {
                check: check.to_string(),
                parameters,
                quad: None,
                closed: None,
                sign: None,
                rel_error: None,
                tolerance,
                passed: false,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub total: usize,
    pub passed: usize,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub r: f64,
    pub rho: f64,
    pub seed: u64,
    pub summary: Vec<CheckSummary>,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn summarize(&mut self) {
        let mut by_name: BTreeMap<String, CheckSummary> = BTreeMap::new();
        for rec in &self.checks {
            let entry = by_name.entry(rec.check.clone()).or_insert_with(|| CheckSummary {
                check: rec.check.clone(),
                total: 0,
                passed: 0,
                max_rel_error: 0.0,
            });
            entry.total += 1;
            entry.passed += usize::from(rec.passed);
            let err = rec.rel_error.unwrap_or(f64::INFINITY);
            entry.max_rel_error = entry.max_rel_error.max(err);
        }
        self.summary = by_name.into_values().collect();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random tuples per left-side reduction.
    pub tuples: usize,
    /// Random arguments per elliptic defining-integral check.
    pub elliptic_samples: usize,
    /// Tolerance for the reduction comparisons.
    pub tolerance: f64,
    /// Tolerance for the right-side and elliptic checks.
    pub rhs_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            tuples: 100,
            elliptic_samples: 100,
            tolerance: 1e-8,
            rhs_tolerance: 1e-9,
        }
    }
}

fn params(pairs: &[(&str, Complex64)]) -> BTreeMap<String, Complex64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

type Outcome = Result<Complex64, OracleError>;

/// Runs every check at one `(r, rho)` and collects the outcomes.
pub fn run_verification(cfg: &ProblemConfig, opts: &VerifyOptions) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let real = |x: f64| c(x, 0.0);

    checks.push(CheckRecord::from_outcome(
        "anchor_2K",
        params(&[("r", real(cfg.r))]),
        anchor_identity(cfg.r),
        1e-10,
    ));
    checks.push(CheckRecord::from_outcome(
        "T1",
        params(&[("r", real(cfg.r))]),
        check_t1(cfg),
        opts.rhs_tolerance,
    ));
    for alpha in [0.0, FRAC_PI_2, PI] {
        checks.push(CheckRecord::from_outcome(
            "T2",
            params(&[("r", real(cfg.r)), ("alpha", real(alpha))]),
            check_t2(cfg, alpha),
            opts.rhs_tolerance,
        ));
    }
    checks.push(CheckRecord::from_outcome(
        "T3",
        params(&[("rho", real(cfg.rho))]),
        check_t3(cfg),
        opts.rhs_tolerance,
    ));

    type Check = fn(Complex64, Complex64, &EvalPoint) -> Result<ReductionCheck, OracleError>;
    let reductions: [(&str, bool, Check); 3] = [
        ("J", false, check_j_reduction),
        ("L", true, check_l_reduction),
        ("T", false, check_t_reduction),
    ];
    for (name, balanced, check) in reductions {
        for _ in 0..opts.tuples {
            let (t, outcome) = admissible_check(&mut rng, balanced, check);
            checks.push(CheckRecord::from_outcome(
                name,
                params(&[("p", t.p), ("q", t.q), ("w1", t.w1), ("w2", t.w2)]),
                Ok(outcome),
                opts.tolerance,
            ));
        }
    }

    for _ in 0..opts.elliptic_samples {
        let s = sample_elliptic_args(&mut rng);
        let pars = params(&[("phi", s.phi), ("n", s.n), ("k", s.k)]);
        let pairs: [(&str, Outcome, Outcome); 4] = [
            ("K", k_by_quadrature(s.k), ellip_k(s.k).map_err(Into::into)),
            ("F", f_by_quadrature(s.phi, s.k), ellip_f(s.phi, s.k).map_err(Into::into)),
            (
                "Pi_complete",
                pi_complete_by_quadrature(s.n, s.k),
                ellip_pi_complete(s.n, s.k).map_err(Into::into),
            ),
            (
                "Pi",
                pi_by_quadrature(s.phi, s.n, s.k),
                ellip_pi(s.phi, s.n, s.k).map_err(Into::into),
            ),
        ];
        for (name, quad, closed) in pairs {
            let outcome = quad.and_then(|qv| closed.map(|cv| ReductionCheck::new(qv, cv, 0.0)));
            // no sign freedom here: the root is anchored at 1
            let outcome = outcome.map(|mut r| {
                r.sign = Sign::Plus;
                r.rel_error = (r.quad - r.closed).norm() / r.closed.norm();
                r
            });
            checks.push(CheckRecord::from_outcome(name, pars.clone(), outcome, opts.rhs_tolerance));
        }
    }

    let mut report = VerificationReport {
        r: cfg.r,
        rho: cfg.rho,
        seed: opts.seed,
        summary: Vec::new(),
        checks,
    };
    report.summarize();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_modulo_comparison() {
        let r = ReductionCheck::new(c(1.0, 2.0), c(-1.0, -2.0), 0.0);
        assert_eq!(r.sign, Sign::Minus);
        assert_eq!(r.rel_error, 0.0);
        let r = ReductionCheck::new(c(0.0, 0.0), c(0.0, 0.0), 0.0);
        assert!(r.passes(1e-12));
    }

    #[test]
    fn segment_distance() {
        assert_eq!(distance_to_segment(c(0.5, 0.3), 0.0, 1.0), 0.3);
        assert!((distance_to_segment(c(-0.3, 0.4), 0.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(distance_to_segment(c(5.0, 0.0), 1.0, f64::INFINITY), 0.0);
    }

    #[test]
    fn l_guard_rejects_on_path_zero() {
        // b* = C2/(C1 w2) = 1.5 lies on [1, inf)
        let (w1, w2) = (c(0.5, 0.0), c(2.0, 0.0));
        // choose q, then p so that C2/(C1 w2) = 1.5
        let q = c(1.0, 0.0);
        // (p+q) w1 w2 = 1.5 w2 (p w1 + q w2)  =>  p (w1 w2 - 1.5 w1 w2) = 1.5 q w2^2 - q w1 w2
        let p = (1.5 * q * w2 * w2 - q * w1 * w2) / (w1 * w2 - 1.5 * w1 * w2);
        let pt = EvalPoint::new(w1, w2).unwrap();
        let rc = derive_constants(p, q, &pt).unwrap();
        assert!((rc.b_star.unwrap() - c(1.5, 0.0)).norm() < 1e-12);
        assert!(matches!(
            check_l_reduction(p, q, &pt),
            Err(OracleError::Guard { name: "b*", .. })
        ));
    }

    #[test]
    fn l_rejects_divergent_tuple() {
        let pt = EvalPoint::new(c(0.3, 0.2), c(-2.0, 1.0)).unwrap();
        assert!(matches!(
            check_l_reduction(c(1.0, 0.5), c(0.4, -0.2), &pt),
            Err(OracleError::Divergent(_))
        ));
    }

    #[test]
    fn t2_empty_arc() {
        let r = check_t2(&ProblemConfig::default(), 0.0).unwrap();
        assert_eq!(r.quad, c(0.0, 0.0));
        assert_eq!(r.closed.norm(), 0.0);
        assert!(r.passes(1e-12));
    }
}
