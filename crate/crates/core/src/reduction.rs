//! Derived constants of the integrated boundary equations and their
//! residuals.
//!
//! For a candidate `(w1, w2) = (f(r), F(rho))` and coefficients `p`, `q` the
//! integrated system reads
//!
//! ```text
//! -p h Pi(n, k)                      = sqrt(A) K(r)
//! l Pi(phi, m, k) - h0 F(phi, k)     = sqrt(B)/rho K(1/rho)
//! q h* Pi(n*, k') = sqrt(A)/2 K(sqrt(1-r^2)) + sqrt(B)/(2 rho) K(sqrt(1-1/rho^2))
//!                 + (alpha/pi) i sqrt(A) K(r)
//! ```
//!
//! with `A, B > 0`. The first two lines define `sqrt(A)` and `sqrt(B)`; the
//! third is the residual whose zeros (together with real positive `A`, `B`)
//! are boundary points.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{casin, ellip_f, ellip_k, ellip_pi, ellip_pi_complete};
use crate::error::ReductionError;
use crate::functional::{EvalPoint, FunctionalSpec, GradientPair};

/// Moduli of the evaluation points, `r = |z0|` and `rho = |zeta0|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub r: f64,
    pub rho: f64,
}

impl ProblemConfig {
    pub fn new(r: f64, rho: f64) -> Result<Self, ReductionError> {
        let cfg = Self { r, rho };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(ReductionError::Config(format!(
                "r must lie in (0, 1), got {}",
                self.r
            )));
        }
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return Err(ReductionError::Config(format!(
                "rho must lie in (1, inf), got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// The four complete integrals of the right-hand sides.
    pub fn integrals(&self) -> Result<CompleteIntegrals, ReductionError> {
        let real = |x: f64| Complex64::new(x, 0.0);
        let inv = 1.0 / self.rho;
        Ok(CompleteIntegrals {
            k_r: ellip_k(real(self.r))?.re,
            k_r_comp: ellip_k(real((1.0 - self.r * self.r).sqrt()))?.re,
            k_inv_rho: ellip_k(real(inv))?.re,
            k_inv_rho_comp: ellip_k(real((1.0 - inv * inv).sqrt()))?.re,
        })
    }
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self { r: 0.5, rho: 2.0 }
    }
}

/// `K(r)`, `K(sqrt(1-r^2))`, `K(1/rho)`, `K(sqrt(1-1/rho^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompleteIntegrals {
    pub k_r: f64,
    pub k_r_comp: f64,
    pub k_inv_rho: f64,
    pub k_inv_rho_comp: f64,
}

/// Every derived constant for one `(p, q, w1, w2)`.
///
/// `b` and `b_star` are `None` when `C1 = 0` (their pole sits at infinity);
/// `n`, `n_star` and `l` are then zero and all closed forms stay finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionConstants {
    pub c1: Complex64,
    pub c2: Complex64,
    pub a: Complex64,
    pub b: Option<Complex64>,
    pub c: Complex64,
    pub h: Complex64,
    pub n: Complex64,
    pub k: Complex64,
    pub a_star: Complex64,
    pub b_star: Option<Complex64>,
    pub c_star: Complex64,
    pub l: Complex64,
    pub phi: Complex64,
    pub m: Complex64,
    pub h0: Complex64,
    pub h_star: Complex64,
    pub n_star: Complex64,
    pub k_prime: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Branch selections left open by the square-root extractions and by the
/// arcsine in `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchChoice {
    pub sqrt_a: Sign,
    pub sqrt_b: Sign,
    /// Use `pi - arcsin(.)` instead of the principal arcsine for `phi`.
    pub alternate_arcsin: bool,
}

impl Default for BranchChoice {
    fn default() -> Self {
        Self {
            sqrt_a: Sign::Plus,
            sqrt_b: Sign::Plus,
            alternate_arcsin: false,
        }
    }
}

impl BranchChoice {
    /// The four `(+-sqrt(A), +-sqrt(B))` combinations with the given arcsine branch.
    pub fn sign_combinations(alternate_arcsin: bool) -> [BranchChoice; 4] {
        let mk = |a, b| BranchChoice {
            sqrt_a: a,
            sqrt_b: b,
            alternate_arcsin,
        };
        [
            mk(Sign::Plus, Sign::Plus),
            mk(Sign::Plus, Sign::Minus),
            mk(Sign::Minus, Sign::Plus),
            mk(Sign::Minus, Sign::Minus),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtAB {
    pub sqrt_a: Complex64,
    pub sqrt_b: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

impl SqrtAB {
    pub fn new(sqrt_a: Complex64, sqrt_b: Complex64) -> Self {
        Self {
            sqrt_a,
            sqrt_b,
            a: sqrt_a * sqrt_a,
            b: sqrt_b * sqrt_b,
        }
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn derive_constants(
    p: Complex64,
    q: Complex64,
    pt: &EvalPoint,
) -> Result<ReductionConstants, ReductionError> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (w1, w2) = (pt.w1, pt.w2);
    if w1 == zero || w2 == zero {
        return Err(ReductionError::Degenerate("w1*w2"));
    }
    if w1 == w2 {
        return Err(ReductionError::Degenerate("w1-w2"));
    }
    let pq_sum = p + q;
    if pq_sum == zero {
        return Err(ReductionError::Degenerate("p+q"));
    }
    let mut c1 = p * w1 + q * w2;
    // cancellation at rounding level is an exact zero
    if c1.norm() <= 64.0 * f64::EPSILON * ((p * w1).norm() + (q * w2).norm()) {
        c1 = zero;
    }
    let c2 = pq_sum * w1 * w2;
    if c2 == zero {
        return Err(ReductionError::Degenerate("C2"));
    }

    let c = w1 / w2;
    let c_star = w2 / w1;
    let a = (c1 * c).sqrt();
    let a_star = (c1 * c_star).sqrt();
    let (b, b_star) = if c1 == zero {
        (None, None)
    } else {
        (Some(c2 / (c1 * w1)), Some(c2 / (c1 * w2)))
    };
    let n = -c1 * w1 / c2;
    let n_star = -c1 * w2 / c2;
    let k = (q / pq_sum).sqrt();
    let k_prime = (one - k * k).sqrt();
    let h = ((w1 - w2) * w1 * w1 / c2).sqrt();
    let h_star = ((w1 - w2) * w2 * w2 / c2).sqrt();
    let h0 = w1 / h;
    let l = c1 * (c_star / (pq_sum * (w1 - w2))).sqrt();
    let denom = k * (one - c_star);
    if denom == zero {
        return Err(ReductionError::Degenerate("k(1-c*)"));
    }
    let phi = casin(one / denom);
    let m = k * (c_star - one);

    let named = [
        ("C1", c1),
        ("C2", c2),
        ("a", a),
        ("c", c),
        ("h", h),
        ("n", n),
        ("k", k),
        ("a*", a_star),
        ("c*", c_star),
        ("l", l),
        ("phi", phi),
        ("m", m),
        ("h0", h0),
        ("h*", h_star),
        ("n*", n_star),
        ("k'", k_prime),
    ];
    if let Some((name, _)) = named.iter().find(|(_, v)| !finite(*v)) {
        return Err(ReductionError::NonFinite(name));
    }
    if h == zero {
        return Err(ReductionError::Degenerate("h"));
    }

    Ok(ReductionConstants {
        c1,
        c2,
        a,
        b,
        c,
        h,
        n,
        k,
        a_star,
        b_star,
        c_star,
        l,
        phi,
        m,
        h0,
        h_star,
        n_star,
        k_prime,
    })
}

impl ReductionConstants {
    /// Amplitude for the requested arcsine branch.
    pub fn amplitude(&self, alternate_arcsin: bool) -> Complex64 {
        if alternate_arcsin {
            Complex64::new(PI, 0.0) - self.phi
        } else {
            self.phi
        }
    }

    /// `-p h Pi(n, k)`: the integrated left side of the first equation.
    pub fn j_side(&self, p: Complex64) -> Result<Complex64, ReductionError> {
        Ok(-p * self.h * ellip_pi_complete(self.n, self.k)?)
    }

    /// `l Pi(phi, m, k) - h0 F(phi, k)`: the integrated left side of the second.
    pub fn l_side(&self, alternate_arcsin: bool) -> Result<Complex64, ReductionError> {
        let phi = self.amplitude(alternate_arcsin);
        let pi_part = if self.l == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            self.l * ellip_pi(phi, self.m, self.k)?
        };
        Ok(pi_part - self.h0 * ellip_f(phi, self.k)?)
    }

    /// `q h* Pi(n*, k')`: the left side of the combined equation.
    pub fn t_side(&self, q: Complex64) -> Result<Complex64, ReductionError> {
        Ok(q * self.h_star * ellip_pi_complete(self.n_star, self.k_prime)?)
    }
}

/// `sqrt(A) = -p h Pi(n, k) / K(r)`.
pub fn sqrt_a_from_interior(
    rc: &ReductionConstants,
    p: Complex64,
    cfg: &ProblemConfig,
) -> Result<Complex64, ReductionError> {
    let k_r = ellip_k(Complex64::new(cfg.r, 0.0))?;
    Ok(rc.j_side(p)? / k_r)
}

/// `sqrt(B) = rho (l Pi(phi, m, k) - h0 F(phi, k)) / K(1/rho)`.
pub fn sqrt_b_from_exterior(
    rc: &ReductionConstants,
    cfg: &ProblemConfig,
    alternate_arcsin: bool,
) -> Result<Complex64, ReductionError> {
    let k_inv = ellip_k(Complex64::new(1.0 / cfg.rho, 0.0))?;
    Ok(cfg.rho * rc.l_side(alternate_arcsin)? / k_inv)
}

/// Left side minus right side of the combined equation, given its pieces.
pub fn combined_residual(
    alpha: f64,
    t_side: Complex64,
    sqrt_a: Complex64,
    sqrt_b: Complex64,
    cfg: &ProblemConfig,
    ints: &CompleteIntegrals,
) -> Complex64 {
    let i = Complex64::i();
    let rhs = sqrt_a * 0.5 * ints.k_r_comp
        + sqrt_b / (2.0 * cfg.rho) * ints.k_inv_rho_comp
        + (alpha / PI) * i * sqrt_a * ints.k_r;
    t_side - rhs
}

/// Everything known about one candidate point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualEval {
    pub gradient: GradientPair,
    pub constants: ReductionConstants,
    pub roots: SqrtAB,
    pub residual: Complex64,
    pub k_r: f64,
}

impl ResidualEval {
    /// `[Im A, Im B, Re R, Im R]`.
    pub fn components(&self) -> [f64; 4] {
        [
            self.roots.a.im,
            self.roots.b.im,
            self.residual.re,
            self.residual.im,
        ]
    }

    /// Scale-free form `[Im A/|A|, Im B/|B|, R/(|sqrt A| K(r))]`.
    pub fn normalized(&self) -> [f64; 4] {
        let na = self.roots.a.norm().max(f64::MIN_POSITIVE);
        let nb = self.roots.b.norm().max(f64::MIN_POSITIVE);
        let scale = (self.roots.sqrt_a.norm() * self.k_r).max(f64::MIN_POSITIVE);
        [
            self.roots.a.im / na,
            self.roots.b.im / nb,
            self.residual.re / scale,
            self.residual.im / scale,
        ]
    }

    pub fn max_norm(&self) -> f64 {
        self.components().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn admissible(&self, tol: f64) -> bool {
        let (a, b) = (self.roots.a, self.roots.b);
        a.re > 0.0 && b.re > 0.0 && a.im.abs().max(b.im.abs()) <= tol * (1.0 + a.norm() + b.norm())
    }
}

/// Evaluates the combined residual for fixed `p`, `q` at `pt`.
pub fn combined_residual_at(
    alpha: f64,
    p: Complex64,
    q: Complex64,
    pt: &EvalPoint,
    cfg: &ProblemConfig,
    branch: BranchChoice,
) -> Result<Complex64, ReductionError> {
    let rc = derive_constants(p, q, pt)?;
    let ints = cfg.integrals()?;
    let roots = signed_roots(&rc, p, cfg, &ints, branch)?;
    Ok(combined_residual(
        alpha,
        rc.t_side(q)?,
        roots.sqrt_a,
        roots.sqrt_b,
        cfg,
        &ints,
    ))
}

fn signed_roots(
    rc: &ReductionConstants,
    p: Complex64,
    cfg: &ProblemConfig,
    ints: &CompleteIntegrals,
    branch: BranchChoice,
) -> Result<SqrtAB, ReductionError> {
    let sqrt_a = branch.sqrt_a.factor() * rc.j_side(p)? / ints.k_r;
    let sqrt_b =
        branch.sqrt_b.factor() * cfg.rho * rc.l_side(branch.alternate_arcsin)? / ints.k_inv_rho;
    Ok(SqrtAB::new(sqrt_a, sqrt_b))
}

/// Assembles the solver's square system at `pt`, with `p`, `q` taken from
/// the functional at `pt` itself.
pub fn full_residual(
    alpha: f64,
    spec: &FunctionalSpec,
    pt: &EvalPoint,
    cfg: &ProblemConfig,
    branch: BranchChoice,
) -> Result<ResidualEval, ReductionError> {
    let ints = cfg.integrals()?;
    full_residual_with(alpha, spec, pt, cfg, &ints, branch)
}

/// As [`full_residual`] with the complete integrals precomputed.
pub fn full_residual_with(
    alpha: f64,
    spec: &FunctionalSpec,
    pt: &EvalPoint,
    cfg: &ProblemConfig,
    ints: &CompleteIntegrals,
    branch: BranchChoice,
) -> Result<ResidualEval, ReductionError> {
    let gradient = spec.pq(pt, alpha)?;
    let rc = derive_constants(gradient.p, gradient.q, pt)?;
    let roots = signed_roots(&rc, gradient.p, cfg, ints, branch)?;
    let residual = combined_residual(
        gradient.alpha,
        rc.t_side(gradient.q)?,
        roots.sqrt_a,
        roots.sqrt_b,
        cfg,
        ints,
    );
    if !finite(residual) || !finite(roots.a) || !finite(roots.b) {
        return Err(ReductionError::NonFinite("residual"));
    }
    Ok(ResidualEval {
        gradient,
        constants: rc,
        roots,
        residual,
        k_r: ints.k_r,
    })
}

/// [`full_residual_with`] for all eight branch choices at once, sharing the
/// elliptic evaluations. Branches whose amplitude is undefined are omitted.
pub fn branch_residuals(
    alpha: f64,
    spec: &FunctionalSpec,
    pt: &EvalPoint,
    cfg: &ProblemConfig,
    ints: &CompleteIntegrals,
) -> Result<Vec<(BranchChoice, ResidualEval)>, ReductionError> {
    let gradient = spec.pq(pt, alpha)?;
    let rc = derive_constants(gradient.p, gradient.q, pt)?;
    let sqrt_a = rc.j_side(gradient.p)? / ints.k_r;
    let t_side = rc.t_side(gradient.q)?;
    let mut out = Vec::with_capacity(8);
    for alternate in [false, true] {
        let Ok(l_side) = rc.l_side(alternate) else { continue };
        let sqrt_b = cfg.rho * l_side / ints.k_inv_rho;
        for branch in BranchChoice::sign_combinations(alternate) {
            let roots = SqrtAB::new(branch.sqrt_a.factor() * sqrt_a, branch.sqrt_b.factor() * sqrt_b);
            let residual = combined_residual(gradient.alpha, t_side, roots.sqrt_a, roots.sqrt_b, cfg, ints);
            if finite(residual) && finite(roots.a) && finite(roots.b) {
                out.push((
                    branch,
                    ResidualEval {
                        gradient,
                        constants: rc,
                        roots,
                        residual,
                        k_r: ints.k_r,
                    },
                ));
            }
        }
    }
    Ok(out)
}

/// Both sides of the boundary equation with `A` and `B` eliminated:
///
/// ```text
/// -(q h*)/(p h) Pi(n*,k')/Pi(n,k)
///     = 1/2 K(sqrt(1-r^2))/K(r)
///       - 1/2 (l Pi(phi,m,k) - h0 F(phi,k))/(p h Pi(n,k)) K(sqrt(1-1/rho^2))/K(1/rho)
///       + (alpha/pi) i
/// ```
///
/// evaluated from scratch. Sign selections other than `(+, +)` enter as
/// factors `s_A` on the left and `s_B/s_A` on the middle term.
pub fn eliminated_sides(
    alpha: f64,
    p: Complex64,
    q: Complex64,
    pt: &EvalPoint,
    cfg: &ProblemConfig,
    branch: BranchChoice,
) -> Result<(Complex64, Complex64), ReductionError> {
    let rc = derive_constants(p, q, pt)?;
    let real = |x: f64| Complex64::new(x, 0.0);
    let pi_nk = ellip_pi_complete(rc.n, rc.k)?;
    let pi_star = ellip_pi_complete(rc.n_star, rc.k_prime)?;
    let k_r = ellip_k(real(cfg.r))?;
    let k_r_comp = ellip_k(real((1.0 - cfg.r * cfg.r).sqrt()))?;
    let inv = 1.0 / cfg.rho;
    let k_inv = ellip_k(real(inv))?;
    let k_inv_comp = ellip_k(real((1.0 - inv * inv).sqrt()))?;
    let sa = branch.sqrt_a.factor();
    let sb = branch.sqrt_b.factor();
    let ph = p * rc.h;

    let lhs = -sa * (q * rc.h_star) / ph * pi_star / pi_nk;
    let rhs = 0.5 * k_r_comp / k_r
        - 0.5 * (sb / sa) * rc.l_side(branch.alternate_arcsin)? / (ph * pi_nk) * k_inv_comp / k_inv
        + Complex64::new(0.0, alpha / PI);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::parse_functional;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn config_validation() {
        assert!(ProblemConfig::new(0.5, 2.0).is_ok());
        let err = ProblemConfig::new(1.5, 2.0).unwrap_err();
        assert!(err.to_string().contains("r must lie in (0, 1)"));
        assert!(ProblemConfig::new(0.5, 1.0).is_err());
        assert!(ProblemConfig::new(0.5, f64::INFINITY).is_err());
    }

    #[test]
    fn balanced_c1_is_not_degenerate() {
        // p w1 + q w2 = 0 exactly; constants take their finite limits
        let pt = EvalPoint::new(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        let rc = derive_constants(c(1.0, 0.0), c(1.0, 0.0), &pt).unwrap();
        assert_eq!(rc.c1, c(0.0, 0.0));
        assert_eq!(rc.b, None);
        assert_eq!(rc.n, c(0.0, 0.0));
        assert_eq!(rc.l, c(0.0, 0.0));
    }

    #[test]
    fn degenerate_denominators() {
        let pt = EvalPoint::new(c(0.3, 0.1), c(2.0, -0.5)).unwrap();
        assert_eq!(
            derive_constants(c(1.0, 0.0), c(-1.0, 0.0), &pt),
            Err(ReductionError::Degenerate("p+q"))
        );
        assert_eq!(
            derive_constants(c(1.0, 0.0), c(0.0, 0.0), &pt),
            Err(ReductionError::Degenerate("k(1-c*)"))
        );
    }

    #[test]
    fn modulus_for_ratio_functional() {
        // p, q of w1/w3 at (0.3, 2.0), alpha = 0; k^2 = q/(p+q) = -0.075/0.425
        let pt = EvalPoint::new(c(0.3, 0.0), c(2.0, 0.0)).unwrap();
        let rc = derive_constants(c(0.5, 0.0), c(-0.075, 0.0), &pt).unwrap();
        assert!(rc.k.re.abs() < 1e-16);
        assert!((rc.k.im - 0.420_084_025_208_403_4).abs() < 1e-15, "{}", rc.k);
    }

    #[test]
    fn sqrt_a_direct_substitution() {
        let cfg = ProblemConfig::default();
        let pt = EvalPoint::new(c(0.4, 0.2), c(-1.5, 0.7)).unwrap();
        let (p, q) = (c(0.7, -0.2), c(0.3, 0.4));
        let rc = derive_constants(p, q, &pt).unwrap();
        let sa = sqrt_a_from_interior(&rc, p, &cfg).unwrap();
        let k_r = ellip_k(c(cfg.r, 0.0)).unwrap();
        let pi = ellip_pi_complete(rc.n, rc.k).unwrap();
        assert!((sa * k_r + p * rc.h * pi).norm() <= 1e-12 * (p * rc.h * pi).norm());
        let sb = sqrt_b_from_exterior(&rc, &cfg, false).unwrap();
        let k_inv = ellip_k(c(1.0 / cfg.rho, 0.0)).unwrap();
        let lside = rc.l_side(false).unwrap();
        assert!(rel(sb / cfg.rho * k_inv, lside) <= 1e-12);
    }

    #[test]
    fn combined_residual_vanishes_on_constructed_data() {
        let cfg = ProblemConfig::default();
        let ints = cfg.integrals().unwrap();
        let (sa, sb, alpha) = (c(1.3, 0.0), c(0.8, 0.0), 0.9);
        let t = sa * 0.5 * ints.k_r_comp
            + sb / (2.0 * cfg.rho) * ints.k_inv_rho_comp
            + Complex64::new(0.0, alpha / PI) * sa * ints.k_r;
        assert!(combined_residual(alpha, t, sa, sb, &cfg, &ints).norm() < 1e-15);
    }

    #[test]
    fn residual_alpha_term_is_explicit() {
        let cfg = ProblemConfig::default();
        let ints = cfg.integrals().unwrap();
        let pt = EvalPoint::new(c(0.4, 0.2), c(-1.5, 0.7)).unwrap();
        let (p, q) = (c(0.7, -0.2), c(0.3, 0.4));
        let branch = BranchChoice::default();
        let (a1, a2) = (0.3, 1.7);
        let r1 = combined_residual_at(a1, p, q, &pt, &cfg, branch).unwrap();
        let r2 = combined_residual_at(a2, p, q, &pt, &cfg, branch).unwrap();
        let rc = derive_constants(p, q, &pt).unwrap();
        let sa = sqrt_a_from_interior(&rc, p, &cfg).unwrap();
        let expected = -Complex64::new(0.0, (a2 - a1) / PI) * sa * ints.k_r;
        assert!((r2 - r1 - expected).norm() <= 1e-12 * expected.norm());
    }

    #[test]
    fn printed_form_is_residual_over_sqrt_a_k() {
        let cfg = ProblemConfig::default();
        let pt = EvalPoint::new(c(0.4, 0.2), c(-1.5, 0.7)).unwrap();
        let (p, q) = (c(0.7, -0.2), c(0.3, 0.4));
        for branch in BranchChoice::sign_combinations(false) {
            let alpha = 1.1;
            let res = combined_residual_at(alpha, p, q, &pt, &cfg, branch).unwrap();
            let rc = derive_constants(p, q, &pt).unwrap();
            let sa = branch.sqrt_a.factor() * sqrt_a_from_interior(&rc, p, &cfg).unwrap();
            let k_r = ellip_k(c(cfg.r, 0.0)).unwrap();
            let (lhs, rhs) = eliminated_sides(alpha, p, q, &pt, &cfg, branch).unwrap();
            assert!(rel(lhs - rhs, res / (sa * k_r)) < 1e-12);
        }
    }

    #[test]
    fn full_residual_uses_functional_gradient() {
        let spec = parse_functional("w1 + 0.5*w3^2").unwrap();
        let cfg = ProblemConfig::default();
        let pt = EvalPoint::new(c(0.2, 0.1), c(1.8, -0.4)).unwrap();
        let ev = full_residual(0.4, &spec, &pt, &cfg, BranchChoice::default()).unwrap();
        let gp = spec.pq(&pt, 0.4).unwrap();
        let direct = combined_residual_at(0.4, gp.p, gp.q, &pt, &cfg, BranchChoice::default()).unwrap();
        assert!(rel(ev.residual, direct) < 1e-15);
        assert_eq!(ev.components()[2], ev.residual.re);
    }
}
