//! Boundary curve tracing: per-angle Newton solves of the boundary system in
//! the unknowns `(Re w1, Im w1, Re w2, Im w2)`, continued along a uniform
//! angle grid.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ReductionError, TraceError};
use crate::functional::{EvalPoint, FunctionalSpec};
use crate::reduction::{branch_residuals, full_residual_with, BranchChoice, CompleteIntegrals, ProblemConfig, ResidualEval};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Convergence threshold on the scale-free residual max-norm.
    pub tolerance: f64,
    /// Largest residual max-norm (raw and scale-free) of an accepted point.
    pub acceptance: f64,
    /// Relative step length at which iteration stops.
    pub step_tolerance: f64,
    pub max_iterations: usize,
    /// Relative finite-difference step of the Jacobian.
    pub fd_step: f64,
    /// Bound on `|Im A|, |Im B|` relative to `1 + |A| + |B|`.
    pub validity: f64,
    /// Smallest admissible `|w1| / |w2|` and `|w1 - w2| / max(|w1|, |w2|)`.
    pub separation: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            acceptance: 1e-9,
            step_tolerance: 1e-13,
            max_iterations: 60,
            fd_step: 1e-7,
            validity: 1e-9,
            separation: 1e-6,
        }
    }
}

/// Log-polar grid for the initial seed search: `w2 = nu e^{i psi}`,
/// `w1 = mu |w2| e^{i theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedGrid {
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_count: usize,
    pub ratio_phases: usize,
    /// Moduli of `w2` as multiples of `rho`, geometric between the bounds.
    pub outer_scales: [f64; 2],
    pub outer_count: usize,
    pub outer_phases: usize,
    /// Grid minima handed to Newton per seed search.
    pub candidates: usize,
}

impl Default for SeedGrid {
    fn default() -> Self {
        Self {
            ratio_min: 0.01,
            ratio_max: 0.9,
            ratio_count: 14,
            ratio_phases: 16,
            outer_scales: [0.5, 2.0],
            outer_count: 3,
            outer_phases: 6,
            candidates: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub steps: usize,
    pub solver: SolverOptions,
    /// Closure defect allowed, relative to the curve diameter.
    pub closure_tolerance: f64,
    pub refine_levels: usize,
    /// An interval is bisected when its `|dI0|` exceeds this multiple of the
    /// median.
    pub refine_factor: f64,
    /// Fraction of failed grid angles that aborts the trace.
    pub abort_fraction: f64,
    pub seed_grid: SeedGrid,
    /// Independent seed solves; more than one enables multi-start mode.
    pub starts: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            steps: 360,
            solver: SolverOptions::default(),
            closure_tolerance: 1e-6,
            refine_levels: 3,
            refine_factor: 5.0,
            abort_fraction: 0.25,
            seed_grid: SeedGrid::default(),
            starts: 1,
        }
    }
}

impl TraceOptions {
    pub fn validate(&self) -> Result<(), TraceError> {
        if self.steps < 8 {
            return Err(TraceError::Options(format!("alpha steps must be at least 8, got {}", self.steps)));
        }
        let s = &self.solver;
        let positive = [
            ("solver tolerance", s.tolerance),
            ("acceptance", s.acceptance),
            ("step tolerance", s.step_tolerance),
            ("finite-difference step", s.fd_step),
            ("validity", s.validity),
            ("closure tolerance", self.closure_tolerance),
            ("refine factor", self.refine_factor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TraceError::Options(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.abort_fraction) {
            return Err(TraceError::Options("abort fraction must lie in [0, 1]".into()));
        }
        if self.starts == 0 || self.starts > self.steps {
            return Err(TraceError::Options(format!("starts must lie in [1, steps], got {}", self.starts)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub alpha: f64,
    pub w1: Complex64,
    pub w2: Complex64,
    pub a: f64,
    pub b: f64,
    /// Functional value at `(w1, w2)`.
    pub i0: Complex64,
    /// Max-norm of `[Im A, Im B, Re R, Im R]`.
    pub residual_norm: f64,
    /// Max-norm of the scale-free residual.
    pub scaled_residual: f64,
    pub branch: BranchChoice,
    pub iterations: usize,
}

impl BoundaryPoint {
    pub fn point(&self) -> EvalPoint {
        EvalPoint {
            w1: self.w1,
            w2: self.w2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFailure {
    pub alpha: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEvent {
    pub alpha: f64,
    pub branch: BranchChoice,
    pub event: String,
}

/// Mismatch between a continued solution and an independent seed solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartDisagreement {
    pub alpha: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceResult {
    pub functional: String,
    pub config: ProblemConfig,
    pub steps: usize,
    pub points: Vec<BoundaryPoint>,
    pub closed: bool,
    pub closure_defect: Option<f64>,
    pub diameter: f64,
    pub failures: Vec<TraceFailure>,
    pub branch_log: Vec<BranchEvent>,
    pub disagreements: Vec<StartDisagreement>,
}

impl TraceResult {
    pub fn values(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.i0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Containment {
    Inside,
    Outside,
    NearBoundary,
}

// ---------------------------------------------------------------------------
// Single-point solve
// ---------------------------------------------------------------------------

fn to_vec(pt: &EvalPoint) -> Vector4<f64> {
    Vector4::new(pt.w1.re, pt.w1.im, pt.w2.re, pt.w2.im)
}

fn to_point(x: &Vector4<f64>) -> EvalPoint {
    EvalPoint {
        w1: Complex64::new(x[0], x[1]),
        w2: Complex64::new(x[2], x[3]),
    }
}

struct Problem<'a> {
    alpha: f64,
    spec: &'a FunctionalSpec,
    cfg: &'a ProblemConfig,
    ints: CompleteIntegrals,
    branch: BranchChoice,
    opts: SolverOptions,
}

impl Problem<'_> {
    fn degenerate(&self, pt: &EvalPoint) -> Option<ReductionError> {
        let (m1, m2) = (pt.w1.norm(), pt.w2.norm());
        if m1 < self.opts.separation * m2 {
            return Some(ReductionError::Degenerate("w1 -> 0"));
        }
        if (pt.w1 - pt.w2).norm() < self.opts.separation * m1.max(m2) {
            return Some(ReductionError::Degenerate("w1 -> w2"));
        }
        None
    }

    fn evaluate(&self, x: &Vector4<f64>) -> Result<(ResidualEval, Vector4<f64>), ReductionError> {
        let pt = to_point(x);
        pt.validate()?;
        if let Some(err) = self.degenerate(&pt) {
            return Err(err);
        }
        let eval = full_residual_with(self.alpha, self.spec, &pt, self.cfg, &self.ints, self.branch)?;
        let f = Vector4::from(eval.normalized());
        if f.iter().any(|v| !v.is_finite()) {
            return Err(ReductionError::NonFinite("scaled residual"));
        }
        Ok((eval, f))
    }

    fn jacobian(&self, x: &Vector4<f64>, f: &Vector4<f64>) -> Result<Matrix4<f64>, ReductionError> {
        let scale = x.norm();
        let mut jac = Matrix4::zeros();
        for j in 0..4 {
            let h = self.opts.fd_step * x[j].abs().max(1e-3 * scale);
            let mut xh = *x;
            xh[j] += h;
            let step = xh[j] - x[j];
            let (_, fh) = self.evaluate(&xh)?;
            jac.set_column(j, &((fh - f) / step));
        }
        Ok(jac)
    }

    fn finish(&self, eval: &ResidualEval, x: &Vector4<f64>, iterations: usize) -> Result<BoundaryPoint, TraceError> {
        let scaled = eval.normalized().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let raw = eval.max_norm();
        if scaled > self.opts.acceptance || raw > self.opts.acceptance {
            return Err(TraceError::NoConvergence {
                iterations,
                residual: raw.max(scaled),
            });
        }
        if !eval.admissible(self.opts.validity) {
            return Err(TraceError::Inadmissible(format!(
                "A = {}, B = {} at w1 = {}, w2 = {}",
                eval.roots.a,
                eval.roots.b,
                Complex64::new(x[0], x[1]),
                Complex64::new(x[2], x[3])
            )));
        }
        let pt = to_point(x);
        let i0 = self
            .spec
            .eval(&pt)
            .map_err(|e| TraceError::Undefined(ReductionError::Functional(e)))?;
        Ok(BoundaryPoint {
            alpha: self.alpha,
            w1: pt.w1,
            w2: pt.w2,
            a: eval.roots.a.re,
            b: eval.roots.b.re,
            i0,
            residual_norm: raw,
            scaled_residual: scaled,
            branch: self.branch,
            iterations,
        })
    }
}

/// Damped Newton solve of the boundary system at `alpha` from `guess`.
///
/// The step is the minimum-norm least-squares solution of the linearised
/// system (SVD with relative cutoff), so scale-invariant functionals with a
/// rank-deficient Jacobian are handled like regular ones.
pub fn solve_boundary_point(
    alpha: f64,
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    guess: &EvalPoint,
    branch: BranchChoice,
    opts: &SolverOptions,
) -> Result<BoundaryPoint, TraceError> {
    let ints = cfg.integrals().map_err(TraceError::Undefined)?;
    solve_with(&Problem {
        alpha,
        spec,
        cfg,
        ints,
        branch,
        opts: *opts,
    }, guess)
}

fn solve_with(problem: &Problem<'_>, guess: &EvalPoint) -> Result<BoundaryPoint, TraceError> {
    let opts = &problem.opts;
    let mut x = to_vec(guess);
    let (mut eval, mut f) = problem.evaluate(&x).map_err(TraceError::Undefined)?;
    let mut merit = f.norm_squared();

    for iteration in 0..opts.max_iterations {
        if f.amax() <= opts.tolerance {
            return problem.finish(&eval, &x, iteration);
        }
        let jac = problem.jacobian(&x, &f).map_err(TraceError::Undefined)?;
        let svd = jac.svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max();
        let Ok(step) = svd.solve(&(-f), cutoff) else {
            return Err(TraceError::NoConvergence {
                iterations: iteration,
                residual: f.amax(),
            });
        };

        let mut lambda = 1.0;
        let mut last_err = None;
        let mut accepted = None;
        while lambda >= 1e-9 {
            let trial = x + step * lambda;
            match problem.evaluate(&trial) {
                Ok((e, ft)) => {
                    let m = ft.norm_squared();
                    if m <= (1.0 - 1e-4 * lambda) * merit {
                        accepted = Some((trial, e, ft, m));
                        break;
                    }
                }
                Err(err) => last_err = Some(err),
            }
            lambda *= 0.5;
        }
        let Some((trial, e, ft, m)) = accepted else {
            return Err(match last_err {
                Some(err) if lambda < 1e-9 => TraceError::Undefined(err),
                _ => TraceError::NoConvergence {
                    iterations: iteration,
                    residual: f.amax(),
                },
            });
        };
        let moved = (trial - x).norm();
        x = trial;
        eval = e;
        f = ft;
        merit = m;
        if moved <= opts.step_tolerance * x.norm() {
            return problem.finish(&eval, &x, iteration + 1);
        }
    }
    if f.amax() <= opts.tolerance {
        return problem.finish(&eval, &x, opts.max_iterations);
    }
    Err(TraceError::NoConvergence {
        iterations: opts.max_iterations,
        residual: f.amax(),
    })
}

/// All eight sign and arcsine-branch combinations in a fixed order.
pub fn all_branches() -> [BranchChoice; 8] {
    let plain = BranchChoice::sign_combinations(false);
    let alt = BranchChoice::sign_combinations(true);
    [plain[0], plain[1], plain[2], plain[3], alt[0], alt[1], alt[2], alt[3]]
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![(lo * hi).sqrt()];
    }
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

fn phases(count: usize) -> Vec<f64> {
    (0..count.max(1)).map(|i| TAU * i as f64 / count.max(1) as f64).collect()
}

/// Coarse grid minimisation of the scale-free residual over all branches,
/// refined by Newton from the best candidates.
pub fn seed_search(
    alpha: f64,
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    grid: &SeedGrid,
    opts: &SolverOptions,
) -> Result<BoundaryPoint, TraceError> {
    let ints = cfg.integrals().map_err(TraceError::Undefined)?;
    let outer = geometric(grid.outer_scales[0] * cfg.rho, grid.outer_scales[1] * cfg.rho, grid.outer_count);
    let ratios = geometric(grid.ratio_min, grid.ratio_max, grid.ratio_count);
    let mut scored: Vec<(f64, usize, BranchChoice, EvalPoint)> = Vec::new();
    let probe = Problem {
        alpha,
        spec,
        cfg,
        ints,
        branch: all_branches()[0],
        opts: *opts,
    };
    for &nu in &outer {
        for psi in phases(grid.outer_phases) {
            let w2 = Complex64::from_polar(nu, psi);
            for &mu in &ratios {
                for theta in phases(grid.ratio_phases) {
                    let pt = EvalPoint {
                        w1: Complex64::from_polar(mu * nu, theta + psi),
                        w2,
                    };
                    if probe.degenerate(&pt).is_some() {
                        continue;
                    }
                    let Ok(evals) = branch_residuals(alpha, spec, &pt, cfg, &ints) else { continue };
                    for (branch, eval) in evals {
                        let score = eval.normalized().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                        if score.is_finite() {
                            let index = scored.len();
                            scored.push((score, index, branch, pt));
                        }
                    }
                }
            }
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (_, _, branch, pt) in scored.into_iter().take(grid.candidates) {
        let problem = Problem {
            alpha,
            spec,
            cfg,
            ints,
            branch,
            opts: *opts,
        };
        if let Ok(point) = solve_with(&problem, &pt) {
            return Ok(point);
        }
    }
    Err(TraceError::NoSeed(alpha))
}

// ---------------------------------------------------------------------------
// Continuation
// ---------------------------------------------------------------------------

fn predict(history: &[BoundaryPoint], alpha: f64) -> EvalPoint {
    match history {
        [.., p0, p1] if p1.alpha != p0.alpha => {
            let t = (alpha - p1.alpha) / (p1.alpha - p0.alpha);
            EvalPoint {
                w1: p1.w1 + (p1.w1 - p0.w1) * t,
                w2: p1.w2 + (p1.w2 - p0.w2) * t,
            }
        }
        [.., p] => p.point(),
        [] => unreachable!("prediction needs at least one solved point"),
    }
}

/// Solves at `alpha` continuing from `history`, re-searching the other
/// branches when the carried one fails.
fn continue_to(
    alpha: f64,
    history: &[BoundaryPoint],
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    ints: CompleteIntegrals,
    opts: &SolverOptions,
    log: &mut Vec<BranchEvent>,
) -> Result<BoundaryPoint, TraceError> {
    let last = history.last().expect("continuation needs a solved point");
    let guesses = [predict(history, alpha), last.point()];
    let problem = |branch| Problem {
        alpha,
        spec,
        cfg,
        ints,
        branch,
        opts: *opts,
    };
    let mut first_err = None;
    for guess in &guesses {
        match solve_with(&problem(last.branch), guess) {
            Ok(p) => return Ok(p),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    for branch in all_branches().into_iter().filter(|b| *b != last.branch) {
        for guess in &guesses {
            if let Ok(p) = solve_with(&problem(branch), guess) {
                log.push(BranchEvent {
                    alpha,
                    branch,
                    event: "branch re-search".into(),
                });
                return Ok(p);
            }
        }
    }
    Err(first_err.expect("at least one attempt was made"))
}

fn grid_angle(j: usize, steps: usize) -> f64 {
    TAU * j as f64 / steps as f64
}

struct Segment {
    points: Vec<BoundaryPoint>,
    failures: Vec<TraceFailure>,
    log: Vec<BranchEvent>,
    /// Continued solution at the segment's end angle, if reached.
    overshoot: Option<BoundaryPoint>,
}

/// Seeds at grid index `start` (or the first feasible index before `end`)
/// and continues through `end - 1`; then one step onto `end`.
fn run_segment(
    start: usize,
    end: usize,
    steps: usize,
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    ints: CompleteIntegrals,
    opts: &TraceOptions,
) -> Segment {
    let mut seg = Segment {
        points: Vec::new(),
        failures: Vec::new(),
        log: Vec::new(),
        overshoot: None,
    };
    let budget = (opts.abort_fraction * steps as f64).floor() as usize;
    let mut j = start;
    while j < end {
        let alpha = grid_angle(j, steps);
        j += 1;
        match seed_search(alpha, spec, cfg, &opts.seed_grid, &opts.solver) {
            Ok(p) => {
                seg.log.push(BranchEvent {
                    alpha,
                    branch: p.branch,
                    event: "seed".into(),
                });
                seg.points.push(p);
                break;
            }
            Err(e) => {
                seg.failures.push(TraceFailure {
                    alpha,
                    reason: e.to_string(),
                });
                if seg.failures.len() > budget {
                    return seg;
                }
            }
        }
    }
    if seg.points.is_empty() {
        return seg;
    }
    for jj in j..=end {
        if jj == end && end == steps {
            break;
        }
        let alpha = grid_angle(jj, steps);
        match continue_to(alpha, &seg.points, spec, cfg, ints, &opts.solver, &mut seg.log) {
            Ok(p) if jj == end => seg.overshoot = Some(p),
            Ok(p) => seg.points.push(p),
            Err(_) if jj == end => {}
            Err(e) => {
                seg.failures.push(TraceFailure {
                    alpha,
                    reason: e.to_string(),
                });
                if seg.failures.len() > budget {
                    return seg;
                }
            }
        }
    }
    seg
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Bisects intervals whose functional jump exceeds `refine_factor` times the
/// median jump.
fn refine(
    points: &mut Vec<BoundaryPoint>,
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    ints: CompleteIntegrals,
    opts: &TraceOptions,
    log: &mut Vec<BranchEvent>,
) {
    for _ in 0..opts.refine_levels {
        if points.len() < 3 {
            return;
        }
        let jumps: Vec<f64> = points.windows(2).map(|w| (w[1].i0 - w[0].i0).norm()).collect();
        let threshold = opts.refine_factor * median(jumps.clone());
        let mut inserted = Vec::new();
        for (k, jump) in jumps.iter().enumerate() {
            if *jump <= threshold || threshold == 0.0 {
                continue;
            }
            let (left, right) = (points[k], points[k + 1]);
            let alpha = 0.5 * (left.alpha + right.alpha);
            let history = [left];
            let mut attempt = continue_to(alpha, &history, spec, cfg, ints, &opts.solver, log);
            if attempt.is_err() {
                let mid = EvalPoint {
                    w1: 0.5 * (left.w1 + right.w1),
                    w2: 0.5 * (left.w2 + right.w2),
                };
                let problem = Problem {
                    alpha,
                    spec,
                    cfg,
                    ints,
                    branch: left.branch,
                    opts: opts.solver,
                };
                attempt = solve_with(&problem, &mid);
            }
            match attempt {
                Ok(p) => inserted.push(p),
                Err(e) => log.push(BranchEvent {
                    alpha,
                    branch: left.branch,
                    event: format!("refinement failed: {e}"),
                }),
            }
        }
        if inserted.is_empty() {
            return;
        }
        points.extend(inserted);
        points.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    }
}

/// Largest pairwise distance.
pub fn diameter(values: &[Complex64]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Sweeps the angle grid and assembles the boundary polyline.
pub fn trace_curve(
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    opts: &TraceOptions,
) -> Result<TraceResult, TraceError> {
    opts.validate()?;
    cfg.validate().map_err(|e| TraceError::Options(e.to_string()))?;
    let ints = cfg.integrals().map_err(TraceError::Undefined)?;
    let steps = opts.steps;

    let starts: Vec<usize> = (0..opts.starts).map(|s| s * steps / opts.starts).collect();
    let bounds: Vec<(usize, usize)> = starts
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, starts.get(i + 1).copied().unwrap_or(steps)))
        .collect();
    let segments: Vec<Segment> = if bounds.len() == 1 {
        vec![run_segment(0, steps, steps, spec, cfg, ints, opts)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = bounds
                .iter()
                .map(|&(s, e)| scope.spawn(move || run_segment(s, e, steps, spec, cfg, ints, opts)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("segment worker panicked"))
                .collect()
        })
    };

    let mut result = TraceResult {
        functional: spec.to_string(),
        config: *cfg,
        steps,
        points: Vec::new(),
        closed: false,
        closure_defect: None,
        diameter: 0.0,
        failures: Vec::new(),
        branch_log: Vec::new(),
        disagreements: Vec::new(),
    };
    for (i, seg) in segments.iter().enumerate() {
        if let (Some(over), Some(next)) = (seg.overshoot, segments.get(i + 1)) {
            if let Some(first) = next.points.first() {
                if first.alpha == over.alpha {
                    result.disagreements.push(StartDisagreement {
                        alpha: over.alpha,
                        distance: (first.i0 - over.i0).norm(),
                    });
                }
            }
        }
    }
    for seg in segments {
        result.points.extend(seg.points);
        result.failures.extend(seg.failures);
        result.branch_log.extend(seg.log);
    }
    result.points.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    result.failures.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    result.branch_log.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));

    let budget = opts.abort_fraction * steps as f64;
    if result.failures.len() as f64 > budget || result.points.is_empty() {
        finalize(&mut result, spec, cfg, ints, opts, false);
        return Err(TraceError::Aborted {
            failed: result.failures.len(),
            total: steps,
            partial: Box::new(result),
        });
    }
    finalize(&mut result, spec, cfg, ints, opts, true);
    Ok(result)
}

fn finalize(
    result: &mut TraceResult,
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    ints: CompleteIntegrals,
    opts: &TraceOptions,
    complete: bool,
) {
    if complete {
        refine(&mut result.points, spec, cfg, ints, opts, &mut result.branch_log);
    }
    result.diameter = diameter(&result.values());
    let (Some(first), Some(_)) = (result.points.first().copied(), result.points.last()) else {
        return;
    };
    if !complete || first.alpha != 0.0 || result.points.len() < 2 {
        return;
    }
    let mut log = Vec::new();
    if let Ok(wrapped) = continue_to(TAU, &result.points, spec, cfg, ints, &opts.solver, &mut log) {
        let defect = (wrapped.i0 - first.i0).norm();
        result.closure_defect = Some(defect);
        result.closed = defect <= opts.closure_tolerance * result.diameter;
    }
    result.branch_log.extend(log);
}

// ---------------------------------------------------------------------------
// Geometry on the closed polyline
// ---------------------------------------------------------------------------

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Winding number of the closed polyline `vertices` around `p`.
pub fn winding_number(vertices: &[Complex64], p: Complex64) -> i64 {
    let n = vertices.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = vertices[i] - p;
        let b = vertices[(i + 1) % n] - p;
        total += (b / a).arg();
    }
    (total / TAU).round() as i64
}

/// Classifies `point` against the closed trace; "near" means within
/// `1e-6` of the diameter from the polyline.
pub fn contains(trace: &TraceResult, point: Complex64) -> Result<Containment, TraceError> {
    if !trace.closed {
        return Err(TraceError::NotClosed);
    }
    let v = trace.values();
    classify(&v, point, 1e-6 * trace.diameter)
}

/// [`contains`] on an explicit closed polyline with a given band.
pub fn classify(vertices: &[Complex64], point: Complex64, band: f64) -> Result<Containment, TraceError> {
    if vertices.len() < 3 {
        return Err(TraceError::NotClosed);
    }
    let n = vertices.len();
    let near = (0..n).any(|i| segment_distance(point, vertices[i], vertices[(i + 1) % n]) <= band);
    if near {
        return Ok(Containment::NearBoundary);
    }
    Ok(if winding_number(vertices, point) != 0 {
        Containment::Inside
    } else {
        Containment::Outside
    })
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// True when no two non-adjacent edges of the closed polyline intersect.
pub fn is_simple_polyline(vertices: &[Complex64]) -> bool {
    let n = vertices.len();
    if n < 4 {
        return true;
    }
    for i in 0..n {
        let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a1, a2, vertices[j], vertices[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Largest distance from a traced value to the nearest conjugate of a traced
/// value.
pub fn conjugation_mismatch(values: &[Complex64]) -> f64 {
    values
        .iter()
        .map(|v| {
            values
                .iter()
                .map(|w| (v.conj() - w).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `alpha` wrapped into `[0, 2 pi)`.
pub fn wrap_angle(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(TAU);
    if a >= TAU - 4.0 * f64::EPSILON * PI {
        0.0
    } else {
        a
    }
}
