//! Numerical minimization over the PSD cone.
//!
//! The cone is parametrized by an unconstrained factor `B` (3x3), with the
//! triple given by the columns of `B` so that `G = BᵀB`. Every objective here
//! is homogeneous, so the search runs on the unit sphere `‖B‖_F = 1`
//! (`trace G = 1`): each step moves along the tangent gradient and is
//! retracted back onto the sphere. Without the normalization every descent
//! would collapse to the trivial minimizer `B = 0`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::boundary::{classify_equality, DependenceWitness};
use crate::error::{Error, Result};
use crate::gram::{realize_vectors, GramParams, DEFAULT_TOL};
use crate::inequalities::{slack_from_gram, InequalityId, SlackReport};
use crate::sampling::{normal_vec, stream_rng};

/// Armijo sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;
/// Backtracking contraction factor.
const BACKTRACK: f64 = 0.5;
/// Line searches give up below this step.
const MIN_STEP: f64 = 1e-20;
/// Central-difference step for objectives without an analytic gradient.
const FD_STEP: f64 = 1e-6;
/// Tolerance used when classifying equality points found by the search.
pub const EQUALITY_CLASSIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub grad_tol: f64,
    pub seed: u64,
    pub objective: InequalityId,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 20_000,
            step_init: 0.1,
            grad_tol: 1e-12,
            seed: 1,
            objective: InequalityId::XiQuartic,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidConfig(
                "restarts and max_iters must be >= 1".into(),
            ));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.step_init) || !positive(self.grad_tol) {
            return Err(Error::InvalidConfig(
                "step_init and grad_tol must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one descent run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub value: f64,
    pub det: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub min_value: f64,
    /// Row-major factor `B` with `G = BᵀB`.
    pub argmin_factor: [f64; 9],
    pub argmin_gram: GramParams,
    pub det_at_argmin: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Every restart's end point, including stationary points that are not
    /// the global minimum.
    pub restarts: Vec<RestartSummary>,
}

/// Gradient of `ξ` with respect to `(a², b², c², p, q, r)`.
pub fn xi_gradient(g: &GramParams) -> [f64; 6] {
    let GramParams {
        nsq_x: a,
        nsq_y: b,
        nsq_z: c,
        p,
        q,
        r,
    } = *g;
    let s = a + b + c + 2.0 * (p + q + r);
    let abc = a * b * c;
    [
        b * c * s + abc - (2.0 * a * r * r + 2.0 * b * q * r - 2.0 * c * p * r + 4.0 * q * r * r),
        a * c * s + abc - (2.0 * b * q * q + 2.0 * a * q * r - 2.0 * c * p * q + 4.0 * r * q * q),
        a * b * s + abc - (2.0 * c * p * p - 2.0 * a * p * r - 2.0 * b * p * q - 4.0 * p * q * r),
        2.0 * abc - (2.0 * c * c * p - 2.0 * a * c * r - 2.0 * b * c * q - 4.0 * c * q * r),
        2.0 * abc
            - (2.0 * b * b * q + 8.0 * q * r * r + 2.0 * a * b * r - 2.0 * b * c * p
                + 4.0 * a * r * r
                + 8.0 * b * r * q
                - 4.0 * c * p * r),
        2.0 * abc
            - (2.0 * a * a * r + 8.0 * q * q * r + 2.0 * a * b * q - 2.0 * a * c * p
                + 8.0 * a * q * r
                + 4.0 * b * q * q
                - 4.0 * c * p * q),
    ]
}

/// Gram parameters of the columns of `b`.
pub fn gram_of_factor(b: &Matrix3<f64>) -> GramParams {
    GramParams::from_matrix(&(b.transpose() * b))
}

fn factor_to_array(b: &Matrix3<f64>) -> [f64; 9] {
    let mut out = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            out[i * 3 + j] = b[(i, j)];
        }
    }
    out
}

/// A homogeneous objective on factors, evaluated on the unit sphere.
trait Objective {
    fn value(&self, b: &Matrix3<f64>) -> f64;

    /// Euclidean gradient at a unit-norm `b`.
    fn gradient(&self, b: &Matrix3<f64>) -> Matrix3<f64> {
        let mut grad = Matrix3::zeros();
        let mut probe = *b;
        for i in 0..3 {
            for j in 0..3 {
                let orig = probe[(i, j)];
                probe[(i, j)] = orig + FD_STEP;
                let up = self.value(&probe);
                probe[(i, j)] = orig - FD_STEP;
                let down = self.value(&probe);
                probe[(i, j)] = orig;
                grad[(i, j)] = (up - down) / (2.0 * FD_STEP);
            }
        }
        grad
    }
}

fn normalized(b: &Matrix3<f64>) -> Matrix3<f64> {
    let n = b.norm();
    if n == 0.0 {
        *b
    } else {
        b / n
    }
}

struct XiObjective;

impl Objective for XiObjective {
    fn value(&self, b: &Matrix3<f64>) -> f64 {
        crate::inequalities::xi_quartic(&gram_of_factor(&normalized(b)))
    }

    fn gradient(&self, b: &Matrix3<f64>) -> Matrix3<f64> {
        // dξ = tr(W dG) with dG = dBᵀB + BᵀdB, so ∇_B ξ = 2 B W.
        let d = xi_gradient(&gram_of_factor(b));
        let w = Matrix3::new(
            d[0],
            0.5 * d[3],
            0.5 * d[4],
            0.5 * d[3],
            d[1],
            0.5 * d[5],
            0.5 * d[4],
            0.5 * d[5],
            d[2],
        );
        2.0 * b * w
    }
}

/// Slack of an inequality at the trace-normalized Gram point.
struct SlackObjective(InequalityId);

impl Objective for SlackObjective {
    fn value(&self, b: &Matrix3<f64>) -> f64 {
        slack_from_gram(self.0, &gram_of_factor(&normalized(b)), DEFAULT_TOL)
            .map(|r| r.slack)
            .unwrap_or(f64::INFINITY)
    }
}

/// Squared scale-free slack used to hunt equality points.
struct EqualityObjective(InequalityId);

/// Scale-free, nonnegative measure of how far `g` is from equality in `id`;
/// zero exactly on the equality set. On the wrong sign of `pqr` a corollary
/// gap exceeds 1 and grows with `|pqr|`, so descent is pushed back across.
pub fn equality_gap(id: InequalityId, g: &GramParams) -> f64 {
    let d = g.p * g.q * g.r;
    let lhs_c = g.nsq_x * g.r * g.r + g.nsq_y * g.q * g.q + g.nsq_z * g.p * g.p;
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 1.0 };
    match id {
        InequalityId::CorollaryPos => ratio(lhs_c - 3.0 * d, lhs_c + 3.0 * d.max(0.0)),
        InequalityId::CorollaryNeg => ratio(lhs_c + 6.0 * d, lhs_c - 6.0 * d.min(0.0)),
        InequalityId::GramQuadraticQ | InequalityId::SubstitutedR => {
            slack_from_gram(id, g, DEFAULT_TOL)
                .map(|r| r.slack / g.trace().max(f64::MIN_POSITIVE).powi(id.degree()))
                .unwrap_or(1.0)
        }
        _ => match slack_from_gram(id, g, DEFAULT_TOL) {
            Ok(r) => {
                let den = r.lhs.abs() + r.rhs.abs();
                if den > 0.0 {
                    r.slack / den
                } else {
                    0.0
                }
            }
            Err(_) => 1.0,
        },
    }
}

impl Objective for EqualityObjective {
    fn value(&self, b: &Matrix3<f64>) -> f64 {
        equality_gap(self.0, &gram_of_factor(&normalized(b)))
    }
}

struct Descent {
    factor: Matrix3<f64>,
    value: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

/// Riemannian gradient descent on the unit sphere with Armijo backtracking.
fn descend(obj: &dyn Objective, start: &Matrix3<f64>, cfg: &SearchConfig) -> Descent {
    let mut b = normalized(start);
    let mut value = obj.value(&b);
    let mut step = cfg.step_init;
    let mut grad_norm = f64::INFINITY;
    for iter in 0..cfg.max_iters {
        let g = obj.gradient(&b);
        let tangent = g - b * g.dot(&b);
        let gn2 = tangent.norm_squared();
        grad_norm = gn2.sqrt();
        // Every objective is nonnegative on the PSD cone, so zero is optimal.
        if value <= 0.0 || grad_norm <= cfg.grad_tol * value.abs().max(1.0) {
            return Descent {
                factor: b,
                value,
                grad_norm,
                iterations: iter,
                converged: true,
            };
        }
        // Start each line search from twice the last accepted step.
        let mut t = (2.0 * step).max(cfg.step_init);
        let accepted = loop {
            let trial = normalized(&(b - tangent * t));
            let v = obj.value(&trial);
            if v <= value - ARMIJO_C * t * gn2 {
                break Some((trial, v));
            }
            t *= BACKTRACK;
            if t < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((trial, v)) => {
                b = trial;
                value = v;
                step = t;
            }
            // No decrease possible at working precision: a numerical
            // stationary point.
            None => {
                return Descent {
                    factor: b,
                    value,
                    grad_norm,
                    iterations: iter,
                    converged: true,
                }
            }
        }
    }
    Descent {
        factor: b,
        value,
        grad_norm,
        iterations: cfg.max_iters,
        converged: false,
    }
}

fn random_factor(seed: u64, index: usize) -> Matrix3<f64> {
    let mut rng = stream_rng(seed, index as u64);
    Matrix3::from_row_slice(&normal_vec(&mut rng, 9))
}

fn objective_for(id: InequalityId) -> Box<dyn Objective> {
    match id {
        InequalityId::XiQuartic => Box::new(XiObjective),
        other => Box::new(SlackObjective(other)),
    }
}

fn summarize(d: &Descent, index: usize) -> RestartSummary {
    RestartSummary {
        index,
        value: d.value,
        det: gram_of_factor(&d.factor).det(),
        grad_norm: d.grad_norm,
        iterations: d.iterations,
        converged: d.converged,
    }
}

fn result_from(d: Descent, restarts: Vec<RestartSummary>) -> SearchResult {
    let g = gram_of_factor(&d.factor);
    SearchResult {
        min_value: d.value,
        argmin_factor: factor_to_array(&d.factor),
        argmin_gram: g,
        det_at_argmin: g.det(),
        iterations: d.iterations,
        converged: d.converged,
        restarts,
    }
}

/// Minimizes the configured objective (default `ξ`) from `cfg.restarts`
/// random starting factors. Restart `i` draws its start from `(seed, i)`;
/// ties go to the lowest index.
pub fn minimize_xi(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let obj = objective_for(cfg.objective);
    let mut best: Option<Descent> = None;
    let mut summaries = Vec::with_capacity(cfg.restarts);
    for i in 0..cfg.restarts {
        let d = descend(obj.as_ref(), &random_factor(cfg.seed, i), cfg);
        summaries.push(summarize(&d, i));
        if best.as_ref().is_none_or(|b| d.value < b.value) {
            best = Some(d);
        }
    }
    Ok(result_from(best.expect("at least one restart"), summaries))
}

/// Single descent run from a given factor (row-major).
pub fn minimize_from(start: [f64; 9], cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let obj = objective_for(cfg.objective);
    let d = descend(obj.as_ref(), &Matrix3::from_row_slice(&start), cfg);
    let summary = summarize(&d, 0);
    Ok(result_from(d, vec![summary]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityPoint {
    /// Trace-normalized Gram point.
    pub gram: GramParams,
    pub slack: SlackReport,
    pub witnesses: Vec<DependenceWitness>,
}

/// Searches for equality points of `id` by minimizing its squared
/// scale-free gap from `cfg.restarts` random starts.
///
/// A restart contributes a point when its slack is within `tol·scale^deg`
/// (at `DEFAULT_TOL`) and, for the corollaries, `pqr` has the sign of the
/// requested branch. Points are realized as vectors and classified with
/// [`EQUALITY_CLASSIFY_TOL`]; for `strong_hlawka` a point is kept only if the
/// classifier confirms it.
pub fn find_equality_points(id: InequalityId, cfg: &SearchConfig) -> Result<Vec<EqualityPoint>> {
    cfg.validate()?;
    let obj = EqualityObjective(id);
    let mut out = Vec::new();
    for i in 0..cfg.restarts {
        let d = descend(&obj, &random_factor(cfg.seed, i), cfg);
        let g = gram_of_factor(&d.factor);
        let Ok(slack) = slack_from_gram(id, &g, DEFAULT_TOL) else {
            continue;
        };
        let d_sign = g.p * g.q * g.r;
        let branch_ok = match id {
            InequalityId::CorollaryPos => d_sign > 0.0,
            InequalityId::CorollaryNeg => d_sign < 0.0,
            _ => true,
        };
        if !branch_ok || !slack.is_equality {
            continue;
        }
        let witnesses = match realize_vectors(&g, DEFAULT_TOL) {
            Ok(t) => classify_equality(&t, EQUALITY_CLASSIFY_TOL),
            Err(_) => continue,
        };
        if id == InequalityId::StrongHlawka && witnesses.is_empty() {
            continue;
        }
        out.push(EqualityPoint {
            gram: g,
            slack,
            witnesses,
        });
    }
    Ok(out)
}
