//! Boundary analysis of `ξ`: linear-dependence substitutions, their factored
//! forms, the admissible interval for `p`, and the equality-case classifier.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{dot, gram_from_vectors, GramParams, VectorTriple, DEFAULT_TOL};
use crate::inequalities::xi_quartic;

/// Which vector is written as a combination of the other two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DependenceTag {
    /// `z = λx + μy`
    #[serde(rename = "case_i")]
    CaseI,
    /// `x = λy + μz`
    #[serde(rename = "case_ii")]
    CaseII,
    /// `y = λx + μz`
    #[serde(rename = "case_iii")]
    CaseIII,
}

impl DependenceTag {
    pub const ALL: [DependenceTag; 3] = [
        DependenceTag::CaseI,
        DependenceTag::CaseII,
        DependenceTag::CaseIII,
    ];

    fn free_names(&self) -> &'static str {
        match self {
            DependenceTag::CaseI => "(nsq_x, nsq_y, p)",
            DependenceTag::CaseII => "(nsq_y, nsq_z, r)",
            DependenceTag::CaseIII => "(nsq_x, nsq_z, q)",
        }
    }
}

impl fmt::Display for DependenceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DependenceTag::CaseI => "case_i",
            DependenceTag::CaseII => "case_ii",
            DependenceTag::CaseIII => "case_iii",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceCase {
    pub tag: DependenceTag,
    pub lambda: f64,
    pub mu: f64,
}

impl DependenceCase {
    pub fn new(tag: DependenceTag, lambda: f64, mu: f64) -> Self {
        Self { tag, lambda, mu }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceWitness {
    #[serde(flatten)]
    pub case: DependenceCase,
    /// `‖v − λu − μw‖ / √scale`.
    pub dependence_residual: f64,
    /// `|condition(λ, μ)| / (scale · (1 + λ² + μ²))`.
    pub condition_residual: f64,
}

/// Gram parameters with some entries left unspecified.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialGram {
    pub nsq_x: Option<f64>,
    pub nsq_y: Option<f64>,
    pub nsq_z: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
}

impl PartialGram {
    /// Free block of `tag`: the squared norms of the two spanning vectors and
    /// their inner product.
    pub fn for_case(tag: DependenceTag, first_nsq: f64, second_nsq: f64, inner: f64) -> Self {
        let mut g = Self::default();
        match tag {
            DependenceTag::CaseI => {
                g.nsq_x = Some(first_nsq);
                g.nsq_y = Some(second_nsq);
                g.p = Some(inner);
            }
            DependenceTag::CaseII => {
                g.nsq_y = Some(first_nsq);
                g.nsq_z = Some(second_nsq);
                g.r = Some(inner);
            }
            DependenceTag::CaseIII => {
                g.nsq_x = Some(first_nsq);
                g.nsq_z = Some(second_nsq);
                g.q = Some(inner);
            }
        }
        g
    }

    /// Restricts a full Gram point to the free block of `tag`.
    pub fn from_gram(tag: DependenceTag, g: &GramParams) -> Self {
        match tag {
            DependenceTag::CaseI => Self::for_case(tag, g.nsq_x, g.nsq_y, g.p),
            DependenceTag::CaseII => Self::for_case(tag, g.nsq_y, g.nsq_z, g.r),
            DependenceTag::CaseIII => Self::for_case(tag, g.nsq_x, g.nsq_z, g.q),
        }
    }
}

/// The 2x2 Gram block of the spanning pair.
#[derive(Debug, Clone, Copy, PartialEq)]
struct FreeBlock {
    first: f64,
    second: f64,
    inner: f64,
}

impl FreeBlock {
    fn extract(tag: DependenceTag, free: &PartialGram) -> Result<Self> {
        let wrong = || Error::WrongFreeParameters {
            case: tag,
            expected: tag.free_names(),
        };
        let f = free;
        let (first, second, inner, rest) = match tag {
            DependenceTag::CaseI => (f.nsq_x, f.nsq_y, f.p, [f.nsq_z, f.q, f.r]),
            DependenceTag::CaseII => (f.nsq_y, f.nsq_z, f.r, [f.nsq_x, f.p, f.q]),
            DependenceTag::CaseIII => (f.nsq_x, f.nsq_z, f.q, [f.nsq_y, f.p, f.r]),
        };
        if rest.iter().any(Option::is_some) {
            return Err(wrong());
        }
        let block = Self {
            first: first.ok_or_else(wrong)?,
            second: second.ok_or_else(wrong)?,
            inner: inner.ok_or_else(wrong)?,
        };
        let s = 1f64.max(block.first).max(block.second);
        let minor = block.minor();
        if block.first < -DEFAULT_TOL * s
            || block.second < -DEFAULT_TOL * s
            || minor < -DEFAULT_TOL * s * s
        {
            return Err(Error::FreeBlockNotPsd(minor));
        }
        Ok(block)
    }

    fn minor(&self) -> f64 {
        self.first * self.second - self.inner * self.inner
    }
}

/// The equality condition of a case, as a function of the spanning block.
///
/// * case_i:   `a²λ(λ+1) − b²μ(μ+1)`
/// * case_ii:  `b²λ(λ+1) + c²μ(μ+1) + 2λ(μ+1)r`
/// * case_iii: `a²λ(λ+1) + c²μ(μ+1) + 2λ(μ+1)q`
fn condition(tag: DependenceTag, lambda: f64, mu: f64, first: f64, second: f64, inner: f64) -> f64 {
    let l = first * lambda * (lambda + 1.0);
    let m = second * mu * (mu + 1.0);
    match tag {
        DependenceTag::CaseI => l - m,
        DependenceTag::CaseII | DependenceTag::CaseIII => l + m + 2.0 * lambda * (mu + 1.0) * inner,
    }
}

/// Gram parameters determined by the linear relation of `case` together with
/// the free block.
pub fn substitute_dependence(case: &DependenceCase, free: &PartialGram) -> Result<GramParams> {
    let FreeBlock {
        first,
        second,
        inner,
    } = FreeBlock::extract(case.tag, free)?;
    let (l, m) = (case.lambda, case.mu);
    let combined = l * l * first + m * m * second + 2.0 * l * m * inner;
    let with_first = l * first + m * inner;
    let with_second = l * inner + m * second;
    Ok(match case.tag {
        // z = λx + μy
        DependenceTag::CaseI => {
            GramParams::new(first, second, combined, inner, with_first, with_second)
        }
        // x = λy + μz
        DependenceTag::CaseII => {
            GramParams::new(combined, first, second, with_first, with_second, inner)
        }
        // y = λx + μz
        DependenceTag::CaseIII => {
            GramParams::new(first, combined, second, with_first, inner, with_second)
        }
    })
}

/// Closed-form factorization of `ξ` on the dependence stratum:
/// the free-block minor times the squared condition.
pub fn factored_xi(case: &DependenceCase, free: &PartialGram) -> Result<f64> {
    let b = FreeBlock::extract(case.tag, free)?;
    let cond = condition(case.tag, case.lambda, case.mu, b.first, b.second, b.inner);
    Ok(b.minor() * cond * cond)
}

/// [`factored_xi`] with the sign of the condition's second term flipped;
/// exists so callers can confirm that a broken identity is detected.
#[doc(hidden)]
pub fn tampered_factored_xi(case: &DependenceCase, free: &PartialGram) -> Result<f64> {
    let b = FreeBlock::extract(case.tag, free)?;
    let cond = condition(case.tag, case.lambda, case.mu, b.first, -b.second, b.inner);
    Ok(b.minor() * cond * cond)
}

/// `|ξ(substituted) − factored| / max(1, scale⁴)`.
pub fn identity_residual(case: &DependenceCase, free: &PartialGram) -> Result<f64> {
    let g = substitute_dependence(case, free)?;
    let direct = xi_quartic(&g);
    let factored = factored_xi(case, free)?;
    Ok((direct - factored).abs() / g.scale().powi(4))
}

/// Real roots `μ` of the condition for a given `λ` (the condition is
/// quadratic in `μ`). Returns `None` when no real root exists.
pub fn solve_condition_mu(
    tag: DependenceTag,
    lambda: f64,
    free: &PartialGram,
) -> Result<Option<[f64; 2]>> {
    let FreeBlock {
        first,
        second,
        inner,
    } = FreeBlock::extract(tag, free)?;
    let l_term = first * lambda * (lambda + 1.0);
    let (a, b, c) = match tag {
        DependenceTag::CaseI => (-second, -second, l_term),
        DependenceTag::CaseII | DependenceTag::CaseIII => (
            second,
            second + 2.0 * lambda * inner,
            l_term + 2.0 * lambda * inner,
        ),
    };
    Ok(quadratic_roots(a, b, c))
}

/// Real roots of `a t² + b t + c`, smaller first. A degenerate linear
/// equation returns its single root twice.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<[f64; 2]> {
    if a == 0.0 {
        if b == 0.0 {
            return (c == 0.0).then_some([0.0, 0.0]);
        }
        let t = -c / b;
        return Some([t, t]);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let (t1, t2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Some(if t1 <= t2 { [t1, t2] } else { [t2, t1] })
}

// ---------------------------------------------------------------------------
// Admissible interval for p
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    Interval,
    FullSegment,
    Empty,
    Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PInterval {
    pub kind: IntervalKind,
    pub lo: f64,
    pub hi: f64,
}

impl PInterval {
    fn empty() -> Self {
        Self {
            kind: IntervalKind::Empty,
            lo: f64::NAN,
            hi: f64::NAN,
        }
    }
}

fn gram_at_p(a2: f64, b2: f64, c2: f64, q: f64, r: f64, p: f64) -> GramParams {
    GramParams::new(a2, b2, c2, p, q, r)
}

/// The set `{p : det G(p) >= 0, |p| <= ab}` for fixed `a², b², c², q, r`.
///
/// `det G(p) = −c²p² + 2qr·p + (a²b²c² − a²r² − b²q²)` is a downward
/// parabola whose discriminant factors as `(a²c² − q²)(b²c² − r²)`.
pub fn p_interval(a2: f64, b2: f64, c2: f64, q: f64, r: f64) -> Result<PInterval> {
    let scale = 1f64.max(a2).max(b2).max(c2);
    let tol = DEFAULT_TOL;
    for (name, v) in [("a2", a2), ("b2", b2), ("c2", c2)] {
        if v < -tol * scale {
            return Err(Error::InvalidConfig(format!(
                "{name} must be nonnegative, got {v}"
            )));
        }
    }
    let (a2, b2, c2) = (a2.max(0.0), b2.max(0.0), c2.max(0.0));
    let bound_q = (a2 * c2).sqrt();
    let bound_r = (b2 * c2).sqrt();
    if q.abs() > bound_q + tol * scale {
        return Err(Error::CauchySchwarzBound {
            name: "q",
            value: q,
            bound: bound_q,
        });
    }
    if r.abs() > bound_r + tol * scale {
        return Err(Error::CauchySchwarzBound {
            name: "r",
            value: r,
            bound: bound_r,
        });
    }

    let ab = (a2 * b2).sqrt();
    if c2 <= tol * scale {
        return Ok(PInterval {
            kind: IntervalKind::FullSegment,
            lo: -ab,
            hi: ab,
        });
    }

    let clamp = |m: f64| {
        if (-tol * scale * scale..0.0).contains(&m) {
            0.0
        } else {
            m
        }
    };
    let m_xz = clamp(a2 * c2 - q * q);
    let m_yz = clamp(b2 * c2 - r * r);
    if m_xz < 0.0 || m_yz < 0.0 {
        return Ok(PInterval::empty());
    }
    let disc = m_xz * m_yz;
    let vertex = q * r / c2;
    if disc == 0.0 {
        if vertex.abs() > ab + tol * scale {
            return Ok(PInterval::empty());
        }
        let p = vertex.clamp(-ab, ab);
        return Ok(PInterval {
            kind: IntervalKind::Point,
            lo: p,
            hi: p,
        });
    }
    // Roots of c²p² − 2qr·p − k = 0, k = a²b²c² − a²r² − b²q².
    let sq = disc.sqrt();
    let qr = q * r;
    let big = if qr >= 0.0 { qr + sq } else { qr - sq };
    let k = a2 * b2 * c2 - a2 * r * r - b2 * q * q;
    let (r1, r2) = (big / c2, -k / big);
    let lo = r1.min(r2).max(-ab);
    let hi = r1.max(r2).min(ab);
    if lo > hi {
        return Ok(PInterval::empty());
    }
    Ok(PInterval {
        kind: if lo == hi {
            IntervalKind::Point
        } else {
            IntervalKind::Interval
        },
        lo,
        hi,
    })
}

/// Checks that `ξ` at `samples` evenly spaced interior points of the
/// admissible `p`-interval never drops below the smaller endpoint value
/// (minus `tol·scale⁴`).
pub fn endpoint_dominance_check(
    a2: f64,
    b2: f64,
    c2: f64,
    q: f64,
    r: f64,
    samples: usize,
) -> Result<bool> {
    let interval = p_interval(a2, b2, c2, q, r)?;
    match interval.kind {
        IntervalKind::Empty => return Err(Error::EmptyInterval),
        IntervalKind::Point => return Ok(true),
        IntervalKind::Interval | IntervalKind::FullSegment => {}
    }
    let xi_at = |p: f64| xi_quartic(&gram_at_p(a2, b2, c2, q, r, p));
    let floor = xi_at(interval.lo).min(xi_at(interval.hi));
    let scale = 1f64.max(a2).max(b2).max(c2);
    let slack = DEFAULT_TOL * scale.powi(4);
    let width = interval.hi - interval.lo;
    Ok((1..=samples).all(|i| {
        let p = interval.lo + width * i as f64 / (samples + 1) as f64;
        xi_at(p) >= floor - slack
    }))
}

// ---------------------------------------------------------------------------
// Equality classification
// ---------------------------------------------------------------------------

/// Linear-dependence witnesses for the equality cases of the strong
/// inequality.
///
/// A case matches when its target vector lies in the span of the other two
/// (least-squares coefficients), its coefficient condition holds, and the
/// reduced right side `a²r + b²q − c²p + 2qr` is nonnegative. The last test
/// separates `L = R` from `L = −R`, which `ξ = L² − R²` cannot distinguish.
/// All matching cases are returned.
pub fn classify_equality(t: &VectorTriple, tol: f64) -> Vec<DependenceWitness> {
    let g = gram_from_vectors(t);
    let scale = g.scale();
    let r_bold = g.nsq_x * g.r + g.nsq_y * g.q - g.nsq_z * g.p + 2.0 * g.q * g.r;
    if r_bold < -tol * scale * scale {
        return Vec::new();
    }
    DependenceTag::ALL
        .into_iter()
        .filter_map(|tag| {
            let (target, u, w) = match tag {
                DependenceTag::CaseI => (t.z(), t.x(), t.y()),
                DependenceTag::CaseII => (t.x(), t.y(), t.z()),
                DependenceTag::CaseIII => (t.y(), t.x(), t.z()),
            };
            let w = fit_case(tag, target, u, w, scale, tol);
            (w.dependence_residual <= tol && w.condition_residual <= tol).then_some(w)
        })
        .collect()
}

fn fit_case(
    tag: DependenceTag,
    target: &[f64],
    u: &[f64],
    w: &[f64],
    scale: f64,
    tol: f64,
) -> DependenceWitness {
    let (uu, ww, uw) = (dot(u, u), dot(w, w), dot(u, w));
    let (ru, rw) = (dot(u, target), dot(w, target));
    let cond = |l: f64, m: f64| condition(tag, l, m, uu, ww, uw);

    // Eigen-decomposition of the 2x2 block [[uu, uw], [uw, ww]].
    let half_gap = 0.5 * (uu - ww);
    let radius = half_gap.hypot(uw);
    let mean = 0.5 * (uu + ww);
    let (e1, e2) = (mean + radius, mean - radius);
    let v1 = {
        let (cx, cy) = if uu >= ww {
            (e1 - ww, uw)
        } else {
            (uw, e1 - uu)
        };
        let n = cx.hypot(cy);
        if n == 0.0 {
            (1.0, 0.0)
        } else {
            (cx / n, cy / n)
        }
    };
    let threshold = tol * scale;

    let (lambda, mu) = if e1 <= threshold {
        (0.0, 0.0)
    } else if e2 <= threshold {
        // One-dimensional span: the coefficients form a line; pick the point
        // on it that zeroes the condition nearest the minimum-norm solution.
        let along = (v1.0 * ru + v1.1 * rw) / e1;
        let (l0, m0) = (along * v1.0, along * v1.1);
        let n2 = (-v1.1, v1.0);
        let at = |s: f64| cond(l0 + s * n2.0, m0 + s * n2.1);
        let (f0, fp, fm) = (at(0.0), at(1.0), at(-1.0));
        let (qa, qb) = (0.5 * (fp + fm) - f0, 0.5 * (fp - fm));
        let s = match quadratic_roots(qa, qb, f0) {
            Some([s1, s2]) => {
                if s1.abs() <= s2.abs() {
                    s1
                } else {
                    s2
                }
            }
            None if qa != 0.0 => -qb / (2.0 * qa),
            None => 0.0,
        };
        (l0 + s * n2.0, m0 + s * n2.1)
    } else {
        let det = uu * ww - uw * uw;
        ((ww * ru - uw * rw) / det, (uu * rw - uw * ru) / det)
    };

    let resid_sq: f64 = target
        .iter()
        .zip(u.iter().zip(w))
        .map(|(v, (a, b))| {
            let d = v - lambda * a - mu * b;
            d * d
        })
        .sum();
    DependenceWitness {
        case: DependenceCase::new(tag, lambda, mu),
        dependence_residual: resid_sq.sqrt() / scale.sqrt(),
        condition_residual: cond(lambda, mu).abs() / (scale * (1.0 + lambda * lambda + mu * mu)),
    }
}
