//! Signed slacks (left side minus right side) of the inequalities.
//!
//! Vector-side evaluators work on a [`VectorTriple`]; Gram-side evaluators
//! work on [`GramParams`]. Each inequality has a homogeneity degree used to
//! scale tolerances: a slack counts as an equality when
//! `|slack| <= tol * scale^degree`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{add, dot, gram_from_vectors, norm, GramParams, VectorTriple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    ClassicalHlawka,
    StrongHlawka,
    ReducedScalar,
    XiQuartic,
    GramQuadraticQ,
    SubstitutedR,
    CorollaryPos,
    CorollaryNeg,
    GramDetIdentity,
    CauchySchwarz,
}

impl InequalityId {
    pub const ALL: [InequalityId; 10] = [
        InequalityId::ClassicalHlawka,
        InequalityId::StrongHlawka,
        InequalityId::ReducedScalar,
        InequalityId::XiQuartic,
        InequalityId::GramQuadraticQ,
        InequalityId::SubstitutedR,
        InequalityId::CorollaryPos,
        InequalityId::CorollaryNeg,
        InequalityId::GramDetIdentity,
        InequalityId::CauchySchwarz,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InequalityId::ClassicalHlawka => "classical_hlawka",
            InequalityId::StrongHlawka => "strong_hlawka",
            InequalityId::ReducedScalar => "reduced_scalar",
            InequalityId::XiQuartic => "xi_quartic",
            InequalityId::GramQuadraticQ => "gram_quadratic_q",
            InequalityId::SubstitutedR => "substituted_r",
            InequalityId::CorollaryPos => "corollary_pos",
            InequalityId::CorollaryNeg => "corollary_neg",
            InequalityId::GramDetIdentity => "gram_det_identity",
            InequalityId::CauchySchwarz => "cauchy_schwarz",
        }
    }

    /// Exponent applied to `scale` when scaling tolerances.
    pub fn degree(&self) -> i32 {
        match self {
            InequalityId::ClassicalHlawka | InequalityId::GramQuadraticQ => 1,
            InequalityId::StrongHlawka | InequalityId::ReducedScalar => 2,
            InequalityId::XiQuartic => 4,
            InequalityId::SubstitutedR
            | InequalityId::CorollaryPos
            | InequalityId::CorollaryNeg
            | InequalityId::GramDetIdentity
            | InequalityId::CauchySchwarz => 3,
        }
    }

    /// The `scale` an evaluation of this inequality at `g` is measured
    /// against. The Cauchy-Schwarz check only involves `x` and `y`.
    pub fn scale_of(&self, g: &GramParams) -> f64 {
        match self {
            InequalityId::CauchySchwarz => 1f64.max(g.nsq_x).max(g.nsq_y),
            _ => g.scale(),
        }
    }

    /// Absolute tolerance `tol * scale^degree`.
    pub fn tolerance(&self, scale: f64, tol: f64) -> f64 {
        tol * scale.powi(self.degree())
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .into_iter()
            .find(|id| id.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = InequalityId::ALL.iter().map(|id| id.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown inequality {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    pub inequality_id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub is_equality: bool,
}

impl SlackReport {
    pub fn new(id: InequalityId, lhs: f64, rhs: f64, scale: f64, tol: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            inequality_id: id,
            lhs,
            rhs,
            slack,
            is_equality: slack.abs() <= id.tolerance(scale, tol),
        }
    }

    /// `slack / scale^degree`.
    pub fn scaled_slack(&self, scale: f64) -> f64 {
        self.slack / scale.powi(self.inequality_id.degree())
    }
}

/// Reduced scalar sides: `L = abc·‖x+y+z‖` and `R = a²r + b²q − c²p + 2qr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedForms {
    pub l_bold: f64,
    pub r_bold: f64,
    /// `L² − R²`.
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl WeightTriple {
    pub const ONES: WeightTriple = WeightTriple::new(1.0, 1.0, 1.0);

    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn norm_sq(&self) -> f64 {
        self.alpha * self.alpha + self.beta * self.beta + self.gamma * self.gamma
    }
}

/// Minor-based PSD test shared by the evaluators that require it.
pub(crate) fn require_psd(g: &GramParams, tol: f64) -> Result<()> {
    let s = g.scale();
    let minors = [
        g.nsq_x * g.nsq_y - g.p * g.p,
        g.nsq_x * g.nsq_z - g.q * g.q,
        g.nsq_y * g.nsq_z - g.r * g.r,
    ];
    let det = g.det();
    let ok = [g.nsq_x, g.nsq_y, g.nsq_z].iter().all(|&d| d >= -tol * s)
        && minors.iter().all(|&m| m >= -tol * s * s)
        && det >= -tol * s.powi(3);
    if ok {
        Ok(())
    } else {
        Err(Error::NotPsd {
            det,
            min_minor: minors.into_iter().fold(f64::INFINITY, f64::min),
        })
    }
}

fn sqrt_clamped(v: f64) -> f64 {
    v.max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// Vector side
// ---------------------------------------------------------------------------

/// `‖x‖+‖y‖+‖z‖+‖x+y+z‖ − (‖x+y‖+‖x+z‖+‖y+z‖)`.
pub fn classical_hlawka_slack(t: &VectorTriple, tol: f64) -> SlackReport {
    let (x, y, z) = (t.x(), t.y(), t.z());
    let xy = add(x, y);
    let xyz = add(&xy, z);
    let lhs = norm(x) + norm(y) + norm(z) + norm(&xyz);
    let rhs = norm(&xy) + norm(&add(x, z)) + norm(&add(y, z));
    let scale = gram_from_vectors(t).scale();
    SlackReport::new(InequalityId::ClassicalHlawka, lhs, rhs, scale, tol)
}

/// `‖x‖‖y‖ + ‖z‖‖x+y+z‖ − ‖x+z‖‖y+z‖`.
pub fn strong_hlawka_slack(t: &VectorTriple, tol: f64) -> SlackReport {
    let (x, y, z) = (t.x(), t.y(), t.z());
    let xyz = add(&add(x, y), z);
    let lhs = norm(x) * norm(y) + norm(z) * norm(&xyz);
    let rhs = norm(&add(x, z)) * norm(&add(y, z));
    let scale = gram_from_vectors(t).scale();
    SlackReport::new(InequalityId::StrongHlawka, lhs, rhs, scale, tol)
}

/// The three cyclic strong-type terms whose sum is half the difference of
/// the squared sides of the classical inequality:
///
/// ```text
/// ‖x‖‖y‖ + ‖z‖‖s‖ − ‖y+z‖‖z+x‖
/// ‖y‖‖z‖ + ‖x‖‖s‖ − ‖z+x‖‖x+y‖
/// ‖x‖‖z‖ + ‖y‖‖s‖ − ‖x+y‖‖y+z‖      (s = x+y+z)
/// ```
pub fn cyclic_strong_decomposition(t: &VectorTriple) -> [f64; 3] {
    let (x, y, z) = (t.x(), t.y(), t.z());
    let (nx, ny, nz) = (norm(x), norm(y), norm(z));
    let ns = norm(&add(&add(x, y), z));
    let nxy = norm(&add(x, y));
    let nyz = norm(&add(y, z));
    let nzx = norm(&add(z, x));
    [
        nx * ny + nz * ns - nyz * nzx,
        ny * nz + nx * ns - nzx * nxy,
        nx * nz + ny * ns - nxy * nyz,
    ]
}

/// `‖x‖²‖y‖⁴ − ⟨x,y⟩²‖y‖²`, obtained from the corollary at `z = y`.
pub fn cauchy_schwarz_slack(x: &[f64], y: &[f64], tol: f64) -> Result<SlackReport> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            x: x.len(),
            y: y.len(),
            z: y.len(),
        });
    }
    let g = GramParams::new(
        dot(x, x),
        dot(y, y),
        dot(y, y),
        dot(x, y),
        dot(x, y),
        dot(y, y),
    );
    Ok(cauchy_schwarz_from_gram(&g, tol))
}

fn cauchy_schwarz_from_gram(g: &GramParams, tol: f64) -> SlackReport {
    let (a2, b2, p) = (g.nsq_x, g.nsq_y, g.p);
    // Corollary sides for (x, y, y): D = p²b² >= 0.
    let lhs = a2 * b2 * b2 + 2.0 * b2 * p * p;
    let rhs = 3.0 * p * p * b2;
    let scale = InequalityId::CauchySchwarz.scale_of(g);
    SlackReport::new(InequalityId::CauchySchwarz, lhs, rhs, scale, tol)
}

// ---------------------------------------------------------------------------
// Gram side
// ---------------------------------------------------------------------------

/// Reduced sides `L`, `R` and `ξ = L² − R²`.
///
/// A radicand `‖x+y+z‖²` in `[−tol·scale, 0)` is clamped to zero.
pub fn reduced_forms(g: &GramParams, tol: f64) -> Result<ReducedForms> {
    require_psd(g, tol)?;
    let GramParams {
        nsq_x: a2,
        nsq_y: b2,
        nsq_z: c2,
        p,
        q,
        r,
    } = *g;
    let (a, b, c) = g.norms();
    let radicand = a2 + b2 + c2 + 2.0 * (p + q + r);
    if radicand < -tol * g.scale() {
        return Err(Error::NotPsd {
            det: g.det(),
            min_minor: radicand,
        });
    }
    let l_bold = a * b * c * sqrt_clamped(radicand);
    let r_bold = a2 * r + b2 * q - c2 * p + 2.0 * q * r;
    Ok(ReducedForms {
        l_bold,
        r_bold,
        xi: l_bold * l_bold - r_bold * r_bold,
    })
}

/// The two polynomial sides of `ξ`: `a²b²c²(a²+b²+c²+2p+2q+2r)` and the
/// expanded square of the reduced right side.
pub fn xi_sides(g: &GramParams) -> (f64, f64) {
    let GramParams {
        nsq_x: a2,
        nsq_y: b2,
        nsq_z: c2,
        p,
        q,
        r,
    } = *g;
    let lhs = a2 * b2 * c2 * (a2 + b2 + c2 + 2.0 * p + 2.0 * q + 2.0 * r);
    let rhs = a2 * a2 * r * r
        + b2 * b2 * q * q
        + c2 * c2 * p * p
        + 4.0 * q * q * r * r
        + 2.0 * a2 * b2 * q * r
        - 2.0 * a2 * c2 * p * r
        - 2.0 * b2 * c2 * p * q
        + 4.0 * a2 * q * r * r
        + 4.0 * b2 * r * q * q
        - 4.0 * c2 * p * q * r;
    (lhs, rhs)
}

/// The quartic `ξ(a², b², c², p, q, r)`, defined on all of parameter space.
pub fn xi_quartic(g: &GramParams) -> f64 {
    let (lhs, rhs) = xi_sides(g);
    lhs - rhs
}

/// `wᵀ G w = α²a² + β²b² + γ²c² + 2αβp + 2αγq + 2βγr`.
pub fn gram_quadratic_q(g: &GramParams, w: &WeightTriple) -> f64 {
    let WeightTriple { alpha, beta, gamma } = *w;
    alpha * alpha * g.nsq_x
        + beta * beta * g.nsq_y
        + gamma * gamma * g.nsq_z
        + 2.0 * alpha * beta * g.p
        + 2.0 * alpha * gamma * g.q
        + 2.0 * beta * gamma * g.r
}

/// `α²a²r² + β²b²q² + γ²c²p² + 2(αβ+αγ+βγ)pqr`, i.e. `Q(αr, βq, γp)`.
pub fn substituted_r(g: &GramParams, w: &WeightTriple) -> f64 {
    let WeightTriple { alpha, beta, gamma } = *w;
    let GramParams {
        nsq_x: a2,
        nsq_y: b2,
        nsq_z: c2,
        p,
        q,
        r,
    } = *g;
    alpha * alpha * a2 * r * r
        + beta * beta * b2 * q * q
        + gamma * gamma * c2 * p * p
        + 2.0 * (alpha * beta + alpha * gamma + beta * gamma) * p * q * r
}

/// `a²r² + b²q² + c²p²` against `3D` (`D > 0`), `−6D` (`D < 0`) or `0`
/// (`D = 0`, reported as `corollary_pos`), where `D = pqr`.
pub fn corollary_slack(g: &GramParams, tol: f64) -> Result<SlackReport> {
    require_psd(g, tol)?;
    let d = g.p * g.q * g.r;
    let lhs = g.nsq_x * g.r * g.r + g.nsq_y * g.q * g.q + g.nsq_z * g.p * g.p;
    let (id, rhs) = if d > 0.0 {
        (InequalityId::CorollaryPos, 3.0 * d)
    } else if d < 0.0 {
        (InequalityId::CorollaryNeg, -6.0 * d)
    } else {
        (InequalityId::CorollaryPos, 0.0)
    };
    Ok(SlackReport::new(id, lhs, rhs, g.scale(), tol))
}

/// `a²b²c² + 2pqr ≥ a²r² + b²q² + c²p²`; the slack is `det G`.
pub fn gram_det_identity_slack(g: &GramParams, tol: f64) -> SlackReport {
    let lhs = g.nsq_x * g.nsq_y * g.nsq_z + 2.0 * g.p * g.q * g.r;
    let rhs = g.nsq_x * g.r * g.r + g.nsq_y * g.q * g.q + g.nsq_z * g.p * g.p;
    SlackReport::new(InequalityId::GramDetIdentity, lhs, rhs, g.scale(), tol)
}

/// Evaluates any inequality from Gram parameters alone.
///
/// Norms of sums are recovered from the Gram entries; the quadratic forms use
/// weights `(1, 1, 1)`. Evaluators that require a PSD input report an error
/// otherwise. For `CorollaryPos` / `CorollaryNeg` the branch is picked by the
/// sign of `pqr`, so the returned id may differ from the requested one.
pub fn slack_from_gram(id: InequalityId, g: &GramParams, tol: f64) -> Result<SlackReport> {
    let scale = g.scale();
    let GramParams {
        nsq_x: a2,
        nsq_y: b2,
        nsq_z: c2,
        p,
        q,
        r,
    } = *g;
    let (a, b, c) = g.norms();
    let n_xy = sqrt_clamped(a2 + b2 + 2.0 * p);
    let n_xz = sqrt_clamped(a2 + c2 + 2.0 * q);
    let n_yz = sqrt_clamped(b2 + c2 + 2.0 * r);
    let n_xyz = sqrt_clamped(a2 + b2 + c2 + 2.0 * (p + q + r));
    let report = match id {
        InequalityId::ClassicalHlawka => {
            SlackReport::new(id, a + b + c + n_xyz, n_xy + n_xz + n_yz, scale, tol)
        }
        InequalityId::StrongHlawka => {
            SlackReport::new(id, a * b + c * n_xyz, n_xz * n_yz, scale, tol)
        }
        InequalityId::ReducedScalar => {
            let f = reduced_forms(g, tol)?;
            SlackReport::new(id, f.l_bold, f.r_bold, scale, tol)
        }
        InequalityId::XiQuartic => {
            let (lhs, rhs) = xi_sides(g);
            SlackReport::new(id, lhs, rhs, scale, tol)
        }
        InequalityId::GramQuadraticQ => SlackReport::new(
            id,
            gram_quadratic_q(g, &WeightTriple::ONES),
            0.0,
            scale,
            tol,
        ),
        InequalityId::SubstitutedR => {
            SlackReport::new(id, substituted_r(g, &WeightTriple::ONES), 0.0, scale, tol)
        }
        InequalityId::CorollaryPos | InequalityId::CorollaryNeg => corollary_slack(g, tol)?,
        InequalityId::GramDetIdentity => gram_det_identity_slack(g, tol),
        InequalityId::CauchySchwarz => cauchy_schwarz_from_gram(g, tol),
    };
    Ok(report)
}

/// Evaluates an inequality on a concrete triple, using the vector-side
/// evaluator where one exists.
pub fn slack_for_triple(id: InequalityId, t: &VectorTriple, tol: f64) -> Result<SlackReport> {
    match id {
        InequalityId::ClassicalHlawka => Ok(classical_hlawka_slack(t, tol)),
        InequalityId::StrongHlawka => Ok(strong_hlawka_slack(t, tol)),
        InequalityId::CauchySchwarz => cauchy_schwarz_slack(t.x(), t.y(), tol),
        _ => slack_from_gram(id, &gram_from_vectors(t), tol),
    }
}
