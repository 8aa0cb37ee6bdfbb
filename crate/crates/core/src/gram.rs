//! Gram-matrix data model for three vectors.
//!
//! A triple `(x, y, z)` is reduced to the six scalars of its symmetric Gram
//! matrix
//!
//! ```text
//!     | a²  p   q  |
//! G = | p   b²  r  |      a² = ‖x‖², p = ⟨x,y⟩, q = ⟨x,z⟩, r = ⟨y,z⟩
//!     | q   r   c² |
//! ```
//!
//! Every tolerance is relative: it is multiplied by `scale^k`, where
//! `scale = max(1, a², b², c²)` and `k` is the degree of the compared quantity
//! in the Gram entries.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Three real vectors of a common dimension `d >= 1` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriple")]
pub struct VectorTriple {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTriple {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl TryFrom<RawTriple> for VectorTriple {
    type Error = Error;

    fn try_from(raw: RawTriple) -> Result<Self> {
        Self::new(raw.x, raw.y, raw.z)
    }
}

impl VectorTriple {
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                x: x.len(),
                y: y.len(),
                z: z.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::EmptyVectors);
        }
        for (name, v) in [("x", &x), ("y", &y), ("z", &z)] {
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(Self { x, y, z })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Multiplies every vector by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let f = |v: &[f64]| v.iter().map(|c| c * s).collect();
        Self {
            x: f(&self.x),
            y: f(&self.y),
            z: f(&self.z),
        }
    }

    /// Applies a linear map given as a row-major `d x d` matrix to each vector.
    pub fn transformed(&self, m: &[f64]) -> Self {
        let d = self.dim();
        assert_eq!(m.len(), d * d, "transform must be d x d");
        let f = |v: &[f64]| {
            (0..d)
                .map(|i| (0..d).map(|j| m[i * d + j] * v[j]).sum())
                .collect()
        };
        Self {
            x: f(&self.x),
            y: f(&self.y),
            z: f(&self.z),
        }
    }
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub(crate) fn add(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

/// The six independent entries of a 3x3 Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramParams {
    pub nsq_x: f64,
    pub nsq_y: f64,
    pub nsq_z: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl GramParams {
    pub const fn new(nsq_x: f64, nsq_y: f64, nsq_z: f64, p: f64, q: f64, r: f64) -> Self {
        Self {
            nsq_x,
            nsq_y,
            nsq_z,
            p,
            q,
            r,
        }
    }

    /// `max(1, a², b², c²)`.
    pub fn scale(&self) -> f64 {
        1f64.max(self.nsq_x).max(self.nsq_y).max(self.nsq_z)
    }

    /// Norms `(a, b, c)`; negative squares (rounding) map to zero.
    pub fn norms(&self) -> (f64, f64, f64) {
        (
            self.nsq_x.max(0.0).sqrt(),
            self.nsq_y.max(0.0).sqrt(),
            self.nsq_z.max(0.0).sqrt(),
        )
    }

    pub fn trace(&self) -> f64 {
        self.nsq_x + self.nsq_y + self.nsq_z
    }

    /// `det G = a²b²c² + 2pqr - a²r² - b²q² - c²p²`.
    pub fn det(&self) -> f64 {
        let Self {
            nsq_x: a2,
            nsq_y: b2,
            nsq_z: c2,
            p,
            q,
            r,
        } = *self;
        a2 * b2 * c2 + 2.0 * p * q * r - a2 * r * r - b2 * q * q - c2 * p * p
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.nsq_x, self.p, self.q, //
            self.p, self.nsq_y, self.r, //
            self.q, self.r, self.nsq_z,
        )
    }

    /// Reads the upper triangle of a symmetric matrix.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self::new(
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 2)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 2)],
        )
    }

    /// Gram parameters of `s·x, s·y, s·z`.
    pub fn scaled(&self, s: f64) -> Self {
        let s2 = s * s;
        Self::new(
            self.nsq_x * s2,
            self.nsq_y * s2,
            self.nsq_z * s2,
            self.p * s2,
            self.q * s2,
            self.r * s2,
        )
    }

    /// Entries in the order `(a², b², c², p, q, r)`.
    pub fn to_array(&self) -> [f64; 6] {
        [self.nsq_x, self.nsq_y, self.nsq_z, self.p, self.q, self.r]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn gram_from_vectors(t: &VectorTriple) -> GramParams {
    GramParams::new(
        dot(&t.x, &t.x),
        dot(&t.y, &t.y),
        dot(&t.z, &t.z),
        dot(&t.x, &t.y),
        dot(&t.x, &t.z),
        dot(&t.y, &t.z),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    /// `a²b² - p²`, `a²c² - q²`, `b²c² - r²`.
    pub minors_2x2: [f64; 3],
    pub det: f64,
    pub is_psd: bool,
    pub rank_estimate: u8,
}

/// Principal-minor test of positive semidefiniteness.
///
/// `rank_estimate` is computed separately from the eigenvalues of the
/// assembled matrix; eigenvalues above `tol·scale` count.
pub fn psd_check(g: &GramParams, tol: f64) -> PsdReport {
    let scale = g.scale();
    let minors_2x2 = [
        g.nsq_x * g.nsq_y - g.p * g.p,
        g.nsq_x * g.nsq_z - g.q * g.q,
        g.nsq_y * g.nsq_z - g.r * g.r,
    ];
    let det = g.det();
    let diag_ok = [g.nsq_x, g.nsq_y, g.nsq_z]
        .iter()
        .all(|&d| d >= -tol * scale);
    let minors_ok = minors_2x2.iter().all(|&m| m >= -tol * scale * scale);
    let det_ok = det >= -tol * scale.powi(3);

    let rank_estimate = sorted_eigen(g)
        .0
        .iter()
        .filter(|&&ev| ev > tol * scale)
        .count() as u8;

    PsdReport {
        minors_2x2,
        det,
        is_psd: diag_ok && minors_ok && det_ok,
        rank_estimate,
    }
}

/// Eigenvalues in descending order with matching eigenvector columns.
pub(crate) fn sorted_eigen(g: &GramParams) -> ([f64; 3], Matrix3<f64>) {
    let eig = SymmetricEigen::new(g.matrix());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.map(|i| eig.eigenvalues[i]);
    let mut vectors = Matrix3::zeros();
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Factors a PSD Gram matrix into three vectors of dimension 3.
///
/// With `G = V Λ Vᵀ` (eigenvalues descending), the vectors are the columns
/// of `Λ^{1/2} Vᵀ`. Eigenvalues at or below `tol·scale` are dropped, so a
/// rank-`k` input yields vectors supported on the first `k` coordinates.
pub fn realize_vectors(g: &GramParams, tol: f64) -> Result<VectorTriple> {
    let report = psd_check(g, tol);
    if !report.is_psd {
        return Err(Error::NotPsd {
            det: report.det,
            min_minor: report
                .minors_2x2
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min),
        });
    }
    let threshold = tol * g.scale();
    let (values, vectors) = sorted_eigen(g);
    let root = values.map(|ev| if ev > threshold { ev.sqrt() } else { 0.0 });

    // Vector i has coordinate k equal to sqrt(λ_k)·V[i, k].
    let column = |i: usize| -> Vec<f64> { (0..3).map(|k| root[k] * vectors[(i, k)]).collect() };
    VectorTriple::new(column(0), column(1), column(2))
}
