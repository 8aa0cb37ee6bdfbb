use thiserror::Error;

use crate::boundary::DependenceTag;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: x has {x}, y has {y}, z has {z} coordinates")]
    DimensionMismatch { x: usize, y: usize, z: usize },

    #[error("vectors must have at least one coordinate")]
    EmptyVectors,

    #[error("non-finite coordinate in vector {0}")]
    NonFinite(&'static str),

    #[error("Gram parameters are not positive semidefinite (det = {det:e}, min 2x2 minor = {min_minor:e})")]
    NotPsd { det: f64, min_minor: f64 },

    #[error("free parameters for {case} must be {expected}")]
    WrongFreeParameters {
        case: DependenceTag,
        expected: &'static str,
    },

    #[error("free 2x2 Gram block is not positive semidefinite (minor = {0:e})")]
    FreeBlockNotPsd(f64),

    #[error("|{name}| = {value} exceeds its Cauchy-Schwarz bound {bound}")]
    CauchySchwarzBound {
        name: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("no admissible value of p: the interval is empty")]
    EmptyInterval,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
