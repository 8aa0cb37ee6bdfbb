//! Verification and search engine for Hornich–Hlawka type inequalities in
//! real inner-product spaces.
//!
//! * [`gram`] and [`sampling`]: the Gram-matrix model of three vectors.
//! * [`inequalities`]: signed slacks of every inequality.
//! * [`boundary`]: dependence substitutions, factored forms of `ξ`, the
//!   admissible `p`-interval and the equality-case classifier.
//! * [`search`]: descent over the PSD cone.

pub mod boundary;
pub mod error;
pub mod gram;
pub mod inequalities;
pub mod sampling;
pub mod search;

pub use error::{Error, Result};
pub use gram::{
    gram_from_vectors, psd_check, realize_vectors, GramParams, PsdReport, VectorTriple, DEFAULT_TOL,
};
pub use inequalities::{InequalityId, SlackReport};
