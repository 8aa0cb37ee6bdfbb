//! Deterministic sampling of Gram matrices.
//!
//! Each sample index owns an independent ChaCha stream derived from
//! `(seed, index)`, so a run can be split across workers by index range
//! without changing its output.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{gram_from_vectors, GramParams, VectorTriple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Strategy {
    /// Three vectors with independent coordinates in dimension `d`.
    AmbientVectors(usize),
    /// Columns of a random 3x3 matrix `B`, so `G = BᵀB`.
    Factor3x3,
    /// Vectors in dimension 2 (`det G = 0`).
    BoundaryRank2,
    /// Vectors in dimension 1 (rank at most 1).
    BoundaryRank1,
}

impl Strategy {
    /// Coordinate dimension of the drawn vectors.
    pub fn dim(&self) -> usize {
        match *self {
            Strategy::AmbientVectors(d) => d,
            Strategy::Factor3x3 => 3,
            Strategy::BoundaryRank2 => 2,
            Strategy::BoundaryRank1 => 1,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::AmbientVectors(d) => write!(f, "ambient-vectors({d})"),
            Strategy::Factor3x3 => f.write_str("factor-3x3"),
            Strategy::BoundaryRank2 => f.write_str("boundary-rank2"),
            Strategy::BoundaryRank1 => f.write_str("boundary-rank1"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "factor-3x3" => return Ok(Strategy::Factor3x3),
            "boundary-rank2" => return Ok(Strategy::BoundaryRank2),
            "boundary-rank1" => return Ok(Strategy::BoundaryRank1),
            _ => {}
        }
        let dim = s
            .strip_prefix("ambient-vectors(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|d| d.trim().parse::<usize>().ok())
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown strategy {s:?}; expected ambient-vectors(<d>), factor-3x3, boundary-rank2 or boundary-rank1"
                ))
            })?;
        if dim == 0 {
            return Err(Error::InvalidConfig(
                "ambient-vectors dimension must be >= 1".into(),
            ));
        }
        Ok(Strategy::AmbientVectors(dim))
    }
}

impl TryFrom<String> for Strategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> Self {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleLaw {
    /// Standard normal coordinates.
    #[default]
    Normal,
    /// Standard normal coordinates, each vector multiplied by `exp(N(0,1))`.
    HeavyTail,
}

impl FromStr for ScaleLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "normal" => Ok(ScaleLaw::Normal),
            "heavy-tail" => Ok(ScaleLaw::HeavyTail),
            other => Err(Error::InvalidConfig(format!(
                "unknown scale law {other:?}; expected normal or heavy-tail"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub strategy: Strategy,
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub scale_law: ScaleLaw,
}

impl SampleConfig {
    pub fn new(strategy: Strategy, count: usize, seed: u64) -> Self {
        Self {
            strategy,
            count,
            seed,
            scale_law: ScaleLaw::Normal,
        }
    }

    pub fn with_scale_law(mut self, law: ScaleLaw) -> Self {
        self.scale_law = law;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("sample count must be >= 1".into()));
        }
        if self.strategy.dim() == 0 {
            return Err(Error::InvalidConfig(
                "ambient-vectors dimension must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for item `index` of the stream identified by `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(splitmix64(seed) ^ index))
}

pub(crate) fn normal_vec<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Draws the triple at position `index` of the stream.
pub fn draw_triple(strategy: Strategy, law: ScaleLaw, seed: u64, index: u64) -> VectorTriple {
    let mut rng = stream_rng(seed, index);
    let d = strategy.dim();
    let draw = |rng: &mut ChaCha8Rng| {
        let mut v = normal_vec(rng, d);
        if law == ScaleLaw::HeavyTail {
            let s = rng.sample::<f64, _>(StandardNormal).exp();
            v.iter_mut().for_each(|c| *c *= s);
        }
        v
    };
    // Factor3x3 draws B row by row; its columns are the vectors.
    let (x, y, z) = match strategy {
        Strategy::Factor3x3 => {
            let rows: Vec<Vec<f64>> = (0..3).map(|_| draw(&mut rng)).collect();
            let col = |j: usize| rows.iter().map(|row| row[j]).collect::<Vec<_>>();
            (col(0), col(1), col(2))
        }
        _ => (draw(&mut rng), draw(&mut rng), draw(&mut rng)),
    };
    VectorTriple::new(x, y, z).expect("sampled coordinates are finite and share a dimension")
}

/// Stream of sampled triples.
pub fn sample_triples(cfg: &SampleConfig) -> Result<impl Iterator<Item = VectorTriple>> {
    cfg.validate()?;
    let cfg = *cfg;
    Ok((0..cfg.count as u64).map(move |i| draw_triple(cfg.strategy, cfg.scale_law, cfg.seed, i)))
}

/// Stream of sampled Gram parameters.
pub fn sample_gram(cfg: &SampleConfig) -> Result<impl Iterator<Item = GramParams>> {
    Ok(sample_triples(cfg)?.map(|t| gram_from_vectors(&t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::{psd_check, DEFAULT_TOL};

    #[test]
    fn strategy_round_trips_through_strings() {
        for s in [
            Strategy::AmbientVectors(5),
            Strategy::Factor3x3,
            Strategy::BoundaryRank2,
            Strategy::BoundaryRank1,
        ] {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert!("ambient-vectors(0)".parse::<Strategy>().is_err());
        assert!("simplex".parse::<Strategy>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SampleConfig::new(Strategy::Factor3x3, 0, 1)
            .validate()
            .is_err());
        assert!(SampleConfig::new(Strategy::AmbientVectors(0), 3, 1)
            .validate()
            .is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SampleConfig::new(Strategy::AmbientVectors(4), 50, 9);
        let a: Vec<_> = sample_gram(&cfg).unwrap().collect();
        let b: Vec<_> = sample_gram(&cfg).unwrap().collect();
        assert_eq!(a, b);
        let c: Vec<_> = sample_gram(&SampleConfig { seed: 10, ..cfg })
            .unwrap()
            .collect();
        assert_ne!(a, c);
    }

    #[test]
    fn partitioned_stream_matches() {
        let cfg = SampleConfig::new(Strategy::Factor3x3, 20, 3);
        let whole: Vec<_> = sample_triples(&cfg).unwrap().collect();
        let tail: Vec<_> = (10..20)
            .map(|i| draw_triple(cfg.strategy, cfg.scale_law, cfg.seed, i))
            .collect();
        assert_eq!(&whole[10..], &tail[..]);
    }

    #[test]
    fn dimension_one_is_collinear() {
        let cfg = SampleConfig::new(Strategy::AmbientVectors(1), 1000, 5);
        for g in sample_gram(&cfg).unwrap() {
            let (a, b, c) = g.norms();
            let s = g.scale();
            assert!((g.p.abs() - a * b).abs() <= 1e-12 * s);
            assert!((g.q.abs() - a * c).abs() <= 1e-12 * s);
            assert!((g.r.abs() - b * c).abs() <= 1e-12 * s);
        }
    }

    #[test]
    fn boundary_rank2_is_singular() {
        for law in [ScaleLaw::Normal, ScaleLaw::HeavyTail] {
            let cfg = SampleConfig::new(Strategy::BoundaryRank2, 2000, 11).with_scale_law(law);
            for g in sample_gram(&cfg).unwrap() {
                assert!(g.det().abs() <= DEFAULT_TOL * g.scale().powi(3), "{g:?}");
            }
        }
    }

    #[test]
    fn factor_samples_are_psd() {
        let cfg = SampleConfig::new(Strategy::Factor3x3, 10_000, 17);
        assert!(sample_gram(&cfg)
            .unwrap()
            .all(|g| psd_check(&g, DEFAULT_TOL).is_psd));
    }
}
