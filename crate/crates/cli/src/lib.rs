//! Runners behind the `hlawka` binary. Each returns a serializable report;
//! the binary only parses flags, writes JSON and maps verdicts to exit codes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use hlawka_core::boundary::{
    classify_equality, factored_xi, substitute_dependence, tampered_factored_xi, DependenceCase,
    DependenceTag, DependenceWitness, PartialGram,
};
use hlawka_core::inequalities::{
    corollary_slack, gram_quadratic_q, slack_for_triple, slack_from_gram, strong_hlawka_slack,
    substituted_r, xi_quartic, InequalityId, SlackReport, WeightTriple,
};
use hlawka_core::sampling::{draw_triple, stream_rng, ScaleLaw, Strategy};
use hlawka_core::search::{
    find_equality_points, minimize_xi, EqualityPoint, SearchConfig, SearchResult,
};
use hlawka_core::{gram_from_vectors, GramParams, VectorTriple, DEFAULT_TOL};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Identity checks pass when every relative residual is at most this.
pub const IDENTITY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// Reads a JSON config file, or returns the defaults. Missing fields fall
/// back to their defaults.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
}

/// Writes `value` as pretty JSON to `out`, or to stdout.
pub fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub trials: usize,
    /// Dimension of the default `ambient-vectors` strategy.
    pub dimension: usize,
    pub seed: u64,
    pub tol: f64,
    /// Sample `i` uses `strategies[i % len]`. Empty means
    /// `ambient-vectors(dimension)`.
    pub strategies: Vec<Strategy>,
    /// Empty means all ten.
    pub inequalities: Vec<InequalityId>,
    pub scale_law: ScaleLaw,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            dimension: 3,
            seed: 42,
            tol: DEFAULT_TOL,
            strategies: Vec::new(),
            inequalities: Vec::new(),
            scale_law: ScaleLaw::Normal,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be >= 1");
        }
        if self.dimension == 0 {
            bail!("dimension must be >= 1");
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            bail!("tol must be > 0");
        }
        if self.strategies.contains(&Strategy::AmbientVectors(0)) {
            bail!("ambient-vectors dimension must be >= 1");
        }
        Ok(())
    }

    pub fn effective_strategies(&self) -> Vec<Strategy> {
        if self.strategies.is_empty() {
            vec![Strategy::AmbientVectors(self.dimension)]
        } else {
            self.strategies.clone()
        }
    }

    pub fn effective_inequalities(&self) -> Vec<InequalityId> {
        let ids = if self.inequalities.is_empty() {
            InequalityId::ALL.to_vec()
        } else {
            self.inequalities.clone()
        };
        let mut seen = Vec::new();
        for id in ids {
            if !seen.contains(&id) {
                seen.push(id);
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WorstInput {
    Vectors(VectorTriple),
    Gram(GramParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalitySummary {
    pub inequality_id: InequalityId,
    pub count: usize,
    /// Minimum of `slack / scale^degree`; absent when nothing was evaluated.
    pub min_slack: Option<f64>,
    pub equality_count: usize,
    /// Inputs the evaluator refused (not positive semidefinite).
    pub rejected: usize,
    pub worst_input: Option<WorstInput>,
}

impl InequalitySummary {
    fn new(id: InequalityId) -> Self {
        Self {
            inequality_id: id,
            count: 0,
            min_slack: None,
            equality_count: 0,
            rejected: 0,
            worst_input: None,
        }
    }

    fn record(&mut self, report: &SlackReport, scaled: f64, input: impl FnOnce() -> WorstInput) {
        self.count += 1;
        self.equality_count += report.is_equality as usize;
        if self.min_slack.is_none_or(|m| scaled < m) {
            self.min_slack = Some(scaled);
            self.worst_input = Some(input());
        }
    }

    fn passes(&self, tol: f64) -> bool {
        self.rejected == 0 && self.min_slack.is_none_or(|m| m >= -tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub scale_law: ScaleLaw,
    pub strategies: Vec<Strategy>,
    pub results: Vec<InequalitySummary>,
    pub elapsed_secs: f64,
    pub verdict: Verdict,
}

/// Gram point outside the PSD cone, used to exercise the failure path.
pub const NON_PSD_PROBE: GramParams = GramParams::new(1.0, 1.0, 1.0, 2.0, 0.0, 0.0);

/// Both corollary branches come from one evaluation; the branch is picked by
/// the sign of `pqr`.
fn evaluation_ids(ids: &[InequalityId]) -> Vec<InequalityId> {
    let mut out: Vec<InequalityId> = Vec::new();
    for &id in ids {
        let id = if id == InequalityId::CorollaryNeg {
            InequalityId::CorollaryPos
        } else {
            id
        };
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

pub fn run_verify(cfg: &SuiteConfig, inject: Option<GramParams>) -> Result<SuiteReport> {
    cfg.validate()?;
    let start = Instant::now();
    let strategies = cfg.effective_strategies();
    let ids = cfg.effective_inequalities();
    let evals = evaluation_ids(&ids);
    let mut acc: BTreeMap<InequalityId, InequalitySummary> = ids
        .iter()
        .map(|&id| (id, InequalitySummary::new(id)))
        .collect();

    for i in 0..cfg.trials as u64 {
        let strategy = strategies[(i % strategies.len() as u64) as usize];
        let t = draw_triple(strategy, cfg.scale_law, cfg.seed, i);
        let g = gram_from_vectors(&t);
        for &id in &evals {
            match slack_for_triple(id, &t, cfg.tol) {
                Ok(r) => {
                    if let Some(s) = acc.get_mut(&r.inequality_id) {
                        let scaled =
                            r.slack / r.inequality_id.scale_of(&g).powi(r.inequality_id.degree());
                        s.record(&r, scaled, || WorstInput::Vectors(t.clone()));
                    }
                }
                Err(_) => {
                    if let Some(s) = acc.get_mut(&id) {
                        s.rejected += 1;
                    }
                }
            }
        }
    }

    if let Some(g) = inject {
        for &id in &evals {
            match slack_from_gram(id, &g, cfg.tol) {
                Ok(r) => {
                    if let Some(s) = acc.get_mut(&r.inequality_id) {
                        let scaled =
                            r.slack / r.inequality_id.scale_of(&g).powi(r.inequality_id.degree());
                        s.record(&r, scaled, || WorstInput::Gram(g));
                    }
                }
                Err(_) => {
                    if let Some(s) = acc.get_mut(&id) {
                        s.rejected += 1;
                        s.worst_input = Some(WorstInput::Gram(g));
                    }
                }
            }
        }
    }

    let results: Vec<InequalitySummary> = ids
        .iter()
        .map(|id| acc.remove(id).expect("seeded above"))
        .collect();
    let verdict = Verdict::from_bool(results.iter().all(|s| s.passes(cfg.tol)));
    Ok(SuiteReport {
        seed: cfg.seed,
        trials: cfg.trials,
        tol: cfg.tol,
        scale_law: cfg.scale_law,
        strategies,
        results,
        elapsed_secs: start.elapsed().as_secs_f64(),
        verdict,
    })
}

// ---------------------------------------------------------------------------
// identities
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub count: usize,
    pub seed: u64,
    pub threshold: f64,
    pub identities: Vec<IdentityCheck>,
    pub elapsed_secs: f64,
    pub verdict: Verdict,
}

fn free_block(tag: DependenceTag, seed: u64, i: u64) -> PartialGram {
    let t = draw_triple(Strategy::AmbientVectors(2), ScaleLaw::Normal, seed, i);
    let g = gram_from_vectors(&t);
    PartialGram::for_case(tag, g.nsq_x, g.nsq_y, g.p)
}

/// Checks the three dependent-case factorizations of `ξ` and the `Q`/`R`
/// substitution identity on `count` random draws each. With `tamper` the
/// factorizations are checked against a sign-flipped factored form.
pub fn run_identities(count: usize, seed: u64, tamper: bool) -> Result<IdentityReport> {
    if count == 0 {
        bail!("count must be >= 1");
    }
    let start = Instant::now();
    let mut identities = Vec::new();

    for tag in DependenceTag::ALL {
        let mut worst: f64 = 0.0;
        for i in 0..count as u64 {
            let mut rng = stream_rng(seed ^ (0x1d << tag as u64), i);
            let lambda = rng.random_range(-3.0..3.0);
            let mu = rng.random_range(-3.0..3.0);
            let case = DependenceCase::new(tag, lambda, mu);
            let free = free_block(tag, seed.wrapping_add(1), i);
            let g = substitute_dependence(&case, &free)?;
            let factored = if tamper {
                tampered_factored_xi(&case, &free)?
            } else {
                factored_xi(&case, &free)?
            };
            worst = worst.max((xi_quartic(&g) - factored).abs() / g.scale().powi(4));
        }
        identities.push(IdentityCheck {
            name: format!("xi_factorization_{tag}"),
            max_residual: worst,
            pass: worst <= IDENTITY_THRESHOLD,
        });
    }

    let mut worst: f64 = 0.0;
    for i in 0..count as u64 {
        let t = draw_triple(
            Strategy::AmbientVectors(3),
            ScaleLaw::HeavyTail,
            seed.wrapping_add(2),
            i,
        );
        let g = gram_from_vectors(&t);
        let mut rng = stream_rng(seed.wrapping_add(3), i);
        let w = WeightTriple::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        let direct = substituted_r(&g, &w);
        let via_q = gram_quadratic_q(
            &g,
            &WeightTriple::new(w.alpha * g.r, w.beta * g.q, w.gamma * g.p),
        );
        worst = worst.max((direct - via_q).abs() / ((1.0 + w.norm_sq()) * g.scale().powi(3)));
    }
    identities.push(IdentityCheck {
        name: "substituted_r_equals_gram_quadratic_q".into(),
        max_residual: worst,
        pass: worst <= IDENTITY_THRESHOLD,
    });

    let verdict = Verdict::from_bool(identities.iter().all(|c| c.pass));
    Ok(IdentityReport {
        count,
        seed,
        threshold: IDENTITY_THRESHOLD,
        identities,
        elapsed_secs: start.elapsed().as_secs_f64(),
        verdict,
    })
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SearchOutput {
    Minimum(SearchResult),
    Equality {
        objective: InequalityId,
        points: Vec<EqualityPoint>,
    },
}

pub fn run_search(cfg: &SearchConfig, equality: bool) -> Result<SearchOutput> {
    if equality {
        Ok(SearchOutput::Equality {
            objective: cfg.objective,
            points: find_equality_points(cfg.objective, cfg)?,
        })
    } else {
        Ok(SearchOutput::Minimum(minimize_xi(cfg)?))
    }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub input: VectorTriple,
    pub slack: SlackReport,
    pub witnesses: Vec<DependenceWitness>,
}

pub fn classify_file(path: &Path, tol: f64) -> Result<ClassifyReport> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let input: VectorTriple = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a vector triple", path.display()))?;
    Ok(ClassifyReport {
        slack: strong_hlawka_slack(&input, tol),
        witnesses: classify_equality(&input, tol),
        input,
    })
}

// ---------------------------------------------------------------------------
// witness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessName {
    Ones,
    Planar120,
}

impl WitnessName {
    pub const ALL: [WitnessName; 2] = [WitnessName::Ones, WitnessName::Planar120];

    pub fn name(self) -> &'static str {
        match self {
            WitnessName::Ones => "ones",
            WitnessName::Planar120 => "planar120",
        }
    }

    pub fn triple(self) -> VectorTriple {
        let e1 = vec![1.0, 0.0, 0.0];
        match self {
            WitnessName::Ones => VectorTriple::new(e1.clone(), e1.clone(), e1).unwrap(),
            WitnessName::Planar120 => {
                let h = 3f64.sqrt() / 2.0;
                VectorTriple::new(e1, vec![0.5, h, 0.0], vec![0.5, -h, 0.0]).unwrap()
            }
        }
    }
}

impl FromStr for WitnessName {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        WitnessName::ALL
            .into_iter()
            .find(|w| w.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = WitnessName::ALL.iter().map(|w| w.name()).collect();
                anyhow::anyhow!("unknown witness {s:?}; valid names: {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub name: WitnessName,
    pub triple: VectorTriple,
    pub gram: GramParams,
    /// The corollary branch for the witness, then `R(1,1,1)`.
    pub reports: Vec<SlackReport>,
}

pub fn witness_report(name: WitnessName) -> Result<WitnessReport> {
    let triple = name.triple();
    let gram = gram_from_vectors(&triple);
    let reports = vec![
        corollary_slack(&gram, DEFAULT_TOL)?,
        slack_from_gram(InequalityId::SubstitutedR, &gram, DEFAULT_TOL)?,
    ];
    Ok(WitnessReport {
        name,
        triple,
        gram,
        reports,
    })
}
