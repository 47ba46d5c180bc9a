//! Heuristic minimisation of the objectives over `d`, `phi`, `k` and `alpha`.
//!
//! Searching runs in floats. The reported point is rounded to six significant
//! digits and its value re-derived in exact or interval arithmetic.

pub mod objective;
pub mod strategy;
pub mod tables;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::DegreePattern;
use crate::reduction::{reduce, ReducedSystem};
use crate::scalar::{format_rational, parse_rational, rational_from_f64, rationalize, Field, Interval, Regime};
use crate::weights::WeightSequence;
pub use objective::{objective, objectives, Objective, ObjectiveError};
pub use strategy::{strategies, strategy, DSpace, Evaluator, Found, SearchStrategy};

/// Significant digits kept in reported `d` values.
pub const REPORT_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("no admissible system: every visited (alpha, k, phi) was singular or invalid")]
    NoAdmissibleSystem,
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("unknown objective {0:?}")]
    UnknownObjective(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}

/// A single value, a list, or an inclusive range of integers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntSet {
    One(u64),
    List(Vec<u64>),
    Range { from: u64, to: u64 },
}

impl IntSet {
    pub fn values(&self) -> Vec<u64> {
        match self {
            IntSet::One(v) => vec![*v],
            IntSet::List(v) => v.clone(),
            IntSet::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

/// An exponent written as a number or as a rational string such as `"-33/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaValue {
    Text(String),
    Number(f64),
}

impl AlphaValue {
    pub fn rational(&self) -> Result<BigRational, SearchError> {
        match self {
            AlphaValue::Text(s) => parse_rational(s).map_err(|e| SearchError::Config(e.to_string())),
            AlphaValue::Number(x) => rational_from_f64(*x).map_err(|e| SearchError::Config(e.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSet {
    One(AlphaValue),
    List(Vec<AlphaValue>),
}

impl AlphaSet {
    pub fn values(&self) -> Result<Vec<BigRational>, SearchError> {
        match self {
            AlphaSet::One(a) => Ok(vec![a.rational()?]),
            AlphaSet::List(v) => v.iter().map(AlphaValue::rational).collect(),
        }
    }
}

fn default_k() -> IntSet {
    IntSet::One(6)
}

fn default_phi() -> IntSet {
    IntSet::One(0)
}

fn default_strategy() -> String {
    "coordinate-descent".into()
}

fn default_target() -> String {
    "b1".into()
}

fn default_threshold() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub alpha: AlphaSet,
    #[serde(default = "default_k")]
    pub k: IntSet,
    #[serde(default = "default_phi")]
    pub phi2: IntSet,
    #[serde(default = "default_phi")]
    pub phi3: IntSet,
    #[serde(default)]
    pub d: DSpace,
    #[serde(default = "default_strategy")]
    pub strategy: String,
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Replaces the grid start of the refining strategies.
    #[serde(default)]
    pub start: Option<[f64; 3]>,
    /// Keep the best value of every visited system.
    #[serde(default)]
    pub trace: bool,
}

impl SearchConfig {
    pub fn new(alpha: BigRational, k: u64) -> Self {
        SearchConfig {
            alpha: AlphaSet::One(AlphaValue::Text(format_rational(&alpha))),
            k: IntSet::One(k),
            phi2: default_phi(),
            phi3: default_phi(),
            d: DSpace::default(),
            strategy: default_strategy(),
            target: default_target(),
            threshold: default_threshold(),
            start: None,
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        self.d.validate().map_err(SearchError::Config)?;
        if self.threshold.is_nan() || self.threshold <= 0.0 {
            return Err(SearchError::Config(format!("threshold must be positive, got {}", self.threshold)));
        }
        for (name, set) in [("k", &self.k), ("phi2", &self.phi2), ("phi3", &self.phi3)] {
            if set.values().is_empty() {
                return Err(SearchError::Config(format!("{name} set is empty")));
            }
        }
        if self.alpha.values()?.is_empty() {
            return Err(SearchError::Config("alpha set is empty".into()));
        }
        if let Some(start) = self.start {
            if start.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(SearchError::Config("start values must be positive".into()));
            }
        }
        strategy(&self.strategy).ok_or_else(|| SearchError::UnknownStrategy(self.strategy.clone()))?;
        objective(&self.target).ok_or_else(|| SearchError::UnknownObjective(self.target.clone()))?;
        Ok(())
    }
}

/// One weight exponent and degree pattern.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemKey {
    pub alpha: String,
    pub k: u64,
    pub phi2: u64,
    pub phi3: u64,
}

impl SystemKey {
    pub fn pattern(&self) -> Result<DegreePattern, SearchError> {
        DegreePattern::searchable(self.k, self.phi2, self.phi3).map_err(|e| SearchError::Config(e.to_string()))
    }

    pub fn weights(&self) -> Result<WeightSequence, SearchError> {
        let alpha = parse_rational(&self.alpha).map_err(|e| SearchError::Config(e.to_string()))?;
        Ok(WeightSequence::dirichlet(alpha))
    }
}

/// The objective at one rational point, in floats and rigorously.
#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub float: f64,
    pub regime: Regime,
    /// Exact value as `p/q`, or the enclosure as `[lo, hi]`.
    pub certified: serde_json::Value,
    pub lo: f64,
    pub hi: f64,
    #[serde(skip)]
    pub exact: Option<BigRational>,
}

impl Evaluation {
    /// `Some(true)` when certainly below `threshold`, `None` if undecided.
    pub fn below(&self, threshold: f64) -> Option<bool> {
        if let Some(v) = &self.exact {
            let t = rational_from_f64(threshold).ok()?;
            return Some(*v < t);
        }
        if self.hi < threshold {
            Some(true)
        } else if self.lo >= threshold {
            Some(false)
        } else {
            None
        }
    }
}

/// Evaluates `objective` at `d = (1, d_1, d_2, d_3)` in the natural regime.
pub fn evaluate_point(
    key: &SystemKey,
    d: &[BigRational; 3],
    objective: &dyn Objective,
) -> Result<Evaluation, SearchError> {
    let pattern = key.pattern()?;
    let seq = key.weights()?;
    let err = |e: String| SearchError::Evaluation(e);
    let one = BigRational::from_integer(1.into());
    let full = [one, d[0].clone(), d[1].clone(), d[2].clone()];
    let rs_f: ReducedSystem<f64> = reduce(&seq, &pattern).map_err(|e| err(e.to_string()))?;
    let float = objective
        .float(&rs_f, &full.clone().map(|q| f64::from_rational(&q)))
        .map_err(|e| err(e.to_string()))?;
    match seq.natural_regime() {
        Regime::Rational => {
            let rs: ReducedSystem<BigRational> = reduce(&seq, &pattern).map_err(|e| err(e.to_string()))?;
            let v = objective.rational(&rs, &full).map_err(|e| err(e.to_string()))?;
            let enclosure = Interval::enclose(&v);
            Ok(Evaluation {
                float,
                regime: Regime::Rational,
                certified: serde_json::Value::String(format_rational(&v)),
                lo: enclosure.lo(),
                hi: enclosure.hi(),
                exact: Some(v),
            })
        }
        _ => {
            let rs: ReducedSystem<Interval> = reduce(&seq, &pattern).map_err(|e| err(e.to_string()))?;
            let v = objective
                .interval(&rs, &full.clone().map(|q| Interval::enclose(&q)))
                .map_err(|e| err(e.to_string()))?;
            Ok(Evaluation {
                float,
                regime: Regime::Interval,
                certified: v.to_json(),
                lo: v.lo(),
                hi: v.hi(),
                exact: None,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub system: SystemKey,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub system: SystemKey,
    pub gamma: [u64; 6],
    /// `(d_1, d_2, d_3)` rounded for reporting; `d_0 = 1`.
    pub d: [String; 3],
    /// Float objective at the rounded `d`.
    pub value: f64,
    pub evaluation: Evaluation,
    pub below_threshold: Option<bool>,
    pub evaluations: u64,
    pub systems: usize,
    pub skipped: usize,
    pub strategy: String,
    pub target: String,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEntry>,
}

impl SearchResult {
    pub fn d_rational(&self) -> [BigRational; 3] {
        self.d.clone().map(|s| parse_rational(&s).unwrap_or_default())
    }
}

struct SystemOutcome {
    key: SystemKey,
    found: Option<Found>,
    evaluations: u64,
}

fn search_system(
    key: SystemKey,
    config: &SearchConfig,
    objective: &dyn Objective,
    strategy: &dyn SearchStrategy,
) -> SystemOutcome {
    let run = || -> Option<(Found, u64)> {
        let pattern = key.pattern().ok()?;
        let seq = key.weights().ok()?;
        let rs: ReducedSystem<f64> = reduce(&seq, &pattern).ok()?;
        let eval = Evaluator::new(&rs, objective);
        let found = strategy.run(&eval, &config.d, config.start);
        found.value.is_finite().then_some((found, eval.evaluations()))
    };
    match run() {
        Some((found, evaluations)) => SystemOutcome {
            key,
            found: Some(found),
            evaluations,
        },
        None => SystemOutcome {
            key,
            found: None,
            evaluations: 0,
        },
    }
}

/// Runs the configured strategy on every system and re-checks the best point.
pub fn minimize(config: &SearchConfig) -> Result<SearchResult, SearchError> {
    config.validate()?;
    let objective = objective(&config.target).ok_or_else(|| SearchError::UnknownObjective(config.target.clone()))?;
    let strategy = strategy(&config.strategy).ok_or_else(|| SearchError::UnknownStrategy(config.strategy.clone()))?;
    let mut keys = Vec::new();
    for alpha in config.alpha.values()? {
        for k in config.k.values() {
            for phi2 in config.phi2.values() {
                for phi3 in config.phi3.values() {
                    keys.push(SystemKey {
                        alpha: format_rational(&alpha),
                        k,
                        phi2,
                        phi3,
                    });
                }
            }
        }
    }
    let outcomes: Vec<SystemOutcome> = keys
        .into_par_iter()
        .map(|key| search_system(key, config, objective.as_ref(), strategy.as_ref()))
        .collect();
    let systems = outcomes.len();
    let skipped = outcomes.iter().filter(|o| o.found.is_none()).count();
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let best = outcomes
        .iter()
        .filter_map(|o| o.found.as_ref().map(|f| (o, f)))
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .ok_or(SearchError::NoAdmissibleSystem)?;
    let (outcome, found) = best;
    let d_exact = found
        .d
        .map(|x| rationalize(x, REPORT_DIGITS).unwrap_or_else(|_| BigRational::from_integer(1.into())));
    let evaluation = evaluate_point(&outcome.key, &d_exact, objective.as_ref())?;
    let trace = if config.trace {
        outcomes
            .iter()
            .map(|o| TraceEntry {
                system: o.key.clone(),
                value: o.found.as_ref().map(|f| f.value),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(SearchResult {
        gamma: outcome.key.pattern()?.gamma(),
        system: outcome.key.clone(),
        d: d_exact.map(|q| format_rational(&q)),
        value: evaluation.float,
        below_threshold: evaluation.below(config.threshold),
        evaluation,
        evaluations,
        systems,
        skipped,
        strategy: config.strategy.clone(),
        target: config.target.clone(),
        threshold: config.threshold,
        trace,
    })
}
