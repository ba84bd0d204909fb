//! Executable checks of the metric axioms and of the three lemmas behind
//! the triangle inequality.
//!
//! Two tiers:
//!
//! * [`Tier::Rational`] evaluates every distance exactly and demands exact
//!   equalities and non-negative slacks. It is the authoritative tier.
//! * [`Tier::Float`] runs the production `f64` path with tolerance
//!   [`AXIOM_TOLERANCE`] ([`LEMMA_TOLERANCE`] for the scs and chain equalities).
//!
//! Inputs come either from exhaustive enumeration of a small universe (all
//! strings over `k` symbols up to length `L`) or from a seeded random
//! generator. Reports are deterministic for a given configuration and seed,
//! independent of the number of worker threads.
//!
//! A [`Subject`] can carry a deliberately broken [`Fixture`] so the harness
//! itself can be shown to catch violations.

mod gen;
mod shrink;
mod verify;

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::ExactHarmonic;
use crate::lcs::{lcs_len, Engine};
use crate::metric::{exact_from_lcs_len, HarmonicEditDistance};
use crate::symbols::SymbolSeq;

pub use gen::{
    correlated_triple, exhaustive_chains, random_chain, random_chains, random_pairs, random_string,
    rng_for, universe, universe_pairs, universe_size, MAX_UNIVERSE,
};
pub use shrink::{is_locally_minimal, shrink};
pub use verify::{
    evaluate, verify_all, verify_lemma_chain, verify_lemma_lcs_triangle, verify_lemma_scs,
    verify_metric_axioms, Outcome,
};

/// Float-tier tolerance for the axioms and the lcs inequality.
pub const AXIOM_TOLERANCE: f64 = 1e-9;

/// Float-tier tolerance for the scs and chain equalities.
pub const LEMMA_TOLERANCE: f64 = 1e-12;

/// Counterexamples kept per property (the count is always complete).
pub const MAX_KEPT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenMode {
    Exhaustive,
    Random,
}

/// Where test strings come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenConfig {
    pub alphabet_size: u32,
    pub max_length: usize,
    /// Triples, pairs or chains drawn in random mode; ignored when
    /// exhaustive.
    pub sample_count: usize,
    pub seed: u64,
    pub mode: GenMode,
}

impl GenConfig {
    pub fn exhaustive(alphabet_size: u32, max_length: usize) -> Self {
        GenConfig {
            alphabet_size,
            max_length,
            sample_count: 0,
            seed: 0,
            mode: GenMode::Exhaustive,
        }
    }

    pub fn random(alphabet_size: u32, max_length: usize, sample_count: usize, seed: u64) -> Self {
        GenConfig {
            alphabet_size,
            max_length,
            sample_count,
            seed,
            mode: GenMode::Random,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabet_size == 0 {
            return Err(Error::Precondition("alphabet_size must be positive".into()));
        }
        if self.mode == GenMode::Exhaustive {
            let size = universe_size(self.alphabet_size, self.max_length);
            if size.is_none_or(|n| n > MAX_UNIVERSE as u128) {
                return Err(Error::Capacity {
                    what: "exhaustive universe size",
                    value: size.map_or(usize::MAX, |n| n.min(usize::MAX as u128) as usize),
                    limit: MAX_UNIVERSE,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    /// `d(a, b) = d(b, a)`.
    Symmetry,
    /// `d(a, b) = 0` exactly when `a = b`.
    Identity,
    /// `d(a, c) <= d(a, b) + d(b, c)`.
    Triangle,
    /// `d(a, b) = d(a, scs) + d(scs, b)`, evaluated from lengths.
    LemmaScs,
    /// `d(a, c) = d(a, b) + d(b, c)` for a subsequence chain `a ⊑ b ⊑ c`.
    LemmaChain,
    /// `d(a, b) <= d(a, lcs) + d(lcs, b)`, evaluated from lengths.
    LemmaLcsTriangle,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Symmetry,
        Property::Identity,
        Property::Triangle,
        Property::LemmaScs,
        Property::LemmaChain,
        Property::LemmaLcsTriangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Symmetry => "symmetry",
            Property::Identity => "identity",
            Property::Triangle => "triangle",
            Property::LemmaScs => "lemma-scs",
            Property::LemmaChain => "lemma-chain",
            Property::LemmaLcsTriangle => "lemma-lcs-triangle",
        }
    }

    /// Number of strings a witness consists of.
    pub fn arity(self) -> usize {
        match self {
            Property::Triangle | Property::LemmaChain => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Property {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Which distance is under test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    /// The real harmonic edit distance.
    #[default]
    None,
    /// Planted bug: `|lcs(a, b)|` replaced by `min(|a|, |b|)`.
    BrokenLcs,
}

/// A distance under test: the production evaluator, optionally with a
/// planted fixture.
#[derive(Clone, Debug, Default)]
pub struct Subject {
    metric: HarmonicEditDistance,
    fixture: Fixture,
}

impl Subject {
    pub fn new(metric: HarmonicEditDistance, fixture: Fixture) -> Self {
        Subject { metric, fixture }
    }

    pub fn fixture(&self) -> Fixture {
        self.fixture
    }

    pub fn metric(&self) -> &HarmonicEditDistance {
        &self.metric
    }

    /// The LCS length as this subject sees it.
    pub fn lcs(&self, a: &SymbolSeq, b: &SymbolSeq) -> usize {
        match self.fixture {
            Fixture::None => lcs_len(a, b, Engine::Auto).expect("auto engine is total"),
            Fixture::BrokenLcs => a.len().min(b.len()),
        }
    }

    pub fn distance_f64(&self, a: &SymbolSeq, b: &SymbolSeq) -> f64 {
        match self.fixture {
            Fixture::None => self.metric.distance(a, b),
            Fixture::BrokenLcs => self.metric.from_lcs_len(a.len(), b.len(), self.lcs(a, b)),
        }
    }

    pub fn distance_exact(&self, a: &SymbolSeq, b: &SymbolSeq) -> Result<ExactHarmonic> {
        exact_from_lcs_len(a.len(), b.len(), self.lcs(a, b))
    }

    pub(crate) fn distance(&self, a: &SymbolSeq, b: &SymbolSeq, tier: Tier) -> Result<Value> {
        Ok(match tier {
            Tier::Float => Value::Float(self.distance_f64(a, b)),
            Tier::Rational => Value::Exact(self.distance_exact(a, b)?),
        })
    }
}

/// A tier-tagged number.
#[derive(Clone, Debug)]
pub(crate) enum Value {
    Float(f64),
    Exact(ExactHarmonic),
}

impl Value {
    pub(crate) fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Float(x), Value::Float(y)) => Value::Float(x + y),
            (Value::Exact(x), Value::Exact(y)) => Value::Exact(x + y),
            _ => unreachable!("mixed tiers"),
        }
    }

    pub(crate) fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Float(x), Value::Float(y)) => Value::Float(x - y),
            (Value::Exact(x), Value::Exact(y)) => Value::Exact(x - y),
            _ => unreachable!("mixed tiers"),
        }
    }

    pub(crate) fn abs(&self) -> Value {
        match self {
            Value::Float(x) => Value::Float(x.abs()),
            Value::Exact(x) => Value::Exact(x.abs()),
        }
    }

    pub(crate) fn neg(&self) -> Value {
        match self {
            Value::Float(x) => Value::Float(-x),
            Value::Exact(x) => Value::Exact(-x.clone()),
        }
    }

    pub(crate) fn to_f64(&self) -> f64 {
        match self {
            Value::Float(x) => *x,
            Value::Exact(x) => x.to_f64(),
        }
    }

    pub(crate) fn exact(self) -> Option<ExactHarmonic> {
        match self {
            Value::Float(_) => None,
            Value::Exact(x) => Some(x),
        }
    }
}

/// A witness that a property failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub property: Property,
    /// Two strings for pair properties, three for `Triangle` and
    /// `LemmaChain`.
    pub strings: Vec<SymbolSeq>,
    /// Signed slack; negative means violation.
    pub slack: f64,
    /// Exact slack, rational tier only.
    pub exact_slack: Option<ExactHarmonic>,
}

impl Counterexample {
    pub fn render(&self) -> String {
        let strings: Vec<String> = self
            .strings
            .iter()
            .map(|s| format!("{:?}", s.to_letters()))
            .collect();
        let mut out = format!("[{}] slack={:e}", self.property, self.slack);
        if let Some(exact) = &self.exact_slack {
            let _ = write!(out, " exact_slack={exact}");
        }
        let _ = write!(out, " strings=({})", strings.join(", "));
        out
    }

    fn sort_key(&self) -> (f64, &[SymbolSeq]) {
        (self.slack, &self.strings)
    }
}

/// Outcome of one property over many cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub checked: u64,
    pub violations: u64,
    /// Smallest slack seen; `None` when nothing was checked.
    pub min_slack: Option<f64>,
    /// The `MAX_KEPT` most negative counterexamples, in canonical order.
    pub counterexamples: Vec<Counterexample>,
}

impl PropertyReport {
    pub fn new(property: Property) -> Self {
        PropertyReport {
            property,
            checked: 0,
            violations: 0,
            min_slack: None,
            counterexamples: Vec::new(),
        }
    }

    pub(crate) fn record(&mut self, outcome: Outcome, strings: &[SymbolSeq]) {
        self.checked += 1;
        self.min_slack = Some(
            self.min_slack
                .map_or(outcome.slack, |m| m.min(outcome.slack)),
        );
        if outcome.violated {
            self.violations += 1;
            self.counterexamples.push(Counterexample {
                property: self.property,
                strings: strings.to_vec(),
                slack: outcome.slack,
                exact_slack: outcome.exact_slack,
            });
            if self.counterexamples.len() > 4 * MAX_KEPT {
                self.trim();
            }
        }
    }

    /// Folds `other` (a later chunk of the same property) into `self`.
    pub(crate) fn merge(&mut self, other: PropertyReport) {
        debug_assert_eq!(self.property, other.property);
        self.checked += other.checked;
        self.violations += other.violations;
        self.min_slack = match (self.min_slack, other.min_slack) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        self.counterexamples.extend(other.counterexamples);
        self.trim();
    }

    fn trim(&mut self) {
        self.counterexamples.sort_by(|x, y| {
            let (sx, wx) = x.sort_key();
            let (sy, wy) = y.sort_key();
            sx.total_cmp(&sy).then_with(|| wx.cmp(wy))
        });
        self.counterexamples.truncate(MAX_KEPT);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// The result of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub config: GenConfig,
    pub tier: Tier,
    pub fixture: Fixture,
    pub properties: Vec<PropertyReport>,
}

impl Report {
    pub fn violations(&self) -> u64 {
        self.properties.iter().map(|p| p.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn property(&self, property: Property) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.property == property)
    }

    /// Line-oriented summary, one line per property, followed by the kept
    /// counterexamples.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "mode={} tier={} fixture={} alphabet={} max_length={} samples={} seed={}\n",
            serde_plain(&c.mode),
            serde_plain(&self.tier),
            serde_plain(&self.fixture),
            c.alphabet_size,
            c.max_length,
            c.sample_count,
            c.seed,
        );
        for p in &self.properties {
            let min = p.min_slack.map_or("-".to_string(), |m| format!("{m:e}"));
            let _ = writeln!(
                out,
                "{:<20} checked={} violations={} min_slack={}",
                p.property.name(),
                p.checked,
                p.violations,
                min
            );
        }
        for p in &self.properties {
            for cx in &p.counterexamples {
                let _ = writeln!(out, "counterexample {}", cx.render());
            }
        }
        let _ = writeln!(
            out,
            "result={}",
            if self.passed() { "pass" } else { "fail" }
        );
        out
    }

    /// Machine-readable summary: per property name, cases checked,
    /// violations and min slack, plus the seed.
    pub fn to_json(&self) -> String {
        let props: Vec<_> = self
            .properties
            .iter()
            .map(|p| {
                serde_json::json!({
                    "property": p.property.name(),
                    "checked": p.checked,
                    "violations": p.violations,
                    "min_slack": p.min_slack,
                    "counterexamples": p.counterexamples,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "mode": self.config.mode,
            "tier": self.tier,
            "fixture": self.fixture,
            "alphabet": self.config.alphabet_size,
            "max_length": self.config.max_length,
            "samples": self.config.sample_count,
            "seed": self.config.seed,
            "violations": self.violations(),
            "properties": props,
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}
