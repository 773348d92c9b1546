//! Corpus statistics over extracted records: outlier ranking, value-type
//! inference, constraint mining and violation reporting.

mod histogram;
mod model;
mod rank;
mod rules;
mod types;
mod violations;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::InstanceSnapshot;
use crate::disambiguate::ConfigRecord;

pub use histogram::{build_histograms, HistogramModel, ValueHistogram};
pub use model::{AnalysisModel, InstanceReport};
pub use rank::{peerpressure_rank, peerpressure_score, Suspect, SuspectRanking};
pub use rules::{infer_rules, InferredRule, RuleTemplate, RuleThresholds};
pub use types::{entropy_bits, infer_types, InferredType, ValueType, ENUM_SMALL_MAX};
pub use violations::{detect_violations, is_placeholder, Violation, ViolationKind};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("model was built with instance `{0}` under test; leave it out first")]
    LeaveOneOutViolation(String),
    #[error("unsupported format_version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("malformed model: {0}")]
    Format(String),
}

/// A parameter identity: keys are only comparable within one application.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamKey {
    pub application: String,
    pub key: String,
}

impl ParamKey {
    pub fn new(application: impl Into<String>, key: impl Into<String>) -> Self {
        Self {
            application: application.into(),
            key: key.into(),
        }
    }

    pub fn of(record: &ConfigRecord) -> Self {
        Self::new(record.application.clone(), record.key.clone())
    }
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.application, self.key)
    }
}

/// All records extracted from one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecords {
    pub instance_id: String,
    pub records: Vec<ConfigRecord>,
}

impl InstanceRecords {
    pub fn new(instance_id: impl Into<String>, records: Vec<ConfigRecord>) -> Self {
        Self {
            instance_id: instance_id.into(),
            records,
        }
    }

    /// Distinct values per parameter; empty values included.
    pub fn value_sets(&self) -> BTreeMap<ParamKey, BTreeSet<&str>> {
        let mut out: BTreeMap<ParamKey, BTreeSet<&str>> = BTreeMap::new();
        for r in &self.records {
            out.entry(ParamKey::of(r)).or_default().insert(r.value.as_str());
        }
        out
    }
}

/// Answers "does this path exist" for the semantic file-path check.
pub trait PathOracle: Sync {
    fn exists(&self, path: &str) -> bool;
}

fn normalize(path: &str) -> &str {
    match path.trim_end_matches('/') {
        "" if path.starts_with('/') => "/",
        p => p,
    }
}

/// A set of known paths, typically the union over training snapshots.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownPaths(HashSet<String>);

impl KnownPaths {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, path: &str) {
        self.0.insert(normalize(path).to_string());
    }

    pub fn extend_from_snapshot(&mut self, snapshot: &InstanceSnapshot) {
        for p in snapshot.paths() {
            self.insert(p);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for KnownPaths {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut k = KnownPaths::new();
        for p in iter {
            k.insert(p.as_ref());
        }
        k
    }
}

impl PathOracle for KnownPaths {
    fn exists(&self, path: &str) -> bool {
        let p = normalize(path);
        p == "/" || self.0.contains(p)
    }
}

impl PathOracle for InstanceSnapshot {
    fn exists(&self, path: &str) -> bool {
        let p = normalize(path);
        p == "/" || self.contains(p)
    }
}
