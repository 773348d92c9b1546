use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DiscoveryError, KeywordSet};
use crate::defaults::FORMAT_VERSION;
use crate::parsers::Lens;

/// Exact set-similarity ratio `shared / total`; `0/0` reads as zero.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Similarity {
    pub shared: usize,
    pub total: usize,
}

impl Similarity {
    pub const ZERO: Similarity = Similarity { shared: 0, total: 0 };

    pub fn new(shared: usize, total: usize) -> Self {
        debug_assert!(shared <= total);
        Self { shared, total }
    }

    pub fn value(self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.shared as f64 / self.total as f64
        }
    }

    pub fn meets(self, threshold: f64) -> bool {
        self.total > 0 && self.value() >= threshold
    }
}

impl PartialEq for Similarity {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Similarity {}

impl PartialOrd for Similarity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Similarity {
    fn cmp(&self, other: &Self) -> Ordering {
        // zero-denominator ratios are treated as 0/1
        let (a, b) = (self.shared as u128, self.total.max(1) as u128);
        let (c, d) = (other.shared as u128, other.total.max(1) as u128);
        (a * d).cmp(&(c * b))
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.shared, self.total)
    }
}

/// Jaccard index of two keyword sets. Two empty sets score 0.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> Similarity {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let shared = small.iter().filter(|k| large.contains(*k)).count();
    Similarity::new(shared, a.len() + b.len() - shared)
}

/// Keyword sets of every known configuration file of one application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    application: String,
    lens: Option<Lens>,
    file_sets: Vec<KeywordSet>,
    union_set: BTreeSet<String>,
}

impl Vocabulary {
    pub fn new(application: impl Into<String>) -> Self {
        Self {
            application: application.into(),
            lens: None,
            file_sets: Vec::new(),
            union_set: BTreeSet::new(),
        }
    }

    /// Overrides the built-in parser choice used for the syntax check.
    pub fn with_lens(mut self, lens: Lens) -> Self {
        self.lens = Some(lens);
        self
    }

    pub fn application(&self) -> &str {
        &self.application
    }

    pub fn file_sets(&self) -> &[KeywordSet] {
        &self.file_sets
    }

    pub fn union_set(&self) -> &BTreeSet<String> {
        &self.union_set
    }

    /// Parser for this application: explicit override, else the built-in mapping.
    pub fn lens(&self) -> Option<Lens> {
        self.lens.clone().or_else(|| Lens::for_application(&self.application))
    }

    pub fn contains_source(&self, source: &str) -> bool {
        self.file_sets.iter().any(|s| s.source == source)
    }

    /// Adds one keyword set per new `(source, content)` pair. Sources already in
    /// the vocabulary are skipped. Returns the number of sets added.
    pub fn extend<S, C>(&mut self, files: impl IntoIterator<Item = (S, C)>) -> usize
    where
        S: Into<String>,
        C: AsRef<str>,
    {
        let mut added = 0;
        for (source, content) in files {
            let source = source.into();
            if self.contains_source(&source) {
                continue;
            }
            self.push(KeywordSet::from_content(source, content.as_ref()));
            added += 1;
        }
        added
    }

    pub fn push(&mut self, set: KeywordSet) {
        self.union_set.extend(set.keywords.iter().cloned());
        self.file_sets.push(set);
    }

    pub fn save(&self, path: &Path) -> Result<(), DiscoveryError> {
        let text = serde_json::to_string_pretty(&StoredVocabulary::from(self)).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|e| DiscoveryError::Io(path.to_path_buf(), e))
    }

    /// Loads a vocabulary file; the union set is always recomputed.
    pub fn load(path: &Path) -> Result<Vocabulary, DiscoveryError> {
        let text = std::fs::read_to_string(path).map_err(|e| DiscoveryError::Io(path.to_path_buf(), e))?;
        Self::from_json(&text).map_err(|m| DiscoveryError::Format(path.to_path_buf(), m))
    }

    pub fn from_json(text: &str) -> Result<Vocabulary, String> {
        let stored: StoredVocabulary = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if stored.format_version != FORMAT_VERSION {
            return Err(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                stored.format_version
            ));
        }
        let mut vocab = Vocabulary::new(stored.application);
        vocab.lens = stored.lens;
        for set in stored.file_sets {
            vocab.push(set);
        }
        Ok(vocab)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StoredVocabulary::from(self)).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct StoredVocabulary {
    format_version: u32,
    application: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lens: Option<Lens>,
    file_sets: Vec<KeywordSet>,
}

impl From<&Vocabulary> for StoredVocabulary {
    fn from(v: &Vocabulary) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            application: v.application.clone(),
            lens: v.lens.clone(),
            file_sets: v.file_sets.clone(),
        }
    }
}

/// Builds a vocabulary from labeled training files.
pub fn train_vocabulary<S, C>(
    application: &str,
    files: impl IntoIterator<Item = (S, C)>,
) -> Result<Vocabulary, DiscoveryError>
where
    S: Into<String>,
    C: AsRef<str>,
{
    let mut vocab = Vocabulary::new(application);
    if vocab.extend(files) == 0 {
        return Err(DiscoveryError::NoTrainingFiles(application.to_string()));
    }
    Ok(vocab)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pruning {
    #[default]
    Enabled,
    Disabled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchOutcome {
    /// Best Jaccard index found, or the upper bound when the vocabulary was pruned.
    pub similarity: Similarity,
    pub upper_bound: Similarity,
    pub matched: bool,
    pub pruned: bool,
    /// Number of per-file Jaccard computations performed.
    pub comparisons: usize,
    pub best_source: Option<String>,
}

/// `|test ∩ union| / |test|`, an upper bound on the Jaccard index against any
/// single file set of the vocabulary.
pub fn upper_bound(test: &BTreeSet<String>, vocab: &Vocabulary) -> Similarity {
    let shared = test.iter().filter(|k| vocab.union_set.contains(*k)).count();
    Similarity::new(shared, test.len())
}

pub fn best_match(test: &BTreeSet<String>, vocab: &Vocabulary, threshold: f64) -> MatchOutcome {
    best_match_with(test, vocab, threshold, Pruning::Enabled)
}

pub fn best_match_with(test: &BTreeSet<String>, vocab: &Vocabulary, threshold: f64, pruning: Pruning) -> MatchOutcome {
    let bound = upper_bound(test, vocab);
    if test.is_empty() {
        return MatchOutcome {
            similarity: Similarity::ZERO,
            upper_bound: bound,
            matched: false,
            pruned: false,
            comparisons: 0,
            best_source: None,
        };
    }
    if pruning == Pruning::Enabled && !bound.meets(threshold) {
        return MatchOutcome {
            similarity: bound,
            upper_bound: bound,
            matched: false,
            pruned: true,
            comparisons: 0,
            best_source: None,
        };
    }
    let mut best = Similarity::ZERO;
    let mut best_source = None;
    for set in &vocab.file_sets {
        let j = jaccard(test, &set.keywords);
        if j > best || best_source.is_none() {
            best = j;
            best_source = Some(set.source.clone());
        }
    }
    MatchOutcome {
        similarity: best,
        upper_bound: bound,
        matched: best.meets(threshold),
        pruned: false,
        comparisons: vocab.file_sets.len(),
        best_source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&set(&["x", "y"]), &set(&["x", "y"])).value(), 1.0);
        let j = jaccard(&set(&["x", "y"]), &set(&["y", "z"]));
        assert_eq!((j.shared, j.total), (1, 3));
        assert_eq!(jaccard(&set(&[]), &set(&[])).value(), 0.0);
        assert!(!jaccard(&set(&[]), &set(&[])).meets(0.0));
    }

    #[test]
    fn similarity_ordering_is_exact() {
        assert_eq!(Similarity::new(1, 2), Similarity::new(2, 4));
        assert!(Similarity::new(9, 10) > Similarity::new(8, 9));
        assert!(Similarity::new(9, 10).meets(0.9));
        assert!(!Similarity::new(8, 9).meets(0.9));
    }

    #[test]
    fn training_examples() {
        let v = train_vocabulary("httpd", [("a", "Listen 80")]).unwrap();
        assert_eq!(v.file_sets().len(), 1);
        assert_eq!(v.union_set(), &set(&["Listen"]));
        let v = train_vocabulary("httpd", [("a", "Listen 80"), ("b", "User daemon\nGroup daemon")]).unwrap();
        assert_eq!(v.union_set(), &set(&["Listen", "User", "Group"]));
        let empty: Vec<(String, String)> = vec![];
        assert!(matches!(
            train_vocabulary("httpd", empty),
            Err(DiscoveryError::NoTrainingFiles(_))
        ));
    }

    #[test]
    fn extend_skips_known_sources() {
        let mut v = train_vocabulary("httpd", [("a", "Listen 80")]).unwrap();
        assert_eq!(v.extend([("a", "Listen 80"), ("b", "User x")]), 1);
        assert_eq!(v.file_sets().len(), 2);
    }

    #[test]
    fn disjoint_set_is_pruned() {
        let v = train_vocabulary("httpd", [("a", "Listen 80")]).unwrap();
        let out = best_match(&set(&["foo"]), &v, 0.9);
        assert!(out.pruned && !out.matched);
        assert_eq!(out.similarity.value(), 0.0);
        assert_eq!(out.comparisons, 0);
    }

    #[test]
    fn identical_set_matches_any_threshold() {
        let v = train_vocabulary("httpd", [("a", "Listen 80\nUser x"), ("b", "Group y")]).unwrap();
        for t in [0.0, 0.5, 0.9, 1.0] {
            let out = best_match(&set(&["Listen", "User"]), &v, t);
            assert!(out.matched);
            assert_eq!(out.similarity.value(), 1.0);
            assert_eq!(out.best_source.as_deref(), Some("a"));
        }
    }

    #[test]
    fn empty_test_set_never_matches() {
        let v = train_vocabulary("httpd", [("a", "Listen 80")]).unwrap();
        let out = best_match(&set(&[]), &v, 0.0);
        assert!(!out.matched);
        assert_eq!(out.similarity.value(), 0.0);
    }

    #[test]
    fn json_round_trip_recomputes_union() {
        let v = train_vocabulary("nginx", [("a", "user x;"), ("b", "events {\n}")]).unwrap();
        let json = v.to_json();
        assert!(!json.contains("union"));
        assert_eq!(Vocabulary::from_json(&json).unwrap(), v);
        assert!(Vocabulary::from_json(&json.replace("\"format_version\": 1", "\"format_version\": 7")).is_err());
    }
}
