use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::extract_keywords;
use super::vocabulary::{best_match_with, Pruning, Similarity, Vocabulary};
use crate::corpus::{extension_of, is_text, EntryKind, FileEntry};
use crate::defaults;
use crate::exec::{self, Execution};
use crate::parsers::ConfigTree;

#[derive(Debug, Clone, PartialEq)]
pub struct LabelOptions {
    pub threshold: f64,
    pub size_cap: u64,
    pub excluded_extensions: BTreeSet<String>,
    /// Run the application's parser before labeling.
    pub syntax_check: bool,
    pub pruning: Pruning,
}

impl Default for LabelOptions {
    fn default() -> Self {
        Self {
            threshold: defaults::CONFIDENCE_THRESHOLD,
            size_cap: defaults::SIZE_CAP,
            excluded_extensions: defaults::excluded_extensions(),
            syntax_check: true,
            pruning: Pruning::Enabled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Labeled,
    NotAFile,
    NoContent,
    NotText,
    Oversize,
    ExcludedExtension,
    BelowThreshold,
    SyntaxRejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelResult {
    pub path: String,
    /// `None` means unlabeled.
    pub application: Option<String>,
    pub best_similarity: f64,
    pub syntax_valid: bool,
    pub verdict: Verdict,
}

impl LabelResult {
    fn unlabeled(path: &str, verdict: Verdict) -> Self {
        Self {
            path: path.to_string(),
            application: None,
            best_similarity: 0.0,
            syntax_valid: false,
            verdict,
        }
    }

    pub fn label(&self) -> &str {
        self.application.as_deref().unwrap_or("unlabeled")
    }

    pub fn is_labeled(&self) -> bool {
        self.application.is_some()
    }
}

/// Labels one file; see [`classify_entry`] for the parse tree as well.
pub fn label_file(entry: &FileEntry, vocabularies: &[Vocabulary], options: &LabelOptions) -> LabelResult {
    classify_entry(entry, vocabularies, options).0
}

/// Filters, keyword-matches and syntax-checks one file. When labeled with the
/// syntax check enabled, the accepted parse tree is returned alongside.
pub fn classify_entry(
    entry: &FileEntry,
    vocabularies: &[Vocabulary],
    options: &LabelOptions,
) -> (LabelResult, Option<ConfigTree>) {
    let path = entry.path.as_str();
    if entry.kind != EntryKind::File {
        return (LabelResult::unlabeled(path, Verdict::NotAFile), None);
    }
    if extension_of(path).is_some_and(|e| options.excluded_extensions.contains(&e)) {
        return (LabelResult::unlabeled(path, Verdict::ExcludedExtension), None);
    }
    if entry.size_bytes > options.size_cap {
        return (LabelResult::unlabeled(path, Verdict::Oversize), None);
    }
    let Some(bytes) = entry.content.as_deref() else {
        return (LabelResult::unlabeled(path, Verdict::NoContent), None);
    };
    if !is_text(bytes) {
        return (LabelResult::unlabeled(path, Verdict::NotText), None);
    }
    let text = crate::parsers::decode_text(bytes);
    let test_set = extract_keywords(&text);

    let mut best = Similarity::ZERO;
    let mut candidates: Vec<(Similarity, &Vocabulary)> = Vec::new();
    for vocab in vocabularies {
        let outcome = best_match_with(&test_set, vocab, options.threshold, options.pruning);
        best = best.max(outcome.similarity);
        if outcome.matched {
            candidates.push((outcome.similarity, vocab));
        }
    }
    if candidates.is_empty() {
        let mut r = LabelResult::unlabeled(path, Verdict::BelowThreshold);
        r.best_similarity = best.value();
        return (r, None);
    }
    // highest similarity first, then application name
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.application().cmp(b.1.application())));

    for (similarity, vocab) in &candidates {
        let accepted = if options.syntax_check {
            match vocab.lens() {
                Some(lens) => match lens.parse(&text, path) {
                    Ok(tree) => Some(Some(tree)),
                    Err(err) => {
                        log::debug!("{path}: rejected by {} syntax: {err}", vocab.application());
                        None
                    }
                },
                None => {
                    log::debug!("{path}: no parser known for {}", vocab.application());
                    None
                }
            }
        } else {
            Some(None)
        };
        if let Some(tree) = accepted {
            let result = LabelResult {
                path: path.to_string(),
                application: Some(vocab.application().to_string()),
                best_similarity: similarity.value(),
                syntax_valid: options.syntax_check,
                verdict: Verdict::Labeled,
            };
            return (result, tree);
        }
    }
    let mut r = LabelResult::unlabeled(path, Verdict::SyntaxRejected);
    r.best_similarity = candidates[0].0.value();
    (r, None)
}

/// Labels many files, optionally in parallel.
pub fn label_files(
    exec: Execution,
    entries: &[&FileEntry],
    vocabularies: &[Vocabulary],
    options: &LabelOptions,
) -> Vec<LabelResult> {
    exec::map(exec, entries, |e| label_file(e, vocabularies, options))
}
