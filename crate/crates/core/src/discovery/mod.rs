//! Keyword vocabularies and the file-labeling pipeline built on them.

use std::path::PathBuf;

mod baseline;
mod classify;
mod keywords;
mod vocabulary;

pub use baseline::{default_paths_label, syntax_only_label, DefaultPaths};
pub use classify::{classify_entry, label_file, label_files, LabelOptions, LabelResult, Verdict};
pub use keywords::{extract_keywords, is_comment_line, KeywordSet, COMMENT_MARKERS, KEYWORD_DELIMITERS};
pub use vocabulary::{
    best_match, best_match_with, jaccard, train_vocabulary, upper_bound, MatchOutcome, Pruning, Similarity, Vocabulary,
};

#[derive(Debug, thiserror::Error)]
pub enum DiscoveryError {
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}: malformed vocabulary: {1}")]
    Format(PathBuf, String),
    #[error("no training files for `{0}`")]
    NoTrainingFiles(String),
}
