use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Characters separating a configuration keyword from what follows it.
pub const KEYWORD_DELIMITERS: &[char] = &['\t', '=', ' ', ':', '<', '>', '[', ']', ','];

/// Line prefixes (after leading whitespace) that mark a comment.
pub const COMMENT_MARKERS: &[&str] = &["//", "#", "%"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    pub source: String,
    pub keywords: BTreeSet<String>,
}

impl KeywordSet {
    pub fn from_content(source: impl Into<String>, content: &str) -> Self {
        Self {
            source: source.into(),
            keywords: extract_keywords(content),
        }
    }
}

pub fn is_comment_line(line: &str) -> bool {
    let trimmed = line.trim_start();
    COMMENT_MARKERS.iter().any(|m| trimmed.starts_with(m))
}

/// The first delimiter-separated word of every non-comment line.
///
/// Only whole-line comments are dropped; a trailing comment stays part of its line.
pub fn extract_keywords(content: &str) -> BTreeSet<String> {
    content
        .lines()
        .filter(|line| !is_comment_line(line))
        .filter_map(|line| {
            line.split(KEYWORD_DELIMITERS)
                .map(str::trim)
                .find(|piece| !piece.is_empty())
        })
        .map(str::to_string)
        .collect()
}
