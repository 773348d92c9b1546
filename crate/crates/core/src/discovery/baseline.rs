//! Two reference labelers: one that trusts well-known install locations only,
//! one that accepts anything an application's parser accepts.

use std::collections::BTreeMap;

use glob::{MatchOptions, Pattern};

use super::classify::{LabelOptions, LabelResult, Verdict};
use crate::corpus::{extension_of, is_text, EntryKind, FileEntry};
use crate::parsers::{decode_text, Lens};

const MATCH: MatchOptions = MatchOptions {
    case_sensitive: true,
    require_literal_separator: true,
    require_literal_leading_dot: false,
};

/// Per-application lists of conventional configuration locations.
#[derive(Debug, Clone)]
pub struct DefaultPaths {
    patterns: BTreeMap<String, Vec<Pattern>>,
}

impl DefaultPaths {
    pub fn new() -> Self {
        Self {
            patterns: BTreeMap::new(),
        }
    }

    /// Locations distribution packages install to for httpd, nginx and mysql.
    pub fn builtin() -> Self {
        let mut d = Self::new();
        d.add(
            "httpd",
            &[
                "/etc/httpd/conf/httpd.conf",
                "/etc/httpd/httpd.conf",
                "/etc/httpd/conf.d/*.conf",
                "/etc/apache2/sites-available/*",
                "/etc/apache2/mods-available/*",
                "/etc/apache2/conf-available/*.conf",
                "/etc/apache2/conf.d/*",
                "/etc/apache2/ports.conf",
                "/etc/apache2/httpd.conf",
                "/etc/apache2/apache2.conf",
            ],
        );
        d.add(
            "nginx",
            &[
                "/etc/nginx/nginx.conf",
                "/etc/nginx/conf.d/*.conf",
                "/etc/nginx/sites-available/*",
            ],
        );
        d.add(
            "mysql",
            &[
                "/etc/my.cnf",
                "/etc/mysql/my.cnf",
                "/etc/mysql/conf.d/*",
                "/etc/mysql/mysql.conf.d/*",
            ],
        );
        d
    }

    /// Panics on an invalid glob; patterns are meant to be static.
    pub fn add(&mut self, application: &str, patterns: &[&str]) {
        let list = self.patterns.entry(application.to_string()).or_default();
        list.extend(patterns.iter().map(|p| Pattern::new(p).expect("valid glob")));
    }

    pub fn application_for(&self, path: &str) -> Option<&str> {
        self.patterns
            .iter()
            .find(|(_, pats)| pats.iter().any(|p| p.matches_with(path, MATCH)))
            .map(|(app, _)| app.as_str())
    }
}

impl Default for DefaultPaths {
    fn default() -> Self {
        Self::builtin()
    }
}

fn result(entry: &FileEntry, application: Option<&str>, syntax_valid: bool, verdict: Verdict) -> LabelResult {
    LabelResult {
        path: entry.path.clone(),
        application: application.map(str::to_string),
        best_similarity: 0.0,
        syntax_valid,
        verdict,
    }
}

/// Labels a file by its location alone.
pub fn default_paths_label(entry: &FileEntry, paths: &DefaultPaths) -> LabelResult {
    if entry.kind != EntryKind::File {
        return result(entry, None, false, Verdict::NotAFile);
    }
    match paths.application_for(&entry.path) {
        Some(app) => result(entry, Some(app), false, Verdict::Labeled),
        None => result(entry, None, false, Verdict::BelowThreshold),
    }
}

/// Labels a text file with the first application (by name) whose parser
/// accepts it and yields at least one node.
pub fn syntax_only_label(entry: &FileEntry, applications: &[&str], options: &LabelOptions) -> LabelResult {
    if entry.kind != EntryKind::File {
        return result(entry, None, false, Verdict::NotAFile);
    }
    if extension_of(&entry.path).is_some_and(|e| options.excluded_extensions.contains(&e)) {
        return result(entry, None, false, Verdict::ExcludedExtension);
    }
    if entry.size_bytes > options.size_cap {
        return result(entry, None, false, Verdict::Oversize);
    }
    let Some(bytes) = entry.content.as_deref() else {
        return result(entry, None, false, Verdict::NoContent);
    };
    if !is_text(bytes) {
        return result(entry, None, false, Verdict::NotText);
    }
    let text = decode_text(bytes);
    let mut apps = applications.to_vec();
    apps.sort_unstable();
    for app in apps {
        let Some(lens) = Lens::for_application(app) else {
            continue;
        };
        if lens.parse(&text, &entry.path).is_ok_and(|t| !t.is_empty()) {
            return result(entry, Some(app), true, Verdict::Labeled);
        }
    }
    result(entry, None, false, Verdict::SyntaxRejected)
}
