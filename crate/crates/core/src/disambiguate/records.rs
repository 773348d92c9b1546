use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::defaults::FORMAT_VERSION;
use crate::parsers::{ConfigNode, ConfigTree, ARG_KEY, DIRECTIVE_KEY};

/// One flattened configuration entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub application: String,
    pub file_path: String,
    /// `/`-joined path of escaped key segments.
    pub key: String,
    pub value: String,
    /// 1-based position of the entry within its file.
    pub entry_ordinal: usize,
}

/// Escapes `%` and `/` so a segment can be joined with `/` unambiguously.
pub fn escape_segment(segment: &str) -> String {
    let mut out = String::with_capacity(segment.len());
    for ch in segment.chars() {
        match ch {
            '%' => out.push_str("%25"),
            '/' => out.push_str("%2F"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_segment(segment: &str) -> String {
    let mut out = String::with_capacity(segment.len());
    let mut rest = segment;
    while let Some(pos) = rest.find('%') {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        if let Some(after) = tail.strip_prefix("%2F") {
            out.push('/');
            rest = after;
        } else if let Some(after) = tail.strip_prefix("%25") {
            out.push('%');
            rest = after;
        } else {
            out.push('%');
            rest = &tail[1..];
        }
    }
    out.push_str(rest);
    out
}

/// Splits a record key into its unescaped segments.
pub fn split_key(key: &str) -> Vec<String> {
    key.split('/').map(unescape_segment).collect()
}

/// One record per leaf, keyed by the path of ancestor keys.
pub fn flatten(tree: &ConfigTree, application: &str, file_path: &str) -> Vec<ConfigRecord> {
    let mut out = Vec::new();
    for child in &tree.root.children {
        walk(child, "", &mut |key, node| {
            if node.is_leaf() {
                out.push((key.to_string(), node.value.clone().unwrap_or_default()));
            }
        });
    }
    number(out, application, file_path)
}

/// Lens-style addressing without disambiguation: `directive[1]/arg[1]` etc.
/// Every node that carries a value, and every valueless leaf, becomes a record.
pub fn flatten_raw(tree: &ConfigTree, application: &str, file_path: &str) -> Vec<ConfigRecord> {
    let mut out = Vec::new();
    for child in &tree.root.children {
        walk_raw(child, "", &mut out);
    }
    number(out, application, file_path)
}

fn number(pairs: Vec<(String, String)>, application: &str, file_path: &str) -> Vec<ConfigRecord> {
    pairs
        .into_iter()
        .enumerate()
        .map(|(i, (key, value))| ConfigRecord {
            application: application.to_string(),
            file_path: file_path.to_string(),
            key,
            value,
            entry_ordinal: i + 1,
        })
        .collect()
}

fn walk(node: &ConfigNode, prefix: &str, visit: &mut impl FnMut(&str, &ConfigNode)) {
    let key = if prefix.is_empty() {
        escape_segment(&node.key)
    } else {
        format!("{prefix}/{}", escape_segment(&node.key))
    };
    visit(&key, node);
    for child in &node.children {
        walk(child, &key, visit);
    }
}

fn walk_raw(node: &ConfigNode, prefix: &str, out: &mut Vec<(String, String)>) {
    let segment = format!("{}[{}]", escape_segment(&node.key), node.ordinal);
    let key = if prefix.is_empty() {
        segment
    } else {
        format!("{prefix}/{segment}")
    };
    if node.value.is_some() || node.is_leaf() {
        out.push((key.clone(), node.value.clone().unwrap_or_default()));
    }
    for child in &node.children {
        walk_raw(child, &key, out);
    }
}

/// Records whose key still contains a positional `directive[n]` or `arg[n]` segment.
pub fn key_stability_check(records: &[ConfigRecord]) -> Vec<&ConfigRecord> {
    records
        .iter()
        .filter(|r| r.key.split('/').any(is_positional_segment))
        .collect()
}

fn is_positional_segment(segment: &str) -> bool {
    [DIRECTIVE_KEY, ARG_KEY].iter().any(|name| {
        segment
            .strip_prefix(name)
            .and_then(|s| s.strip_prefix('['))
            .and_then(|s| s.strip_suffix(']'))
            .is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
    })
}

#[derive(Serialize, Deserialize)]
struct RecordHeader {
    format_version: u32,
    instance_id: String,
}

/// Writes a header line followed by one JSON record per line.
pub fn write_records<W: Write>(mut out: W, instance_id: &str, records: &[ConfigRecord]) -> std::io::Result<()> {
    let header = RecordHeader {
        format_version: FORMAT_VERSION,
        instance_id: instance_id.to_string(),
    };
    writeln!(out, "{}", serde_json::to_string(&header).expect("serializable"))?;
    for r in records {
        writeln!(out, "{}", serde_json::to_string(r).expect("serializable"))?;
    }
    out.flush()
}

#[derive(Debug, thiserror::Error)]
pub enum RecordFileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Reads a record file, returning its instance id and records.
pub fn read_records<R: BufRead>(input: R) -> Result<(String, Vec<ConfigRecord>), RecordFileError> {
    let mut lines = input.lines();
    let bad = |line, message: String| RecordFileError::Malformed { line, message };
    let first = lines.next().ok_or_else(|| bad(1, "missing header".into()))??;
    let header: RecordHeader = serde_json::from_str(&first).map_err(|e| bad(1, e.to_string()))?;
    if header.format_version != FORMAT_VERSION {
        return Err(bad(1, format!("unsupported format_version {}", header.format_version)));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| bad(i + 2, e.to_string()))?);
    }
    Ok((header.instance_id, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disambiguate::{disambiguate, RuleSet};
    use crate::parsers::parse_httpd;

    const HTTPD_SAMPLE: &str =
        "ServerRoot \"/var/www\"\nListen 80\n<IfModule unixd_module>\n    User daemon\n    Group daemon\n</IfModule>\n";

    fn pairs(records: &[ConfigRecord]) -> Vec<(&str, &str, usize)> {
        records
            .iter()
            .map(|r| (r.key.as_str(), r.value.as_str(), r.entry_ordinal))
            .collect()
    }

    #[test]
    fn sample_records() {
        let tree = disambiguate(&parse_httpd(HTTPD_SAMPLE).unwrap(), &RuleSet::builtin("httpd")).unwrap();
        let records = flatten(&tree, "httpd", "/etc/httpd/conf/httpd.conf");
        assert_eq!(
            pairs(&records),
            vec![
                ("ServerRoot", "/var/www", 1),
                ("Listen", "80", 2),
                ("IfModule unixd_module/User", "daemon", 3),
                ("IfModule unixd_module/Group", "daemon", 4),
            ]
        );
        assert!(key_stability_check(&records).is_empty());
        assert!(records.iter().all(|r| r.application == "httpd"));
    }

    #[test]
    fn raw_flatten_has_positional_keys() {
        let tree = parse_httpd(HTTPD_SAMPLE).unwrap();
        let raw = flatten_raw(&tree, "httpd", "/f");
        assert_eq!(raw[0].key, "directive[1]");
        assert_eq!(raw[0].value, "ServerRoot");
        assert_eq!(raw[1].key, "directive[1]/arg[1]");
        assert!(!key_stability_check(&raw).is_empty());
    }

    #[test]
    fn slash_in_key_is_escaped() {
        let tree = disambiguate(
            &parse_httpd("Redirect /Foo /Bar\n").unwrap(),
            &RuleSet::builtin("httpd"),
        )
        .unwrap();
        let r = flatten(&tree, "httpd", "/f");
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].key, "Redirect %2FFoo");
        assert_eq!(split_key(&r[0].key), vec!["Redirect /Foo"]);
        assert_eq!(r[0].value, "/Bar");
    }

    #[test]
    fn escaping_round_trips() {
        for s in ["", "a", "/", "%", "%2F", "a/b%c", "100%/x"] {
            assert_eq!(unescape_segment(&escape_segment(s)), s);
            assert!(!escape_segment(s).contains('/'));
        }
    }

    #[test]
    fn empty_tree_and_single_leaf() {
        let empty = parse_httpd("").unwrap();
        assert!(flatten(&empty, "httpd", "/f").is_empty());
        let one = disambiguate(&parse_httpd("Listen 80").unwrap(), &RuleSet::builtin("httpd")).unwrap();
        assert_eq!(pairs(&flatten(&one, "httpd", "/f")), vec![("Listen", "80", 1)]);
    }

    #[test]
    fn record_file_round_trip() {
        let tree = disambiguate(&parse_httpd(HTTPD_SAMPLE).unwrap(), &RuleSet::builtin("httpd")).unwrap();
        let records = flatten(&tree, "httpd", "/f");
        let mut buf = Vec::new();
        write_records(&mut buf, "inst", &records).unwrap();
        let (id, back) = read_records(buf.as_slice()).unwrap();
        assert_eq!(id, "inst");
        assert_eq!(back, records);
        let bad = b"{\"format_version\":1,\"instance_id\":\"x\"}\nnot json\n";
        assert!(matches!(
            read_records(&bad[..]),
            Err(RecordFileError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn positional_segment_detection() {
        assert!(is_positional_segment("directive[12]"));
        assert!(is_positional_segment("arg[1]"));
        assert!(!is_positional_segment("arg"));
        assert!(!is_positional_segment("argv[1]"));
        assert!(!is_positional_segment("directive[]"));
    }
}
