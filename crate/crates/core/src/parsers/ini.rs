use std::sync::OnceLock;

use regex::Regex;

use super::{logical_lines, ConfigFormat, ConfigNode, ConfigTree, SyntaxError};

fn key_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$").expect("static regex"))
}

fn unquote(value: &str) -> &str {
    let bytes = value.as_bytes();
    if bytes.len() >= 2 {
        let (first, last) = (bytes[0], bytes[bytes.len() - 1]);
        if (first == b'"' || first == b'\'') && first == last {
            return &value[1..value.len() - 1];
        }
    }
    value
}

/// Parses INI / MySQL option-file syntax.
///
/// `[section]` headers open section nodes; `key = value` pairs and bare `key`
/// flags become leaves of the current section (or of the root before the first
/// header); `!include` and `!includedir` become leaves keyed by the directive.
pub fn parse_ini(content: &str) -> Result<ConfigTree, SyntaxError> {
    let mut top: Vec<ConfigNode> = Vec::new();
    let mut section: Option<ConfigNode> = None;

    for (lineno, line) in logical_lines(content) {
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with(';') {
            continue;
        }
        let leaf = if let Some(rest) = text.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| SyntaxError::new(lineno, "section header without `]`"))?
                .trim();
            if name.is_empty() {
                return Err(SyntaxError::new(lineno, "empty section name"));
            }
            if let Some(done) = section.take() {
                top.push(done);
            }
            section = Some(ConfigNode::new(name, None));
            continue;
        } else if let Some(rest) = text.strip_prefix('!') {
            let (directive, arg) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            if directive != "include" && directive != "includedir" {
                return Err(SyntaxError::new(lineno, format!("unknown directive `!{directive}`")));
            }
            let arg = arg.trim();
            if arg.is_empty() {
                return Err(SyntaxError::new(lineno, format!("`!{directive}` needs a path")));
            }
            ConfigNode::leaf(format!("!{directive}"), arg)
        } else if let Some((key, value)) = text.split_once('=') {
            let key = key.trim();
            if key.is_empty() {
                return Err(SyntaxError::new(lineno, "key/value pair without a key"));
            }
            if !key_re().is_match(key) {
                return Err(SyntaxError::new(lineno, format!("invalid key `{key}`")));
            }
            ConfigNode::leaf(key, unquote(value.trim()))
        } else if key_re().is_match(text) {
            ConfigNode::new(text, None)
        } else {
            return Err(SyntaxError::new(
                lineno,
                "expected a section header, a key/value pair or a bare key",
            ));
        };
        match section.as_mut() {
            Some(s) => s.children.push(leaf),
            None => top.push(leaf),
        }
    }
    if let Some(done) = section.take() {
        top.push(done);
    }
    Ok(ConfigTree::new(ConfigFormat::Ini, "", top))
}
