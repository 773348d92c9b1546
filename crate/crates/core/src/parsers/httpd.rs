use std::sync::OnceLock;

use regex::Regex;

use super::{logical_lines, ConfigFormat, ConfigNode, ConfigTree, SyntaxError, ARG_KEY, DIRECTIVE_KEY};

fn name_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[A-Za-z_][A-Za-z0-9_.\-]*$").expect("static regex"))
}

/// Splits a directive line into words. Double- or single-quoted words are
/// grouped and their quotes stripped; `\"` escapes a quote inside them.
pub(crate) fn split_words(line: &str) -> Result<Vec<String>, String> {
    let mut words = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let Some(&first) = chars.peek() else { break };
        let mut word = String::new();
        if first == '"' || first == '\'' {
            chars.next();
            let mut closed = false;
            while let Some(c) = chars.next() {
                if c == '\\' {
                    match chars.peek() {
                        Some(&n) if n == first || n == '\\' => {
                            word.push(n);
                            chars.next();
                        }
                        _ => word.push(c),
                    }
                } else if c == first {
                    closed = true;
                    break;
                } else {
                    word.push(c);
                }
            }
            if !closed {
                return Err(format!("unterminated {first} quote"));
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                word.push(c);
                chars.next();
            }
        }
        words.push(word);
    }
    Ok(words)
}

fn arg_nodes(args: &[String]) -> Vec<ConfigNode> {
    args.iter().map(|a| ConfigNode::leaf(ARG_KEY, a.clone())).collect()
}

struct OpenSection {
    name: String,
    line: usize,
    node: ConfigNode,
}

/// Parses Apache httpd syntax into a tree of `directive` nodes (value = directive
/// name, `arg` children = arguments) and section nodes (`<Name args>` blocks).
pub fn parse_httpd(content: &str) -> Result<ConfigTree, SyntaxError> {
    let mut top: Vec<ConfigNode> = Vec::new();
    let mut stack: Vec<OpenSection> = Vec::new();

    for (lineno, line) in logical_lines(content) {
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if let Some(rest) = text.strip_prefix("</") {
            let inner = rest
                .strip_suffix('>')
                .ok_or_else(|| SyntaxError::new(lineno, "closing tag without `>`"))?
                .trim();
            let open = stack
                .pop()
                .ok_or_else(|| SyntaxError::new(lineno, format!("unexpected </{inner}>")))?;
            if !open.name.eq_ignore_ascii_case(inner) {
                return Err(SyntaxError::new(
                    lineno,
                    format!("</{inner}> closes <{}> opened on line {}", open.name, open.line),
                ));
            }
            match stack.last_mut() {
                Some(parent) => parent.node.children.push(open.node),
                None => top.push(open.node),
            }
        } else if let Some(rest) = text.strip_prefix('<') {
            let inner = rest
                .strip_suffix('>')
                .ok_or_else(|| SyntaxError::new(lineno, "section tag without `>`"))?;
            let words = split_words(inner).map_err(|m| SyntaxError::new(lineno, m))?;
            let (name, args) = words
                .split_first()
                .ok_or_else(|| SyntaxError::new(lineno, "empty section tag"))?;
            if !name_re().is_match(name) {
                return Err(SyntaxError::new(lineno, format!("invalid section name `{name}`")));
            }
            let node = ConfigNode::new(name.clone(), None).with_children(arg_nodes(args));
            stack.push(OpenSection {
                name: name.clone(),
                line: lineno,
                node,
            });
        } else {
            let words = split_words(text).map_err(|m| SyntaxError::new(lineno, m))?;
            let (name, args) = words.split_first().expect("non-empty line has a word");
            if !name_re().is_match(name) {
                return Err(SyntaxError::new(lineno, format!("invalid directive name `{name}`")));
            }
            let node = ConfigNode::new(DIRECTIVE_KEY, Some(name.clone())).with_children(arg_nodes(args));
            match stack.last_mut() {
                Some(parent) => parent.node.children.push(node),
                None => top.push(node),
            }
        }
    }
    if let Some(open) = stack.pop() {
        return Err(SyntaxError::new(open.line, format!("<{}> is never closed", open.name)));
    }
    Ok(ConfigTree::new(ConfigFormat::Httpd, "", top))
}
