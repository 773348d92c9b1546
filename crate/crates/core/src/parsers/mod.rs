//! Native configuration parsers producing hierarchy-preserving intermediate trees.
//!
//! Each parser doubles as the syntax gate of the discovery phase: a file is only
//! labeled as an application's configuration file when the application's parser
//! accepts it.

mod httpd;
mod ini;
mod nginx;
mod table;

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use httpd::parse_httpd;
pub use ini::parse_ini;
pub use nginx::parse_nginx;
pub use table::{parse_colon_table, parse_fstab_table, GROUP_SCHEMA, PASSWD_SCHEMA};

/// Key of the synthetic root node of every tree.
pub const ROOT_KEY: &str = "(root)";

/// Key used for positional argument children (httpd directives, section headers).
pub const ARG_KEY: &str = "arg";

/// Key used for httpd directive nodes before disambiguation.
pub const DIRECTIVE_KEY: &str = "directive";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigFormat {
    Httpd,
    Nginx,
    Ini,
    FstabTable,
    ColonTable,
}

impl ConfigFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfigFormat::Httpd => "httpd",
            ConfigFormat::Nginx => "nginx",
            ConfigFormat::Ini => "ini",
            ConfigFormat::FstabTable => "fstab_table",
            ConfigFormat::ColonTable => "colon_table",
        }
    }
}

impl fmt::Display for ConfigFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One node of an intermediate configuration tree.
///
/// `ordinal` is the 1-based position of the node among its siblings that share
/// the same key, mirroring the `key[n]` addressing of lens-based parsers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigNode {
    pub key: String,
    pub value: Option<String>,
    pub children: Vec<ConfigNode>,
    pub ordinal: usize,
}

impl ConfigNode {
    pub fn new(key: impl Into<String>, value: Option<String>) -> Self {
        Self {
            key: key.into(),
            value,
            children: Vec::new(),
            ordinal: 1,
        }
    }

    pub fn leaf(key: impl Into<String>, value: impl Into<String>) -> Self {
        Self::new(key, Some(value.into()))
    }

    pub fn with_children(mut self, children: Vec<ConfigNode>) -> Self {
        self.children = children;
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Reassigns dense per-key ordinals to every descendant.
    pub fn renumber(&mut self) {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        let mut ordinals = Vec::with_capacity(self.children.len());
        for child in &self.children {
            let n = seen.entry(child.key.as_str()).or_insert(0);
            *n += 1;
            ordinals.push(*n);
        }
        for (child, ordinal) in self.children.iter_mut().zip(ordinals) {
            child.ordinal = ordinal;
            child.renumber();
        }
    }

    /// Leaves in pre-order.
    pub fn leaves(&self) -> Vec<&ConfigNode> {
        let mut out = Vec::new();
        collect_leaves(self, &mut out);
        out
    }

    /// Values of the `arg` children, in order.
    pub fn arg_values(&self) -> impl Iterator<Item = &str> {
        self.children
            .iter()
            .filter(|c| c.key == ARG_KEY)
            .map(|c| c.value.as_deref().unwrap_or(""))
    }
}

fn collect_leaves<'a>(node: &'a ConfigNode, out: &mut Vec<&'a ConfigNode>) {
    for child in &node.children {
        if child.is_leaf() {
            out.push(child);
        } else {
            collect_leaves(child, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigTree {
    pub root: ConfigNode,
    pub format: ConfigFormat,
    pub source_path: String,
}

impl ConfigTree {
    pub fn new(format: ConfigFormat, source_path: impl Into<String>, children: Vec<ConfigNode>) -> Self {
        let mut root = ConfigNode::new(ROOT_KEY, None).with_children(children);
        root.renumber();
        Self {
            root,
            format,
            source_path: source_path.into(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.root.children.is_empty()
    }

    /// Indented debug rendering, one node per line as `key[ordinal] (value)`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for child in &self.root.children {
            dump_node(child, 0, &mut out);
        }
        out
    }
}

fn dump_node(node: &ConfigNode, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    out.push_str(&node.key);
    out.push('[');
    out.push_str(&node.ordinal.to_string());
    out.push(']');
    if let Some(value) = &node.value {
        out.push_str(" (");
        out.push_str(value);
        out.push(')');
    }
    out.push('\n');
    for child in &node.children {
        dump_node(child, depth + 1, out);
    }
}

/// Parses the output of [`ConfigTree::dump`] back into a tree.
pub fn parse_dump(text: &str, format: ConfigFormat, source_path: &str) -> Result<ConfigTree, SyntaxError> {
    let line_re = regex::Regex::new(r"^(.*?)\[(\d+)\](?: \((.*)\))?$").expect("static regex");
    // stack of (depth, node); the root sits at depth -1
    let mut stack: Vec<(isize, ConfigNode)> = vec![(-1, ConfigNode::new(ROOT_KEY, None))];
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.is_empty() {
            continue;
        }
        let stripped = raw.trim_start_matches(' ');
        let indent = raw.len() - stripped.len();
        if indent % 2 != 0 {
            return Err(SyntaxError::new(lineno, "odd indentation"));
        }
        let depth = (indent / 2) as isize;
        let caps = line_re
            .captures(stripped)
            .ok_or_else(|| SyntaxError::new(lineno, "expected `key[ordinal] (value)`"))?;
        let ordinal: usize = caps[2].parse().map_err(|_| SyntaxError::new(lineno, "bad ordinal"))?;
        let mut node = ConfigNode::new(&caps[1], caps.get(3).map(|m| m.as_str().to_string()));
        node.ordinal = ordinal;
        while stack.last().map(|(d, _)| *d >= depth).unwrap_or(false) {
            let (_, done) = stack.pop().expect("non-empty");
            stack
                .last_mut()
                .ok_or_else(|| SyntaxError::new(lineno, "dangling node"))?
                .1
                .children
                .push(done);
        }
        let parent_depth = stack.last().map(|(d, _)| *d).unwrap_or(-1);
        if depth != parent_depth + 1 {
            return Err(SyntaxError::new(lineno, "indentation jumps more than one level"));
        }
        stack.push((depth, node));
    }
    while stack.len() > 1 {
        let (_, done) = stack.pop().expect("non-empty");
        stack.last_mut().expect("root").1.children.push(done);
    }
    let (_, root) = stack.pop().expect("root");
    Ok(ConfigTree {
        root,
        format,
        source_path: source_path.to_string(),
    })
}

/// Decodes raw file bytes, replacing invalid sequences.
pub fn decode_text(bytes: &[u8]) -> Cow<'_, str> {
    String::from_utf8_lossy(bytes)
}

/// Joins physical lines ending in `\` with their successor. Returns the
/// logical lines together with the 1-based number of their first physical line.
pub(crate) fn logical_lines(content: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (idx, line) in content.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let (start, mut buf) = pending.take().unwrap_or((idx + 1, String::new()));
        if let Some(head) = line.strip_suffix('\\') {
            buf.push_str(head);
            pending = Some((start, buf));
        } else {
            buf.push_str(line);
            out.push((start, buf));
        }
    }
    if let Some(rest) = pending {
        out.push(rest);
    }
    out
}

/// The parser (and column schema, for colon tables) used for one application.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lens {
    pub format: ConfigFormat,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schema: Vec<String>,
}

impl Lens {
    pub fn new(format: ConfigFormat) -> Self {
        Self {
            format,
            schema: Vec::new(),
        }
    }

    pub fn colon_table(schema: &[&str]) -> Self {
        Self {
            format: ConfigFormat::ColonTable,
            schema: schema.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Built-in application → lens mapping.
    pub fn for_application(application: &str) -> Option<Lens> {
        let app = application.to_ascii_lowercase();
        let lens = match app.as_str() {
            "httpd" | "apache" | "apache2" => Lens::new(ConfigFormat::Httpd),
            "nginx" => Lens::new(ConfigFormat::Nginx),
            "mysql" | "mariadb" | "php" | "ini" | "supervisord" => Lens::new(ConfigFormat::Ini),
            "fstab" => Lens::new(ConfigFormat::FstabTable),
            "passwd" | "sys.passwd" => Lens::colon_table(PASSWD_SCHEMA),
            "group" | "sys.group" => Lens::colon_table(GROUP_SCHEMA),
            _ => return None,
        };
        Some(lens)
    }

    pub fn parse(&self, content: &str, source_path: &str) -> Result<ConfigTree, SyntaxError> {
        let mut tree = match self.format {
            ConfigFormat::Httpd => parse_httpd(content)?,
            ConfigFormat::Nginx => parse_nginx(content)?,
            ConfigFormat::Ini => parse_ini(content)?,
            ConfigFormat::FstabTable => parse_fstab_table(content)?,
            ConfigFormat::ColonTable => {
                let schema: Vec<&str> = self.schema.iter().map(String::as_str).collect();
                parse_colon_table(content, &schema)?
            }
        };
        tree.source_path = source_path.to_string();
        Ok(tree)
    }
}
