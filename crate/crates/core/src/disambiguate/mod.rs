//! Rule-driven rewriting of intermediate trees so that every key names one
//! parameter, independent of where in the file the entry sits.

mod records;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::defaults::FORMAT_VERSION;
use crate::parsers::{ConfigFormat, ConfigNode, ConfigTree, Lens, ARG_KEY, DIRECTIVE_KEY};

pub use records::{
    escape_segment, flatten, flatten_raw, key_stability_check, read_records, split_key, unescape_segment,
    write_records, ConfigRecord, RecordFileError,
};

/// Multi-argument httpd commands whose first argument belongs in the key.
pub const HTTPD_COMMANDS: [&str; 15] = [
    "Redirect",
    "RedirectMatch",
    "RedirectPermanent",
    "RedirectTemp",
    "Alias",
    "AliasMatch",
    "ScriptAlias",
    "ScriptAliasMatch",
    "SetEnv",
    "SetEnvIf",
    "RewriteRule",
    "RewriteCond",
    "Header",
    "RequestHeader",
    "ErrorDocument",
];

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("no rule matches node `{0}`")]
    Unmatched(String),
    #[error("rule {index}: invalid key pattern: {source}")]
    Pattern {
        index: usize,
        #[source]
        source: regex::Error,
    },
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}: malformed rule file: {1}")]
    Format(PathBuf, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleAction {
    /// `directive (Name)` + args → `Name (args)`.
    PromoteValueToKey,
    /// `directive (Name)` + args → `Name arg1 (rest)`.
    CommandKeyWithFirstArg,
    /// Valueless section: key gains its args, children are kept.
    SectionKeyWithArgs,
    Passthrough,
    Drop,
}

/// Node predicate; absent fields match anything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMatch {
    /// Regex the whole key must match.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    /// The node's value must be one of these.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_value: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_children: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformRule {
    #[serde(rename = "match", default)]
    pub matcher: NodeMatch,
    pub action: RuleAction,
    /// Supported: `separator` (default a single space) used when joining args.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
}

impl TransformRule {
    pub fn new(matcher: NodeMatch, action: RuleAction) -> Self {
        Self {
            matcher,
            action,
            parameters: BTreeMap::new(),
        }
    }

    fn separator(&self) -> &str {
        self.parameters.get("separator").map(String::as_str).unwrap_or(" ")
    }
}

#[derive(Serialize, Deserialize)]
struct StoredRuleSet {
    format_version: u32,
    application: String,
    rules: Vec<TransformRule>,
}

/// Ordered rules for one application; the first matching rule wins.
#[derive(Debug, Clone)]
pub struct RuleSet {
    application: String,
    rules: Vec<TransformRule>,
    patterns: Vec<Option<Regex>>,
}

impl RuleSet {
    pub fn new(application: impl Into<String>, rules: Vec<TransformRule>) -> Result<Self, TransformError> {
        let patterns = rules
            .iter()
            .enumerate()
            .map(|(index, r)| {
                r.matcher
                    .key
                    .as_deref()
                    .map(|p| {
                        Regex::new(&format!("^(?:{p})$")).map_err(|source| TransformError::Pattern { index, source })
                    })
                    .transpose()
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            application: application.into(),
            rules,
            patterns,
        })
    }

    pub fn application(&self) -> &str {
        &self.application
    }

    pub fn rules(&self) -> &[TransformRule] {
        &self.rules
    }

    /// The shipped rules for an application, chosen by its parser format.
    pub fn builtin(application: &str) -> Self {
        // compiled patterns are shared between clones, so cache per application
        static CACHE: OnceLock<Mutex<HashMap<String, RuleSet>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut cache = cache.lock().unwrap_or_else(|e| e.into_inner());
        cache
            .entry(application.to_string())
            .or_insert_with(|| Self::compile_builtin(application))
            .clone()
    }

    fn compile_builtin(application: &str) -> Self {
        let format = Lens::for_application(application).map(|l| l.format);
        let rules = match format {
            Some(ConfigFormat::Httpd) => httpd_rules(),
            Some(ConfigFormat::Nginx) => vec![
                TransformRule::new(
                    NodeMatch {
                        has_value: Some(false),
                        has_children: Some(true),
                        ..NodeMatch::default()
                    },
                    RuleAction::SectionKeyWithArgs,
                ),
                TransformRule::new(NodeMatch::default(), RuleAction::Passthrough),
            ],
            _ => vec![TransformRule::new(NodeMatch::default(), RuleAction::Passthrough)],
        };
        Self::new(application, rules).expect("builtin rules compile")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let stored: StoredRuleSet = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if stored.format_version != FORMAT_VERSION {
            return Err(format!("unsupported format_version {}", stored.format_version));
        }
        Self::new(stored.application, stored.rules).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        let stored = StoredRuleSet {
            format_version: FORMAT_VERSION,
            application: self.application.clone(),
            rules: self.rules.clone(),
        };
        serde_json::to_string_pretty(&stored).expect("serializable")
    }

    pub fn load(path: &Path) -> Result<Self, TransformError> {
        let text = std::fs::read_to_string(path).map_err(|e| TransformError::Io(path.into(), e))?;
        Self::from_json(&text).map_err(|m| TransformError::Format(path.into(), m))
    }

    fn find(&self, node: &ConfigNode) -> Option<&TransformRule> {
        self.rules.iter().zip(&self.patterns).find_map(|(rule, pattern)| {
            let m = &rule.matcher;
            let ok = pattern.as_ref().is_none_or(|p| p.is_match(&node.key))
                && (m.values.is_empty() || node.value.as_ref().is_some_and(|v| m.values.contains(v)))
                && m.has_value.is_none_or(|h| h == node.value.is_some())
                && m.has_children.is_none_or(|h| h == !node.children.is_empty());
            ok.then_some(rule)
        })
    }
}

fn httpd_rules() -> Vec<TransformRule> {
    vec![
        TransformRule::new(
            NodeMatch {
                key: Some(DIRECTIVE_KEY.to_string()),
                values: HTTPD_COMMANDS.iter().map(|c| c.to_string()).collect(),
                ..NodeMatch::default()
            },
            RuleAction::CommandKeyWithFirstArg,
        ),
        TransformRule::new(
            NodeMatch {
                key: Some(DIRECTIVE_KEY.to_string()),
                has_value: Some(true),
                ..NodeMatch::default()
            },
            RuleAction::PromoteValueToKey,
        ),
        TransformRule::new(
            NodeMatch {
                has_value: Some(false),
                ..NodeMatch::default()
            },
            RuleAction::SectionKeyWithArgs,
        ),
    ]
}

/// Applies `rules` top-down. The result's ordinals are recomputed.
pub fn disambiguate(tree: &ConfigTree, rules: &RuleSet) -> Result<ConfigTree, TransformError> {
    let mut children = Vec::with_capacity(tree.root.children.len());
    for child in &tree.root.children {
        if let Some(node) = transform(child, rules, "")? {
            children.push(node);
        }
    }
    Ok(ConfigTree::new(tree.format, tree.source_path.clone(), children))
}

fn join_nonempty(parts: &[&str], sep: &str) -> Option<String> {
    (!parts.is_empty()).then(|| parts.join(sep))
}

fn transform(node: &ConfigNode, rules: &RuleSet, parent: &str) -> Result<Option<ConfigNode>, TransformError> {
    let here = format!("{parent}/{}[{}]", node.key, node.ordinal);
    let rule = rules
        .find(node)
        .ok_or_else(|| TransformError::Unmatched(here.clone()))?;
    let sep = rule.separator();
    let args: Vec<&str> = node.arg_values().collect();
    let rest: Vec<&ConfigNode> = node.children.iter().filter(|c| c.key != ARG_KEY).collect();

    let (key, value, body): (String, Option<String>, Vec<&ConfigNode>) = match rule.action {
        RuleAction::Drop => return Ok(None),
        RuleAction::Passthrough => (node.key.clone(), node.value.clone(), node.children.iter().collect()),
        RuleAction::PromoteValueToKey => {
            let name = node.value.clone().unwrap_or_else(|| node.key.clone());
            (name, join_nonempty(&args, sep), rest)
        }
        RuleAction::CommandKeyWithFirstArg => {
            let name = node.value.as_deref().unwrap_or(&node.key);
            let key = match args.first() {
                Some(first) => format!("{name}{sep}{first}"),
                None => name.to_string(),
            };
            (key, join_nonempty(args.get(1..).unwrap_or(&[]), sep), rest)
        }
        RuleAction::SectionKeyWithArgs => {
            let key = match join_nonempty(&args, sep) {
                Some(a) => format!("{}{sep}{a}", node.key),
                None => node.key.clone(),
            };
            (key, node.value.clone(), rest)
        }
    };
    let mut out = ConfigNode::new(key, value);
    for child in body {
        if let Some(c) = transform(child, rules, &here)? {
            out.children.push(c);
        }
    }
    Ok(Some(out))
}
