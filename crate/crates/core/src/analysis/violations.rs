use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rules::{has_proper_substring, shares_value};
use super::{InferredRule, InferredType, InstanceRecords, ParamKey, PathOracle, RuleTemplate, ValueType};
use crate::disambiguate::ConfigRecord;

/// Template markers that should have been substituted before deployment.
pub const PLACEHOLDER_MARKERS: [&str; 3] = ["__", "{{", "}}"];

pub fn is_placeholder(value: &str) -> bool {
    PLACEHOLDER_MARKERS.iter().any(|m| value.contains(m))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    Type {
        value_type: ValueType,
    },
    Rule {
        template: RuleTemplate,
        keys: Vec<ParamKey>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub record: ConfigRecord,
    #[serde(flatten)]
    pub kind: ViolationKind,
    pub explanation: String,
}

fn type_problem(t: ValueType, value: &str, paths: Option<&dyn PathOracle>) -> Option<String> {
    if is_placeholder(value) {
        return Some(format!("`{value}` looks like an unsubstituted placeholder"));
    }
    if t == ValueType::FilePath && value.contains('\\') {
        return Some(format!("`{value}` is a backslash-separated path"));
    }
    if !t.syntax_ok(value) {
        return Some(format!("`{value}` is not a valid {}", t.as_str()));
    }
    match (t, paths) {
        (ValueType::FilePath, None) => None,
        (ValueType::FilePath, Some(p)) if !p.exists(value) => Some(format!("`{value}` does not exist")),
        (ValueType::FilePath, Some(_)) => None,
        (_, _) if !t.semantic_ok(value, &super::KnownPaths::new()) => {
            Some(format!("`{value}` is out of range for {}", t.as_str()))
        }
        _ => None,
    }
}

/// Checks one instance against inferred types and rules. File-path existence
/// is only checked when `paths` describes the instance's file system.
pub fn detect_violations(
    test: &InstanceRecords,
    types: &[InferredType],
    rules: &[InferredRule],
    paths: Option<&dyn PathOracle>,
) -> Vec<Violation> {
    let type_of: BTreeMap<&ParamKey, ValueType> = types.iter().map(|t| (&t.key, t.value_type)).collect();
    let mut by_key: BTreeMap<ParamKey, Vec<&ConfigRecord>> = BTreeMap::new();
    for r in &test.records {
        by_key.entry(ParamKey::of(r)).or_default().push(r);
    }
    let mut out = Vec::new();

    for r in &test.records {
        if r.value.is_empty() {
            continue;
        }
        let Some(&t) = type_of.get(&ParamKey::of(r)) else {
            continue;
        };
        if let Some(explanation) = type_problem(t, &r.value, paths) {
            out.push(Violation {
                record: r.clone(),
                kind: ViolationKind::Type { value_type: t },
                explanation,
            });
        }
    }

    let sets = test.value_sets();
    for rule in rules {
        let kind = || ViolationKind::Rule {
            template: rule.template,
            keys: rule.keys.clone(),
        };
        match rule.template {
            RuleTemplate::ValueInSet => {
                for r in by_key.get(&rule.keys[0]).into_iter().flatten() {
                    if rule.allowed.binary_search(&r.value).is_err() {
                        out.push(Violation {
                            record: (*r).clone(),
                            kind: kind(),
                            explanation: format!("`{}` was never observed for {}", r.value, rule.keys[0]),
                        });
                    }
                }
            }
            RuleTemplate::EqualToSameTypeEntry | RuleTemplate::SubstringOfEntry => {
                let (a, b) = (&rule.keys[0], &rule.keys[1]);
                let (Some(va), Some(vb)) = (sets.get(a), sets.get(b)) else {
                    continue;
                };
                let (holds, relation) = if rule.template == RuleTemplate::EqualToSameTypeEntry {
                    (shares_value(va, vb), "equal")
                } else {
                    (has_proper_substring(va, vb), "contain")
                };
                if !holds {
                    let record = by_key[b][0];
                    out.push(Violation {
                        record: record.clone(),
                        kind: kind(),
                        explanation: format!(
                            "{b} = `{}` does not {relation} {a} (holds in {}/{} instances)",
                            record.value, rule.holds_count, rule.support_count
                        ),
                    });
                }
            }
        }
    }
    out
}
