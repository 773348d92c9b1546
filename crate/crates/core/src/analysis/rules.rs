use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{InferredType, InstanceRecords, ParamKey, ValueType};
use crate::defaults;
use crate::exec::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleTemplate {
    /// Two same-typed keys share a value.
    EqualToSameTypeEntry,
    /// A value of the first key is a proper substring of a value of the second.
    SubstringOfEntry,
    /// Every value of the key is one seen in some other instance.
    ValueInSet,
}

impl RuleTemplate {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleTemplate::EqualToSameTypeEntry => "equal_to_same_type_entry",
            RuleTemplate::SubstringOfEntry => "substring_of_entry",
            RuleTemplate::ValueInSet => "value_in_set",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleThresholds {
    pub support_min: f64,
    pub confidence_min: f64,
}

impl Default for RuleThresholds {
    fn default() -> Self {
        Self {
            support_min: defaults::SUPPORT_MIN,
            confidence_min: defaults::CONFIDENCE_MIN,
        }
    }
}

impl RuleThresholds {
    pub fn accepts(&self, support_count: u64, holds_count: u64, instance_total: u64) -> bool {
        support_count > 0
            && instance_total > 0
            && support_count as f64 / instance_total as f64 >= self.support_min
            && holds_count as f64 / support_count as f64 >= self.confidence_min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferredRule {
    pub template: RuleTemplate,
    pub keys: Vec<ParamKey>,
    /// Admissible values, for `value_in_set` only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub allowed: Vec<String>,
    pub support: f64,
    pub confidence: f64,
    /// Instances containing every involved key.
    pub support_count: u64,
    /// Of those, instances where the rule holds.
    pub holds_count: u64,
    pub instance_total: u64,
}

type ValueSets<'a> = BTreeMap<ParamKey, BTreeSet<&'a str>>;

pub(crate) fn shares_value(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> bool {
    a.iter().any(|v| !v.is_empty() && b.contains(v))
}

pub(crate) fn has_proper_substring(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> bool {
    a.iter()
        .any(|x| !x.is_empty() && b.iter().any(|y| y.len() > x.len() && y.contains(x)))
}

#[derive(Debug, Clone)]
struct Candidate {
    template: RuleTemplate,
    keys: Vec<ParamKey>,
}

fn candidates(types: &[InferredType]) -> Vec<Candidate> {
    let mut by_type: BTreeMap<ValueType, Vec<&ParamKey>> = BTreeMap::new();
    for t in types {
        by_type.entry(t.value_type).or_default().push(&t.key);
    }
    let mut out = Vec::new();
    for (ty, keys) in &mut by_type {
        keys.sort();
        keys.dedup();
        match ty {
            ValueType::Boolean | ValueType::EnumSmall => {
                out.extend(keys.iter().map(|k| Candidate {
                    template: RuleTemplate::ValueInSet,
                    keys: vec![(*k).clone()],
                }));
            }
            _ => {
                for (i, a) in keys.iter().enumerate() {
                    for b in &keys[i + 1..] {
                        out.push(Candidate {
                            template: RuleTemplate::EqualToSameTypeEntry,
                            keys: vec![(*a).clone(), (*b).clone()],
                        });
                    }
                }
                if matches!(ty, ValueType::FilePath | ValueType::Uri) {
                    for a in keys.iter() {
                        for b in keys.iter().filter(|b| *b != a) {
                            out.push(Candidate {
                                template: RuleTemplate::SubstringOfEntry,
                                keys: vec![(*a).clone(), (*b).clone()],
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn evaluate(candidate: &Candidate, sets: &[ValueSets<'_>], thresholds: &RuleThresholds) -> Option<InferredRule> {
    let total = sets.len() as u64;
    let mut support = 0;
    let mut holds = 0;
    let mut allowed = BTreeSet::new();
    match candidate.template {
        RuleTemplate::EqualToSameTypeEntry | RuleTemplate::SubstringOfEntry => {
            let (a, b) = (&candidate.keys[0], &candidate.keys[1]);
            for s in sets {
                let (Some(va), Some(vb)) = (s.get(a), s.get(b)) else {
                    continue;
                };
                support += 1;
                let ok = if candidate.template == RuleTemplate::EqualToSameTypeEntry {
                    shares_value(va, vb)
                } else {
                    has_proper_substring(va, vb)
                };
                holds += u64::from(ok);
            }
        }
        RuleTemplate::ValueInSet => {
            let k = &candidate.keys[0];
            let mut seen_in: BTreeMap<&str, u64> = BTreeMap::new();
            for s in sets {
                for v in s.get(k).into_iter().flatten() {
                    *seen_in.entry(v).or_insert(0) += 1;
                }
            }
            for s in sets {
                let Some(vs) = s.get(k) else { continue };
                support += 1;
                holds += u64::from(vs.iter().all(|v| seen_in[v] >= 2));
            }
            allowed = seen_in.keys().map(|v| v.to_string()).collect();
        }
    }
    thresholds.accepts(support, holds, total).then(|| InferredRule {
        template: candidate.template,
        keys: candidate.keys.clone(),
        allowed: allowed.into_iter().collect(),
        support: support as f64 / total as f64,
        confidence: holds as f64 / support as f64,
        support_count: support,
        holds_count: holds,
        instance_total: total,
    })
}

/// Enumerates every template instantiation over the typed keys and keeps
/// those meeting both thresholds.
pub fn infer_rules(
    exec: Execution,
    corpus: &[InstanceRecords],
    types: &[InferredType],
    thresholds: &RuleThresholds,
) -> Vec<InferredRule> {
    let sets: Vec<ValueSets<'_>> = corpus.iter().map(InstanceRecords::value_sets).collect();
    let cands = candidates(types);
    exec::map(exec, &cands, |c| evaluate(c, &sets, thresholds))
        .into_iter()
        .flatten()
        .collect()
}
