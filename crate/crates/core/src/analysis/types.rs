use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{is_placeholder, HistogramModel, ParamKey, PathOracle};

/// Most distinct values a key may take and still count as an enumeration.
pub const ENUM_SMALL_MAX: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueType {
    Boolean,
    Port,
    IpAddress,
    Integer,
    FilePath,
    Uri,
    EnumSmall,
}

impl ValueType {
    /// Tried in this order; the first type every value satisfies wins.
    pub const CANDIDATES: [ValueType; 7] = [
        ValueType::Boolean,
        ValueType::Port,
        ValueType::IpAddress,
        ValueType::Integer,
        ValueType::FilePath,
        ValueType::Uri,
        ValueType::EnumSmall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::Boolean => "boolean",
            ValueType::Port => "port",
            ValueType::IpAddress => "ip_address",
            ValueType::Integer => "integer",
            ValueType::FilePath => "file_path",
            ValueType::Uri => "uri",
            ValueType::EnumSmall => "enum_small",
        }
    }

    /// Shape check on the literal text.
    pub fn syntax_ok(self, value: &str) -> bool {
        if is_placeholder(value) {
            return false;
        }
        match self {
            ValueType::Boolean => BOOLEANS.contains(&value.to_ascii_lowercase().as_str()),
            ValueType::Port => !value.is_empty() && value.bytes().all(|b| b.is_ascii_digit()),
            ValueType::IpAddress => ip_re().is_match(value),
            ValueType::Integer => integer_re().is_match(value),
            ValueType::FilePath => value.starts_with('/') && !value.contains('\\'),
            ValueType::Uri => uri_re().is_match(value),
            ValueType::EnumSmall => token_re().is_match(value),
        }
    }

    /// Meaning check, given the value already passed [`Self::syntax_ok`].
    pub fn semantic_ok(self, value: &str, paths: &dyn PathOracle) -> bool {
        match self {
            ValueType::Port => value.parse::<u32>().is_ok_and(|p| p <= 65535),
            ValueType::IpAddress => value.split('.').all(|o| o.parse::<u32>().is_ok_and(|o| o <= 255)),
            ValueType::Integer => {
                let digits = value
                    .trim_start_matches(['+', '-'])
                    .trim_end_matches(|c: char| c.is_ascii_alphabetic());
                digits.parse::<u64>().is_ok()
            }
            ValueType::FilePath => paths.exists(value),
            ValueType::Uri => value.split_once("://").is_some_and(|(_, rest)| !rest.starts_with('/')),
            ValueType::Boolean | ValueType::EnumSmall => true,
        }
    }

    pub fn accepts(self, value: &str, paths: &dyn PathOracle) -> bool {
        self.syntax_ok(value) && self.semantic_ok(value, paths)
    }
}

const BOOLEANS: [&str; 6] = ["on", "off", "yes", "no", "true", "false"];

fn ip_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\d{1,3}(\.\d{1,3}){3}$").unwrap())
}

fn integer_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[+-]?\d+[KMGkmg]?$").unwrap())
}

fn uri_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[A-Za-z][A-Za-z0-9+.\-]*://\S+$").unwrap())
}

fn token_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[A-Za-z0-9_.\-]+$").unwrap())
}

/// Ports are only considered for keys whose name says so.
fn port_hint(key: &ParamKey) -> bool {
    let last = key.key.rsplit('/').next().unwrap_or("").to_ascii_lowercase();
    last.contains("port") || last == "listen"
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferredType {
    pub key: ParamKey,
    #[serde(rename = "type")]
    pub value_type: ValueType,
    /// Non-empty observations the type was checked against.
    pub evidence_count: u64,
}

/// Shannon entropy, in bits, of a count distribution.
pub fn entropy_bits(counts: impl IntoIterator<Item = u64>) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

/// Types keys whose value distribution is varied enough (entropy at or above
/// `entropy_threshold`) and whose every non-empty value passes both checks.
pub fn infer_types(model: &HistogramModel, entropy_threshold: f64, paths: &dyn PathOracle) -> Vec<InferredType> {
    let mut out = Vec::new();
    for (key, h) in &model.histograms {
        if entropy_bits(h.counts.values().copied()) < entropy_threshold {
            continue;
        }
        let values: Vec<(&str, u64)> = h
            .counts
            .iter()
            .filter(|(v, _)| !v.is_empty())
            .map(|(v, c)| (v.as_str(), *c))
            .collect();
        if values.is_empty() {
            continue;
        }
        let found = ValueType::CANDIDATES.into_iter().find(|&t| match t {
            ValueType::Port if !port_hint(key) => false,
            ValueType::EnumSmall if values.len() > ENUM_SMALL_MAX => false,
            _ => values.iter().all(|(v, _)| t.accepts(v, paths)),
        });
        if let Some(value_type) = found {
            out.push(InferredType {
                key: key.clone(),
                value_type,
                evidence_count: values.iter().map(|(_, c)| c).sum(),
            });
        }
    }
    out
}
