//! One instance end to end: active filter → label → parse → disambiguate →
//! flatten, plus environment records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::active::{ActiveError, ActiveSelection};
use crate::corpus::InstanceSnapshot;
use crate::disambiguate::{disambiguate, flatten, ConfigRecord, RuleSet};
use crate::discovery::{classify_entry, LabelOptions, LabelResult, Vocabulary};
use crate::envdata::{collect_environment, env_to_records};
use crate::exec::{self, Execution};
use crate::parsers::Lens;

#[derive(Debug, Clone)]
pub struct Extractor {
    pub vocabularies: Vec<Vocabulary>,
    /// Per-application overrides of the built-in rule sets.
    pub rules: BTreeMap<String, RuleSet>,
    pub label: LabelOptions,
    pub active: ActiveSelection,
    pub include_environment: bool,
    pub exec: Execution,
}

impl Extractor {
    pub fn new(vocabularies: Vec<Vocabulary>) -> Self {
        Self {
            vocabularies,
            rules: BTreeMap::new(),
            label: LabelOptions::default(),
            active: ActiveSelection::None,
            include_environment: true,
            exec: Execution::default(),
        }
    }

    fn rules_for(&self, application: &str) -> RuleSet {
        self.rules
            .get(application)
            .cloned()
            .unwrap_or_else(|| RuleSet::builtin(application))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionSummary {
    pub files_total: usize,
    pub files_considered: usize,
    pub labeled: usize,
    pub parsed: usize,
    pub records: usize,
    /// Per-file problems that did not stop the instance.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceExtraction {
    pub instance_id: String,
    pub records: Vec<ConfigRecord>,
    /// Labeled files only.
    pub labels: Vec<LabelResult>,
    pub summary: ExtractionSummary,
}

enum FileOutcome {
    Skipped,
    Labeled(LabelResult, Result<Vec<ConfigRecord>, String>),
}

pub fn extract_instance(snapshot: &InstanceSnapshot, extractor: &Extractor) -> Result<InstanceExtraction, ActiveError> {
    let active = extractor.active.apply(snapshot)?;
    let considered: Vec<_> = snapshot.entries().filter(|e| active.contains(&e.path)).collect();

    let outcomes = exec::map(extractor.exec, &considered, |entry| {
        let (label, tree) = classify_entry(entry, &extractor.vocabularies, &extractor.label);
        let Some(app) = label.application.clone() else {
            return FileOutcome::Skipped;
        };
        let tree = match tree {
            Some(t) => Ok(t),
            None => {
                let text = entry.text().unwrap_or_default();
                match Lens::for_application(&app) {
                    Some(lens) => lens.parse(&text, &entry.path).map_err(|e| e.to_string()),
                    None => Err(format!("no parser for `{app}`")),
                }
            }
        };
        let records = tree.and_then(|t| {
            disambiguate(&t, &extractor.rules_for(&app))
                .map(|d| flatten(&d, &app, &entry.path))
                .map_err(|e| e.to_string())
        });
        FileOutcome::Labeled(label, records)
    });

    let mut summary = ExtractionSummary {
        files_total: snapshot.len(),
        files_considered: considered.len(),
        failures: active.warnings.clone(),
        ..ExtractionSummary::default()
    };
    let mut records = Vec::new();
    let mut labels = Vec::new();
    for outcome in outcomes {
        let FileOutcome::Labeled(label, result) = outcome else {
            continue;
        };
        summary.labeled += 1;
        match result {
            Ok(r) => {
                summary.parsed += 1;
                records.extend(r);
            }
            Err(e) => summary.failures.push(format!("{}: {e}", label.path)),
        }
        labels.push(label);
    }
    if extractor.include_environment {
        records.extend(env_to_records(&collect_environment(snapshot)));
    }
    summary.records = records.len();
    Ok(InstanceExtraction {
        instance_id: snapshot.instance_id().to_string(),
        records,
        labels,
        summary,
    })
}
