//! Helpers shared by the integration tests.
#![allow(dead_code)]

use confex_core::analysis::InstanceRecords;
use confex_core::corpus::InstanceSnapshot;
use confex_core::disambiguate::{disambiguate, flatten, ConfigRecord, RuleSet};
use confex_core::envdata::{collect_environment, env_to_records};
use confex_core::parsers::Lens;
use confex_core::synth::InstanceTruth;

/// Records of one file, parsed with its application's lens and built-in rules.
pub fn file_records(application: &str, path: &str, text: &str) -> Vec<ConfigRecord> {
    let lens = Lens::for_application(application).expect("known application");
    let tree = lens.parse(text, path).unwrap_or_else(|e| panic!("{path}: {e}\n{text}"));
    let tree = disambiguate(&tree, &RuleSet::builtin(application)).expect("built-in rules cover the tree");
    flatten(&tree, application, path)
}

/// Extraction using the generator's labels instead of discovery.
pub fn truth_records(snapshot: &InstanceSnapshot, truth: &InstanceTruth) -> InstanceRecords {
    let mut records = Vec::new();
    for p in truth.planted.iter().filter(|p| p.active) {
        let text = snapshot
            .entry(&p.path)
            .and_then(|e| e.text())
            .expect("planted file has content");
        records.extend(file_records(&p.application, &p.path, &text));
    }
    records.extend(env_to_records(&collect_environment(snapshot)));
    InstanceRecords {
        instance_id: truth.instance_id.clone(),
        records,
    }
}
