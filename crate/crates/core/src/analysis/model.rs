use serde::{Deserialize, Serialize};

use super::{
    build_histograms, detect_violations, infer_rules, infer_types, peerpressure_rank, AnalysisError, HistogramModel,
    InferredRule, InferredType, InstanceRecords, PathOracle, RuleThresholds, Suspect, Violation,
};
use crate::defaults::{ENTROPY_THRESHOLD, FORMAT_VERSION};
use crate::exec::Execution;

/// Everything learned from a training corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisModel {
    pub format_version: u32,
    pub entropy_threshold: f64,
    pub thresholds: RuleThresholds,
    pub histograms: HistogramModel,
    pub types: Vec<InferredType>,
    pub rules: Vec<InferredRule>,
}

impl AnalysisModel {
    /// A model with no observations: every record scores 0.
    pub fn empty() -> Self {
        Self {
            format_version: FORMAT_VERSION,
            entropy_threshold: ENTROPY_THRESHOLD,
            thresholds: RuleThresholds::default(),
            histograms: HistogramModel::default(),
            types: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub fn build(
        exec: Execution,
        corpus: &[InstanceRecords],
        paths: &dyn PathOracle,
        entropy_threshold: f64,
        thresholds: RuleThresholds,
    ) -> Result<Self, AnalysisError> {
        let histograms = build_histograms(exec, corpus)?;
        let types = infer_types(&histograms, entropy_threshold, paths);
        let rules = infer_rules(exec, corpus, &types, &thresholds);
        Ok(Self {
            format_version: FORMAT_VERSION,
            entropy_threshold,
            thresholds,
            histograms,
            types,
            rules,
        })
    }

    /// Ranks and checks one instance. The histograms must not include it.
    pub fn report(
        &self,
        test: &InstanceRecords,
        paths: Option<&dyn PathOracle>,
        top_n: usize,
    ) -> Result<InstanceReport, AnalysisError> {
        let mut ranking = peerpressure_rank(test, &self.histograms)?;
        ranking.truncate(top_n);
        Ok(InstanceReport {
            format_version: FORMAT_VERSION,
            instance_id: test.instance_id.clone(),
            suspects: ranking.suspects,
            violations: detect_violations(test, &self.types, &self.rules, paths),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, AnalysisError> {
        #[derive(Deserialize)]
        struct Version {
            format_version: u32,
        }
        let v: Version = serde_json::from_str(text).map_err(|e| AnalysisError::Format(e.to_string()))?;
        if v.format_version != FORMAT_VERSION {
            return Err(AnalysisError::Version {
                found: v.format_version,
                expected: FORMAT_VERSION,
            });
        }
        serde_json::from_str(text).map_err(|e| AnalysisError::Format(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub format_version: u32,
    pub instance_id: String,
    pub suspects: Vec<Suspect>,
    pub violations: Vec<Violation>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::testutil::inst;
    use crate::analysis::KnownPaths;

    #[test]
    fn model_round_trip_and_version_check() {
        let corpus: Vec<_> = (0..10)
            .map(|i| {
                inst(
                    &format!("i{i}"),
                    &[("Listen", "80"), ("MaxClients", &(i * 10).to_string())],
                )
            })
            .collect();
        let m = AnalysisModel::build(
            Execution::Sequential,
            &corpus,
            &KnownPaths::new(),
            0.5,
            RuleThresholds::default(),
        )
        .unwrap();
        assert_eq!(m.types.len(), 1);
        let json = m.to_json();
        assert_eq!(AnalysisModel::from_json(&json).unwrap(), m);
        let bumped = json.replacen("\"format_version\": 1", "\"format_version\": 7", 1);
        assert!(matches!(
            AnalysisModel::from_json(&bumped),
            Err(AnalysisError::Version { found: 7, .. })
        ));
    }

    #[test]
    fn report_truncates() {
        let corpus: Vec<_> = (0..5).map(|i| inst(&format!("i{i}"), &[("A", "1")])).collect();
        let m = AnalysisModel::build(
            Execution::Sequential,
            &corpus,
            &KnownPaths::new(),
            0.5,
            RuleThresholds::default(),
        )
        .unwrap();
        let kv: Vec<(String, String)> = (0..20).map(|i| (format!("K{i}"), "v".to_string())).collect();
        let kv: Vec<(&str, &str)> = kv.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let r = m.report(&inst("t", &kv), None, 10).unwrap();
        assert_eq!(r.suspects.len(), 10);
        assert!(m.report(&corpus[0], None, 10).is_err());
    }
}
