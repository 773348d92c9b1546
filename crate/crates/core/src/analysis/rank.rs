use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, HistogramModel, InstanceRecords, ParamKey, ValueHistogram};
use crate::disambiguate::ConfigRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suspect {
    pub record: ConfigRecord,
    pub score: f64,
}

/// Records of one instance, most suspicious first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspectRanking {
    pub instance_id: String,
    pub suspects: Vec<Suspect>,
}

impl SuspectRanking {
    /// 1-based rank of the first suspect satisfying `pred`.
    pub fn rank_of(&self, pred: impl Fn(&ConfigRecord) -> bool) -> Option<usize> {
        self.suspects.iter().position(|s| pred(&s.record)).map(|i| i + 1)
    }

    pub fn truncate(&mut self, n: usize) {
        self.suspects.truncate(n);
    }
}

/// `(n - c + 1) / (n + m)` where `n` is the number of observations of the
/// key, `c` those equal to `value`, and `m` the distinct values with `value`
/// counted if unseen. A key without observations scores 0.
pub fn peerpressure_score(histogram: Option<&ValueHistogram>, value: &str) -> f64 {
    let Some(h) = histogram else { return 0.0 };
    let n = h.total();
    if n == 0 {
        return 0.0;
    }
    let c = h.count(value);
    let m = h.distinct() as u64 + u64::from(c == 0);
    (n - c + 1) as f64 / (n + m) as f64
}

fn order(a: &Suspect, b: &Suspect) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.record.key.cmp(&b.record.key))
        .then_with(|| a.record.entry_ordinal.cmp(&b.record.entry_ordinal))
        .then_with(|| a.record.application.cmp(&b.record.application))
        .then_with(|| a.record.file_path.cmp(&b.record.file_path))
        .then_with(|| a.record.value.cmp(&b.record.value))
}

/// Ranks every record of `test` against a model that must not contain it.
pub fn peerpressure_rank(test: &InstanceRecords, model: &HistogramModel) -> Result<SuspectRanking, AnalysisError> {
    if model.instances.contains(&test.instance_id) {
        return Err(AnalysisError::LeaveOneOutViolation(test.instance_id.clone()));
    }
    let mut suspects: Vec<Suspect> = test
        .records
        .iter()
        .map(|r| Suspect {
            score: peerpressure_score(model.get(&ParamKey::of(r)), &r.value),
            record: r.clone(),
        })
        .collect();
    suspects.sort_by(order);
    Ok(SuspectRanking {
        instance_id: test.instance_id.clone(),
        suspects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::build_histograms;
    use crate::analysis::testutil::inst;
    use crate::exec::Execution;

    fn hist(pairs: &[(&str, u64)]) -> ValueHistogram {
        ValueHistogram {
            counts: pairs.iter().map(|(v, c)| (v.to_string(), *c)).collect(),
            instance_count: pairs.iter().map(|p| p.1).sum(),
        }
    }

    #[test]
    fn conforming_value() {
        let h = hist(&[("80", 99)]);
        assert_eq!(peerpressure_score(Some(&h), "80"), 1.0 / 100.0);
    }

    #[test]
    fn unseen_value() {
        let h = hist(&[("80", 99)]);
        assert_eq!(peerpressure_score(Some(&h), "8080"), 100.0 / 101.0);
    }

    #[test]
    fn unseen_key() {
        assert_eq!(peerpressure_score(None, "x"), 0.0);
        assert_eq!(peerpressure_score(Some(&ValueHistogram::default()), "x"), 0.0);
    }

    #[test]
    fn outlier_ranks_first_and_ties_break_by_key() {
        let corpus: Vec<_> = (0..20)
            .map(|i| {
                inst(
                    &format!("p{i}"),
                    &[("Listen", "80"), ("User", "daemon"), ("Group", "daemon")],
                )
            })
            .collect();
        let model = build_histograms(Execution::Sequential, &corpus).unwrap();
        let test = inst("t", &[("User", "daemon"), ("Listen", "8o"), ("Group", "daemon")]);
        let r = peerpressure_rank(&test, &model).unwrap();
        assert_eq!(r.suspects[0].record.key, "Listen");
        assert_eq!(r.suspects[1].record.key, "Group");
        assert_eq!(r.suspects[2].record.key, "User");
        assert!(r.suspects.windows(2).all(|w| w[0].score >= w[1].score));
        assert_eq!(r.rank_of(|rec| rec.value == "8o"), Some(1));
    }

    #[test]
    fn overlapping_model_rejected() {
        let corpus = vec![inst("a", &[("Listen", "80")])];
        let model = build_histograms(Execution::Sequential, &corpus).unwrap();
        assert!(matches!(
            peerpressure_rank(&corpus[0], &model),
            Err(AnalysisError::LeaveOneOutViolation(_))
        ));
        assert!(peerpressure_rank(&corpus[0], &model.without(&corpus[0])).is_ok());
    }

    #[test]
    fn empty_model_scores_zero() {
        let r = peerpressure_rank(&inst("a", &[("Listen", "80"), ("X", "y")]), &HistogramModel::default()).unwrap();
        assert!(r.suspects.iter().all(|s| s.score == 0.0));
    }
}
