use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{AnalysisError, InstanceRecords, ParamKey};
use crate::exec::{self, Execution};

/// Observed values of one parameter. Each instance contributes at most one
/// observation per distinct value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueHistogram {
    pub counts: BTreeMap<String, u64>,
    pub instance_count: u64,
}

impl ValueHistogram {
    /// Total observations.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, value: &str) -> u64 {
        self.counts.get(value).copied().unwrap_or(0)
    }

    /// Share of observations taken by the most frequent value.
    pub fn dominant_share(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.counts.values().max().copied().unwrap_or(0) as f64 / total as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramModel {
    #[serde(with = "as_list")]
    pub histograms: BTreeMap<ParamKey, ValueHistogram>,
    /// Ids of the instances the model was built from.
    pub instances: BTreeSet<String>,
}

impl HistogramModel {
    pub fn get(&self, key: &ParamKey) -> Option<&ValueHistogram> {
        self.histograms.get(key)
    }

    pub fn len(&self) -> usize {
        self.histograms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histograms.is_empty()
    }

    fn of_instance(instance: &InstanceRecords) -> Self {
        let mut model = HistogramModel::default();
        model.instances.insert(instance.instance_id.clone());
        for (key, values) in instance.value_sets() {
            let h = model.histograms.entry(key).or_default();
            h.instance_count = 1;
            for v in values {
                h.counts.insert(v.to_string(), 1);
            }
        }
        model
    }

    /// Associative, commutative combination of two models.
    pub fn merge(mut self, other: HistogramModel) -> HistogramModel {
        for (key, h) in other.histograms {
            let mine = self.histograms.entry(key).or_default();
            mine.instance_count += h.instance_count;
            for (v, c) in h.counts {
                *mine.counts.entry(v).or_insert(0) += c;
            }
        }
        self.instances.extend(other.instances);
        self
    }

    /// The model with one instance's contribution subtracted.
    pub fn without(&self, instance: &InstanceRecords) -> HistogramModel {
        let mut out = self.clone();
        if !out.instances.remove(&instance.instance_id) {
            return out;
        }
        for (key, values) in instance.value_sets() {
            let Some(h) = out.histograms.get_mut(&key) else {
                continue;
            };
            h.instance_count = h.instance_count.saturating_sub(1);
            for v in values {
                if let Some(c) = h.counts.get_mut(v) {
                    *c -= 1;
                    if *c == 0 {
                        h.counts.remove(v);
                    }
                }
            }
            if h.instance_count == 0 {
                out.histograms.remove(&key);
            }
        }
        out
    }
}

/// JSON object keys must be strings, so the map is stored as a list.
mod as_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{ParamKey, ValueHistogram};

    #[derive(Serialize, Deserialize)]
    struct Row {
        #[serde(flatten)]
        key: ParamKey,
        #[serde(flatten)]
        histogram: ValueHistogram,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<ParamKey, ValueHistogram>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Row> = map
            .iter()
            .map(|(k, h)| Row {
                key: k.clone(),
                histogram: h.clone(),
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<ParamKey, ValueHistogram>, D::Error> {
        let rows = Vec::<Row>::deserialize(d)?;
        Ok(rows.into_iter().map(|r| (r.key, r.histogram)).collect())
    }
}

/// Histogram per parameter over the corpus, reduced in parallel.
pub fn build_histograms(exec: Execution, corpus: &[InstanceRecords]) -> Result<HistogramModel, AnalysisError> {
    if corpus.is_empty() {
        return Err(AnalysisError::EmptyCorpus);
    }
    Ok(exec::map_reduce(
        exec,
        corpus,
        HistogramModel::of_instance,
        HistogramModel::default,
        HistogramModel::merge,
    ))
}
