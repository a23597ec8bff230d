//! Metafeature-based algorithm selection: k-nearest-neighbour label
//! ranking and the average-ranking baseline.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meta_model::{ranking_from_scores, AlgoRanking, DatasetId, ScoreMap};
use crate::metafeatures::MetafeatureVector;

pub const DEFAULT_K: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct MetaExample {
    pub features: MetafeatureVector,
    pub target: AlgoRanking,
}

/// Training data of the label ranker.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetaDataset {
    examples: BTreeMap<DatasetId, MetaExample>,
}

impl MetaDataset {
    pub fn new(examples: BTreeMap<DatasetId, MetaExample>) -> Result<Self> {
        let mut iter = examples.values();
        if let Some(first) = iter.next() {
            for e in iter {
                if !e.features.same_names(&first.features) {
                    return Err(Error::invalid("metafeature names differ across datasets"));
                }
                if e.target.algorithm_set() != first.target.algorithm_set() {
                    return Err(Error::invalid("target rankings cover different algorithms"));
                }
            }
        }
        Ok(Self { examples })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &BTreeMap<DatasetId, MetaExample> {
        &self.examples
    }

    pub fn without(&self, d: &DatasetId) -> MetaDataset {
        let mut examples = self.examples.clone();
        examples.remove(d);
        MetaDataset { examples }
    }
}

/// Per-feature z-score statistics fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    names: Vec<String>,
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl Normalizer {
    /// Fits population mean and standard deviation per feature.
    pub fn fit(train: &MetaDataset) -> Result<Self> {
        if train.len() < 2 {
            return Err(Error::invalid(format!(
                "normalization needs at least 2 training datasets, got {}",
                train.len()
            )));
        }
        let rows: Vec<Vec<f64>> = train
            .examples
            .values()
            .map(|e| e.features.values().collect())
            .collect();
        let first = &train.examples.values().next().unwrap().features;
        let names: Vec<String> = first.names().map(str::to_string).collect();
        let n = rows.len() as f64;
        let mut means = vec![0.0; names.len()];
        let mut sds = vec![0.0; names.len()];
        for j in 0..names.len() {
            let mu = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mu).powi(2)).sum::<f64>() / n;
            means[j] = mu;
            sds[j] = var.sqrt();
        }
        Ok(Self { names, means, sds })
    }

    pub fn apply(&self, v: &MetafeatureVector) -> Result<Vec<f64>> {
        if !v.names().eq(self.names.iter().map(String::as_str)) {
            return Err(Error::invalid(
                "query metafeatures do not match the training names",
            ));
        }
        Ok(v.values()
            .zip(self.means.iter().zip(&self.sds))
            .map(|(x, (mu, sd))| if *sd == 0.0 { 0.0 } else { (x - mu) / sd })
            .collect())
    }
}

/// Fits a normalizer and returns it with the normalized training rows.
pub fn normalize_features(
    train: &MetaDataset,
) -> Result<(Normalizer, BTreeMap<DatasetId, Vec<f64>>)> {
    let norm = Normalizer::fit(train)?;
    let rows = train
        .examples
        .iter()
        .map(|(d, e)| Ok((d.clone(), norm.apply(&e.features)?)))
        .collect::<Result<_>>()?;
    Ok((norm, rows))
}

/// Sorts algorithms by ascending mean position across `rankings`, ties
/// lexicographic.
fn mean_rank_aggregate<'a, I>(rankings: I) -> Result<AlgoRanking>
where
    I: IntoIterator<Item = &'a AlgoRanking>,
{
    let mut totals: ScoreMap = BTreeMap::new();
    let mut count = 0usize;
    for r in rankings {
        for (i, a) in r.iter().enumerate() {
            *totals.entry(a.clone()).or_insert(0.0) += (i + 1) as f64;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("cannot aggregate zero rankings"));
    }
    // negate: ranking_from_scores puts larger values first
    let scores: ScoreMap = totals
        .into_iter()
        .map(|(a, t)| (a, -t / count as f64))
        .collect();
    ranking_from_scores(&scores)
}

/// Label ranking by the `k` nearest training datasets in z-scored
/// metafeature space (Euclidean, ties by dataset id), aggregated by mean
/// rank.
pub fn knn_label_ranking(
    train: &MetaDataset,
    query: &MetafeatureVector,
    k: usize,
) -> Result<AlgoRanking> {
    if k == 0 || k > train.len() {
        return Err(Error::invalid(format!(
            "k must lie in 1..={}, got {k}",
            train.len()
        )));
    }
    let (norm, rows) = normalize_features(train)?;
    let q = norm.apply(query)?;
    let mut dist: Vec<(&DatasetId, f64)> = rows
        .iter()
        .map(|(d, r)| {
            (
                d,
                r.iter()
                    .zip(&q)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt(),
            )
        })
        .collect();
    dist.sort_by(|(da, xa), (db, xb)| {
        xa.partial_cmp(xb)
            .unwrap_or(Ordering::Equal)
            .then_with(|| da.cmp(db))
    });
    mean_rank_aggregate(dist.iter().take(k).map(|(d, _)| &train.examples[*d].target))
}

/// Constant prediction: algorithms by mean rank over all training targets.
pub fn average_rank_baseline<'a, I>(targets: I) -> Result<AlgoRanking>
where
    I: IntoIterator<Item = &'a AlgoRanking>,
{
    mean_rank_aggregate(targets)
}
