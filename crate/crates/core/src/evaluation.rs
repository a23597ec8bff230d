//! Metalevel evaluation: Kendall's tau, leave-one-out cross-validation,
//! top-t baselevel impact and parameter sweeps.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meta_model::{AlgoRanking, DatasetId, LandmarkTable, PerformanceTable};
use crate::metafeatures::MetafeatureVector;
use crate::mtl::{self, MetaDataset, MetaExample};
use crate::pipeline::{self, Cf4cfConfig};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Kendall's tau-a between two strict rankings of the same algorithms.
pub fn kendall_tau(r1: &AlgoRanking, r2: &AlgoRanking) -> Result<f64> {
    if r1.len() != r2.len() || r1.algorithm_set() != r2.algorithm_set() {
        return Err(Error::invalid("rankings cover different algorithm sets"));
    }
    let m = r1.len();
    if m < 2 {
        return Err(Error::invalid("kendall tau needs at least 2 algorithms"));
    }
    let pos: HashMap<_, usize> = r2.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut seq: Vec<usize> = r1.iter().map(|a| pos[a]).collect();
    let discordant = count_inversions(&mut seq);
    let pairs = m * (m - 1) / 2;
    Ok((pairs as f64 - 2.0 * discordant as f64) / pairs as f64)
}

/// Merge-sort inversion count; sorts `v` in place.
fn count_inversions(v: &mut [usize]) -> usize {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = count_inversions(&mut v[..mid]) + count_inversions(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[i] <= v[j] {
            merged.push(v[i]);
            i += 1;
        } else {
            merged.push(v[j]);
            inv += mid - i;
            j += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..]);
    v.copy_from_slice(&merged);
    inv
}

/// Mean over datasets of the best true score among the first `t`
/// recommended algorithms.
pub fn baselevel_impact(
    predicted: &BTreeMap<DatasetId, AlgoRanking>,
    perf: &PerformanceTable,
    measure: &str,
    t: usize,
) -> Result<f64> {
    let m = perf.algorithms().len();
    if t == 0 || t > m {
        return Err(Error::invalid(format!(
            "threshold t must lie in 1..={m}, got {t}"
        )));
    }
    if predicted.is_empty() {
        return Err(Error::invalid("no predictions to evaluate"));
    }
    let mut total = 0.0;
    for (d, ranking) in predicted {
        let mut best = f64::NEG_INFINITY;
        for a in ranking.top(t) {
            let s = perf
                .score(d, a, measure)
                .ok_or_else(|| Error::IncompleteTable {
                    dataset: d.to_string(),
                    algorithm: a.to_string(),
                    measure: measure.to_string(),
                })?;
            best = best.max(s);
        }
        total += best;
    }
    Ok(total / predicted.len() as f64)
}

/// Mean over `datasets` of each dataset's best score: the ceiling of
/// every impact curve.
pub fn oracle_mean_best<'a, I>(perf: &PerformanceTable, measure: &str, datasets: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a DatasetId>,
{
    let mut total = 0.0;
    let mut n = 0usize;
    for d in datasets {
        let scores = perf.scores_for(d, measure)?;
        total += scores.values().copied().fold(f64::NEG_INFINITY, f64::max);
        n += 1;
    }
    if n == 0 {
        return Err(Error::invalid("no datasets"));
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cf4cf,
    Mtl,
    Baseline,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cf4cf, Method::Mtl, Method::Baseline];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cf4cf => "cf4cf",
            Method::Mtl => "mtl",
            Method::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cf4cf" => Ok(Method::Cf4cf),
            "mtl" | "knn-lr" => Ok(Method::Mtl),
            "baseline" | "average" => Ok(Method::Baseline),
            other => Err(Error::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Everything a LOOCV run may draw on. Landmarks are needed by CF4CF,
/// metafeatures by the label ranker.
#[derive(Debug, Clone, Default)]
pub struct MetaCorpus {
    pub performance: PerformanceTable,
    pub landmarks: Option<LandmarkTable>,
    pub metafeatures: Option<BTreeMap<DatasetId, MetafeatureVector>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Metatarget, seed and CF4CF parameters; the metatarget applies to
    /// every method.
    pub cf4cf: Cf4cfConfig,
    pub mtl_k: usize,
}

impl EvalConfig {
    pub fn new(cf4cf: Cf4cfConfig) -> Self {
        Self {
            cf4cf,
            mtl_k: mtl::DEFAULT_K,
        }
    }

    pub fn measure(&self) -> &str {
        &self.cf4cf.measure
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub method: Method,
    pub config: EvalConfig,
    pub per_dataset_tau: BTreeMap<DatasetId, f64>,
    pub mean_tau: f64,
    /// Per measure, the impact value at `t = 1..=M` (index `t - 1`).
    pub impact: BTreeMap<String, Vec<f64>>,
    pub predictions: BTreeMap<DatasetId, AlgoRanking>,
}

fn predict_fold(
    corpus: &MetaCorpus,
    truth: &BTreeMap<DatasetId, AlgoRanking>,
    test: &DatasetId,
    method: Method,
    cfg: &EvalConfig,
) -> Result<AlgoRanking> {
    let perf = &corpus.performance;
    match method {
        Method::Baseline => {
            mtl::average_rank_baseline(truth.iter().filter(|(d, _)| *d != test).map(|(_, r)| r))
        }
        Method::Mtl => {
            let features = corpus
                .metafeatures
                .as_ref()
                .ok_or_else(|| Error::invalid("method mtl needs metafeatures"))?;
            let lookup = |d: &DatasetId| {
                features
                    .get(d)
                    .ok_or_else(|| Error::invalid(format!("no metafeatures for dataset `{d}`")))
            };
            let train = truth
                .iter()
                .filter(|(d, _)| *d != test)
                .map(|(d, r)| {
                    Ok((
                        d.clone(),
                        MetaExample {
                            features: lookup(d)?.clone(),
                            target: r.clone(),
                        },
                    ))
                })
                .collect::<Result<_>>()?;
            mtl::knn_label_ranking(&MetaDataset::new(train)?, lookup(test)?, cfg.mtl_k)
        }
        Method::Cf4cf => {
            let landmarks = corpus
                .landmarks
                .as_ref()
                .ok_or_else(|| Error::invalid("method cf4cf needs landmarks"))?;
            let model = pipeline::train(
                perf,
                perf.datasets().iter().filter(|d| *d != test),
                &cfg.cf4cf,
            )?;
            pipeline::predict_dataset(&model, landmarks, test, &cfg.cf4cf)
        }
    }
}

/// Leave-one-out evaluation at the dataset level. Folds run in parallel;
/// the report does not depend on their scheduling.
pub fn loocv(corpus: &MetaCorpus, method: Method, cfg: &EvalConfig) -> Result<EvaluationReport> {
    let perf = &corpus.performance;
    let datasets: Vec<&DatasetId> = perf.datasets().iter().collect();
    if datasets.len() < 3 {
        return Err(Error::invalid(format!(
            "leave-one-out needs at least 3 datasets, got {}",
            datasets.len()
        )));
    }
    let m = perf.algorithms().len();
    if method == Method::Cf4cf {
        cfg.cf4cf.validate(m)?;
    }
    let measure = cfg.measure();
    let truth: BTreeMap<DatasetId, AlgoRanking> = datasets
        .iter()
        .map(|d| Ok(((*d).clone(), perf.ranking(d, measure)?)))
        .collect::<Result<_>>()?;

    let folds: Vec<(DatasetId, AlgoRanking, f64)> = datasets
        .par_iter()
        .map(|d| {
            let predicted = predict_fold(corpus, &truth, d, method, cfg)?;
            let tau = kendall_tau(&predicted, &truth[*d])?;
            Ok(((*d).clone(), predicted, tau))
        })
        .collect::<Result<_>>()?;

    let mut per_dataset_tau = BTreeMap::new();
    let mut predictions = BTreeMap::new();
    for (d, r, tau) in folds {
        per_dataset_tau.insert(d.clone(), tau);
        predictions.insert(d, r);
    }
    let mean_tau = per_dataset_tau.values().sum::<f64>() / per_dataset_tau.len() as f64;
    let mut impact = BTreeMap::new();
    for meas in perf.measures() {
        let curve = (1..=m)
            .map(|t| baselevel_impact(&predictions, perf, meas, t))
            .collect::<Result<Vec<f64>>>()?;
        impact.insert(meas.clone(), curve);
    }
    Ok(EvaluationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        method,
        config: cfg.clone(),
        per_dataset_tau,
        mean_tau,
        impact,
        predictions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "n_ratings")]
    NRatings,
    #[serde(rename = "n_sl")]
    NSl,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::NRatings => "n_ratings",
            SweepAxis::NSl => "n_sl",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "n_ratings" => Ok(SweepAxis::NRatings),
            "n_sl" => Ok(SweepAxis::NSl),
            other => Err(Error::invalid(format!("unknown sweep axis `{other}`"))),
        }
    }
}

/// One LOOCV report per axis value, every other setting held fixed.
pub fn sweep(
    corpus: &MetaCorpus,
    axis: SweepAxis,
    values: &[usize],
    method: Method,
    cfg: &EvalConfig,
) -> Result<Vec<EvaluationReport>> {
    let m = corpus.performance.algorithms().len();
    let configs = values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            match axis {
                SweepAxis::NRatings => c.cf4cf.n_ratings = Some(v),
                SweepAxis::NSl => c.cf4cf.n_sl = v,
            }
            c.cf4cf.validate(m)?;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    configs.iter().map(|c| loocv(corpus, method, c)).collect()
}
