//! Seeded generator of clustered meta-experiments: performance tables,
//! landmark tables and metafeatures whose structure is known in advance.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{kendall_tau, MetaCorpus};
use crate::meta_model::{AlgoRanking, AlgorithmId, DatasetId, LandmarkTable, PerformanceTable};
use crate::metafeatures::{MetafeatureVector, SELECTED};

/// Measures emitted by the generator, each with its own score range.
pub const MEASURES: [(&str, f64, f64); 2] = [("AUC", 0.55, 0.95), ("NDCG", 0.2, 0.8)];

const CANDIDATES_PER_CLUSTER: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_datasets: usize,
    pub n_algorithms: usize,
    pub n_clusters: usize,
    pub landmark_noise: f64,
    pub score_noise: f64,
    /// Spread of each dataset's metafeatures around its cluster centroid.
    #[serde(default = "default_feature_noise")]
    pub feature_noise: f64,
    pub seed: u64,
}

fn default_feature_noise() -> f64 {
    0.3
}

impl SyntheticSpec {
    pub fn new(n_datasets: usize, n_algorithms: usize, n_clusters: usize, seed: u64) -> Self {
        Self {
            n_datasets,
            n_algorithms,
            n_clusters,
            landmark_noise: 0.05,
            score_noise: 0.02,
            feature_noise: default_feature_noise(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_algorithms < 2 {
            return Err(Error::invalid(
                "synthetic corpus needs at least 2 algorithms",
            ));
        }
        if self.n_datasets == 0 {
            return Err(Error::invalid("synthetic corpus needs at least 1 dataset"));
        }
        if self.n_clusters == 0 || self.n_clusters > self.n_datasets {
            return Err(Error::invalid(format!(
                "n_clusters must lie in 1..={}, got {}",
                self.n_datasets, self.n_clusters
            )));
        }
        for (name, v) in [
            ("landmark_noise", self.landmark_noise),
            ("score_noise", self.score_noise),
            ("feature_noise", self.feature_noise),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!(
                    "{name} must be a finite value >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub performance: PerformanceTable,
    pub landmarks: LandmarkTable,
    pub metafeatures: BTreeMap<DatasetId, MetafeatureVector>,
    /// Cluster index of each dataset.
    pub clusters: BTreeMap<DatasetId, usize>,
    /// Ground-truth ranking per cluster and measure.
    pub cluster_rankings: Vec<BTreeMap<String, AlgoRanking>>,
}

impl SyntheticCorpus {
    pub fn into_meta_corpus(self) -> MetaCorpus {
        MetaCorpus {
            performance: self.performance,
            landmarks: Some(self.landmarks),
            metafeatures: Some(self.metafeatures),
        }
    }
}

pub fn algorithm_ids(m: usize) -> Vec<AlgorithmId> {
    (1..=m)
        .map(|i| AlgorithmId::new(format!("alg{i:02}")).expect("non-empty"))
        .collect()
}

fn noise(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        Normal::new(0.0, sigma)
            .expect("validated sigma")
            .sample(rng)
    }
}

/// Draws one ranking per cluster; each new ranking is the candidate
/// farthest (in Kendall distance) from the ones already chosen.
fn spread_rankings(rng: &mut ChaCha8Rng, algs: &[AlgorithmId], n: usize) -> Vec<AlgoRanking> {
    let draw = |rng: &mut ChaCha8Rng| {
        let mut v = algs.to_vec();
        v.shuffle(rng);
        AlgoRanking::new(v).expect("shuffled ids are unique")
    };
    let mut chosen = vec![draw(rng)];
    while chosen.len() < n {
        let mut best: Option<(f64, AlgoRanking)> = None;
        for _ in 0..CANDIDATES_PER_CLUSTER {
            let c = draw(rng);
            // smaller worst-case tau = farther from every chosen ranking
            let closeness = chosen
                .iter()
                .map(|r| kendall_tau(r, &c).expect("same universe"))
                .fold(f64::NEG_INFINITY, f64::max);
            if best.as_ref().is_none_or(|(b, _)| closeness < *b) {
                best = Some((closeness, c));
            }
        }
        chosen.push(best.expect("at least one candidate").1);
    }
    chosen
}

/// Generates a corpus. Dataset `i` belongs to cluster `i mod n_clusters`.
/// True scores are the cluster's evenly spaced base scores plus Gaussian
/// score noise; landmarks add Gaussian landmark noise on top of the true
/// scores; metafeatures are the cluster centroid plus Gaussian jitter.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = spec.n_algorithms;
    let algs = algorithm_ids(m);

    let mut cluster_rankings: Vec<BTreeMap<String, AlgoRanking>> =
        vec![BTreeMap::new(); spec.n_clusters];
    for (measure, _, _) in MEASURES {
        for (c, r) in spread_rankings(&mut rng, &algs, spec.n_clusters)
            .into_iter()
            .enumerate()
        {
            cluster_rankings[c].insert(measure.to_string(), r);
        }
    }
    let centroids: Vec<Vec<f64>> = (0..spec.n_clusters)
        .map(|_| {
            SELECTED
                .iter()
                .map(|_| rng.random_range(-3.0..3.0))
                .collect()
        })
        .collect();

    let mut performance = PerformanceTable::new();
    let mut landmarks = PerformanceTable::new();
    let mut metafeatures = BTreeMap::new();
    let mut clusters = BTreeMap::new();
    let width = (spec.n_datasets.max(2) - 1).to_string().len().max(3);
    for i in 0..spec.n_datasets {
        let d = DatasetId::new(format!("d{i:0width$}"))?;
        let c = i % spec.n_clusters;
        clusters.insert(d.clone(), c);
        for (measure, lo, hi) in MEASURES {
            let ranking = &cluster_rankings[c][measure];
            for (p, a) in ranking.iter().enumerate() {
                let base = lo + (hi - lo) * (m - 1 - p) as f64 / (m - 1) as f64;
                let score = base + noise(&mut rng, spec.score_noise);
                let landmark = score + noise(&mut rng, spec.landmark_noise);
                performance.insert(d.clone(), a.clone(), measure, score)?;
                landmarks.insert(d.clone(), a.clone(), measure, landmark)?;
            }
        }
        let feats = SELECTED
            .iter()
            .zip(&centroids[c])
            .map(|(n, mu)| (n.to_string(), mu + noise(&mut rng, spec.feature_noise)))
            .collect();
        metafeatures.insert(d, MetafeatureVector::new(feats)?);
    }
    Ok(SyntheticCorpus {
        performance,
        landmarks,
        metafeatures,
        clusters,
        cluster_rankings,
    })
}

/// Replaces every true score by an independent uniform draw, leaving the
/// targets unrelated to landmarks and metafeatures.
pub fn randomize_targets(perf: &PerformanceTable, seed: u64) -> PerformanceTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PerformanceTable::new();
    for (d, a, measure, _) in perf.rows() {
        out.insert(d.clone(), a.clone(), measure, rng.random::<f64>())
            .expect("rows of a valid table are valid");
    }
    out
}
