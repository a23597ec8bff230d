//! The CF4CF procedure: performance rankings become ratings, a
//! nearest-neighbour CF model is trained on them, and a new dataset is
//! described by a sample of its subsampling-landmarker ranking. The CF
//! model fills in the remaining algorithms and the combined ratings are
//! turned back into a ranking.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf_engine::{ActiveProfile, NeighbourConfig, NeighbourModel};
use crate::error::{Error, Result};
use crate::meta_model::{
    rank_position_to_rating, ranking_from_scores, ranking_from_scores_with, ranking_to_ratings,
    AlgoRanking, AlgorithmId, DatasetId, LandmarkTable, MetaRatingMatrix, PerformanceTable,
    RatingScale, ScoreMap,
};
use crate::seeding::rng_for;

pub use crate::base::subsample_dataset;

/// Default fraction of baselevel ratings used to compute landmarkers.
pub const DEFAULT_SUBSAMPLE_FRACTION: f64 = 0.10;

/// How the `n_sl` landmark algorithms given to the model are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkSampling {
    /// Uniformly without replacement.
    #[default]
    Uniform,
    /// The `n_sl` best algorithms of the landmark ranking.
    Top,
}

impl std::str::FromStr for LandmarkSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Self::Uniform),
            "top" => Ok(Self::Top),
            other => Err(Error::invalid(format!(
                "unknown landmark sampling `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cf4cfConfig {
    /// Metatarget measure whose rankings are predicted.
    pub measure: String,
    pub scale: RatingScale,
    /// Ratings kept per training row; `None` keeps the complete row.
    pub n_ratings: Option<usize>,
    /// Landmark ratings given to the model for a new dataset.
    pub n_sl: usize,
    pub seed: u64,
    pub cf: NeighbourConfig,
    #[serde(default)]
    pub landmark_sampling: LandmarkSampling,
}

impl Cf4cfConfig {
    pub fn new(measure: impl Into<String>, n_sl: usize, seed: u64) -> Self {
        Self {
            measure: measure.into(),
            scale: RatingScale::default(),
            n_ratings: None,
            n_sl,
            seed,
            cf: NeighbourConfig::default(),
            landmark_sampling: LandmarkSampling::Uniform,
        }
    }

    /// Checks the count parameters against an algorithm universe of size `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        if m < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 algorithms, got {m}"
            )));
        }
        if let Some(n) = self.n_ratings {
            if n == 0 || n > m {
                return Err(Error::invalid(format!(
                    "n_ratings must lie in 1..={m}, got {n}"
                )));
            }
        }
        if self.n_sl == 0 || self.n_sl >= m {
            return Err(Error::invalid(format!(
                "n_sl must lie in 1..={}, got {}",
                m - 1,
                self.n_sl
            )));
        }
        self.cf.validate()
    }
}

/// Meta rating matrix over every dataset of `perf`.
pub fn build_meta_matrix(perf: &PerformanceTable, cfg: &Cf4cfConfig) -> Result<MetaRatingMatrix> {
    build_meta_matrix_for(perf, perf.datasets(), cfg)
}

/// Meta rating matrix over the given datasets. Each row is the dataset's
/// ranking converted to ratings, thinned to `n_ratings` uniformly chosen
/// entries. The algorithm universe is that of the whole table.
pub fn build_meta_matrix_for<'a, I>(
    perf: &PerformanceTable,
    datasets: I,
    cfg: &Cf4cfConfig,
) -> Result<MetaRatingMatrix>
where
    I: IntoIterator<Item = &'a DatasetId>,
{
    let algorithms = perf.algorithms();
    let m = algorithms.len();
    if m < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 algorithms, got {m}"
        )));
    }
    if let Some(n) = cfg.n_ratings {
        if n == 0 || n > m {
            return Err(Error::invalid(format!(
                "n_ratings must lie in 1..={m}, got {n}"
            )));
        }
    }
    let mut rows = BTreeMap::new();
    for d in datasets {
        let scores = perf.scores_over(d, &cfg.measure, algorithms)?;
        let ratings = ranking_to_ratings(&ranking_from_scores(&scores)?, cfg.scale)?;
        let row = match cfg.n_ratings {
            Some(n) if n < m => {
                let mut rng = rng_for(cfg.seed, &["n_ratings", d.as_str()]);
                let keep: BTreeSet<usize> = index::sample(&mut rng, m, n).into_iter().collect();
                ratings
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| keep.contains(i))
                    .map(|(_, kv)| kv)
                    .collect()
            }
            _ => ratings,
        };
        rows.insert(d.clone(), row);
    }
    MetaRatingMatrix::new(algorithms.iter().cloned().collect(), cfg.scale, rows)
}

/// Trains the CF metamodel on the given datasets.
pub fn train<'a, I>(
    perf: &PerformanceTable,
    datasets: I,
    cfg: &Cf4cfConfig,
) -> Result<NeighbourModel>
where
    I: IntoIterator<Item = &'a DatasetId>,
{
    NeighbourModel::new(build_meta_matrix_for(perf, datasets, cfg)?, cfg.cf)
}

/// Ranking of `dataset` according to its landmark scores.
pub fn landmark_ranking(
    landmarks: &LandmarkTable,
    dataset: &DatasetId,
    measure: &str,
) -> Result<AlgoRanking> {
    landmarks.ranking(dataset, measure)
}

/// Samples `n_sl` algorithms from the landmark ranking and rates each by
/// its position in the full ranking.
pub fn build_active_profile(
    sl: &AlgoRanking,
    n_sl: usize,
    scale: RatingScale,
    seed: u64,
    sampling: LandmarkSampling,
) -> Result<ActiveProfile> {
    let m = sl.len();
    if n_sl == 0 || n_sl >= m {
        return Err(Error::invalid(format!(
            "n_sl must lie in 1..={}, got {n_sl}",
            m.saturating_sub(1)
        )));
    }
    let positions: Vec<usize> = match sampling {
        LandmarkSampling::Uniform => {
            let mut rng = rng_for(seed, &["landmarks"]);
            let mut all: Vec<usize> = (0..m).collect();
            all.shuffle(&mut rng);
            all.truncate(n_sl);
            all
        }
        LandmarkSampling::Top => (0..n_sl).collect(),
    };
    let ratings = positions
        .into_iter()
        .map(|p| {
            Ok((
                sl.as_slice()[p].clone(),
                rank_position_to_rating(p + 1, m, scale)?,
            ))
        })
        .collect::<Result<ScoreMap>>()?;
    ActiveProfile::new(ratings)
}

/// Completes the active profile with CF predictions and ranks the
/// combined ratings. On equal ratings landmark algorithms come first,
/// then lexicographic order.
pub fn cf4cf_predict(model: &NeighbourModel, active: &ActiveProfile) -> Result<AlgoRanking> {
    let mut combined = model.predict_all_missing(active)?;
    for (a, &r) in active.ratings() {
        combined.insert(a.clone(), r);
    }
    ranking_from_scores_with(&combined, |a, b| {
        match (active.contains(a), active.contains(b)) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => a.cmp(b),
        }
    })
}

/// Predicts the ranking of one dataset from its landmarks.
pub fn predict_dataset(
    model: &NeighbourModel,
    landmarks: &LandmarkTable,
    dataset: &DatasetId,
    cfg: &Cf4cfConfig,
) -> Result<AlgoRanking> {
    let universe: BTreeSet<AlgorithmId> = model.matrix().algorithms().iter().cloned().collect();
    let sl = ranking_from_scores(&landmarks.scores_over(dataset, &cfg.measure, &universe)?)?;
    let seed = crate::seeding::derive_seed(cfg.seed, &["n_sl", dataset.as_str()]);
    let active = build_active_profile(
        &sl,
        cfg.n_sl,
        model.matrix().scale(),
        seed,
        cfg.landmark_sampling,
    )?;
    cf4cf_predict(model, &active)
}

/// Trains on `train` (always excluding the dataset under prediction) and
/// predicts every dataset in `test` from its landmarks.
pub fn cf4cf_run(
    perf: &PerformanceTable,
    landmarks: &LandmarkTable,
    train_sets: &[DatasetId],
    test_sets: &[DatasetId],
    cfg: &Cf4cfConfig,
) -> Result<BTreeMap<DatasetId, AlgoRanking>> {
    cfg.validate(perf.algorithms().len())?;
    if landmarks.algorithms() != perf.algorithms() {
        return Err(Error::invalid(
            "landmark and performance tables cover different algorithm sets",
        ));
    }
    test_sets
        .par_iter()
        .map(|d| {
            let model = train(perf, train_sets.iter().filter(|t| *t != d), cfg)?;
            Ok((d.clone(), predict_dataset(&model, landmarks, d, cfg)?))
        })
        .collect()
}
