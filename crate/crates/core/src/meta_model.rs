//! Domain types of the metalevel and the conversions between algorithm
//! rankings and ratings on a fixed scale.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Result<Self> {
                let id = id.into();
                if id.trim().is_empty() {
                    return Err(Error::invalid(concat!(stringify!($name), " must be non-empty")));
                }
                Ok(Self(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            /// Panics on an empty id; use [`Self::new`] for untrusted input.
            fn from(s: &str) -> Self {
                Self::new(s).expect("non-empty id")
            }
        }
    };
}

id_type!(
    /// A baselevel recommender algorithm; an "item" at the metalevel.
    AlgorithmId
);
id_type!(
    /// A baselevel dataset; a "user" at the metalevel.
    DatasetId
);

pub type ScoreMap = BTreeMap<AlgorithmId, f64>;

/// Closed rating interval `[min, max]` with `min < max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScale")]
pub struct RatingScale {
    min: f64,
    max: f64,
}

#[derive(Deserialize)]
struct RawScale {
    min: f64,
    max: f64,
}

impl TryFrom<RawScale> for RatingScale {
    type Error = Error;

    fn try_from(raw: RawScale) -> Result<Self> {
        RatingScale::new(raw.min, raw.max)
    }
}

impl RatingScale {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::invalid(format!(
                "rating scale requires finite min < max, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn contains(&self, r: f64) -> bool {
        (self.min..=self.max).contains(&r)
    }

    pub fn clamp(&self, r: f64) -> f64 {
        r.clamp(self.min, self.max)
    }
}

impl Default for RatingScale {
    fn default() -> Self {
        Self { min: 1.0, max: 5.0 }
    }
}

/// A total order over algorithms, best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AlgorithmId>", into = "Vec<AlgorithmId>")]
pub struct AlgoRanking(Vec<AlgorithmId>);

impl TryFrom<Vec<AlgorithmId>> for AlgoRanking {
    type Error = Error;

    fn try_from(order: Vec<AlgorithmId>) -> Result<Self> {
        AlgoRanking::new(order)
    }
}

impl From<AlgoRanking> for Vec<AlgorithmId> {
    fn from(r: AlgoRanking) -> Self {
        r.0
    }
}

impl AlgoRanking {
    /// Builds a ranking from an explicit order. Rejects empty input and
    /// repeated algorithms; rankings of length one are representable but
    /// cannot be converted to ratings.
    pub fn new(order: Vec<AlgorithmId>) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::invalid(
                "ranking must contain at least one algorithm",
            ));
        }
        let mut seen = BTreeSet::new();
        for a in &order {
            if !seen.insert(a) {
                return Err(Error::invalid(format!(
                    "algorithm `{a}` appears twice in ranking"
                )));
            }
        }
        Ok(Self(order))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[AlgorithmId] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AlgorithmId> {
        self.0.iter()
    }

    /// 1-based position of `a`.
    pub fn position(&self, a: &AlgorithmId) -> Option<usize> {
        self.0.iter().position(|x| x == a).map(|p| p + 1)
    }

    pub fn top(&self, t: usize) -> &[AlgorithmId] {
        &self.0[..t.min(self.0.len())]
    }

    pub fn algorithm_set(&self) -> BTreeSet<&AlgorithmId> {
        self.0.iter().collect()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().cloned().collect())
    }
}

impl<'a> IntoIterator for &'a AlgoRanking {
    type Item = &'a AlgorithmId;
    type IntoIter = std::slice::Iter<'a, AlgorithmId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

fn check_scores(scores: &ScoreMap) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::invalid("cannot rank an empty score map"));
    }
    if let Some((a, s)) = scores.iter().find(|(_, s)| !s.is_finite()) {
        return Err(Error::invalid(format!(
            "score for `{a}` is not finite ({s})"
        )));
    }
    Ok(())
}

/// Sorts algorithms by decreasing score; equal scores are ordered
/// lexicographically by id.
pub fn ranking_from_scores(scores: &ScoreMap) -> Result<AlgoRanking> {
    ranking_from_scores_with(scores, |a, b| a.cmp(b))
}

/// Like [`ranking_from_scores`] with a caller-supplied order for equal scores.
pub fn ranking_from_scores_with<F>(scores: &ScoreMap, tie_break: F) -> Result<AlgoRanking>
where
    F: Fn(&AlgorithmId, &AlgorithmId) -> Ordering,
{
    check_scores(scores)?;
    let mut entries: Vec<(&AlgorithmId, f64)> = scores.iter().map(|(a, &s)| (a, s)).collect();
    entries.sort_by(|(a, sa), (b, sb)| {
        sb.partial_cmp(sa)
            .unwrap_or(Ordering::Equal)
            .then_with(|| tie_break(a, b))
    });
    Ok(AlgoRanking(
        entries.into_iter().map(|(a, _)| a.clone()).collect(),
    ))
}

/// Rating of the algorithm at 1-based `position` in a ranking of
/// `count` algorithms: `(max - min) * (count - position) / (count - 1) + min`.
pub fn rank_position_to_rating(position: usize, count: usize, scale: RatingScale) -> Result<f64> {
    if count < 2 {
        return Err(Error::invalid(format!(
            "rank-to-rating conversion needs at least 2 algorithms, got {count}"
        )));
    }
    if position == 0 || position > count {
        return Err(Error::invalid(format!(
            "rank position {position} outside 1..={count}"
        )));
    }
    if position == 1 {
        return Ok(scale.max);
    }
    if position == count {
        return Ok(scale.min);
    }
    let span = scale.max - scale.min;
    Ok(span * (count - position) as f64 / (count - 1) as f64 + scale.min)
}

pub fn ranking_to_ratings(ranking: &AlgoRanking, scale: RatingScale) -> Result<ScoreMap> {
    let m = ranking.len();
    ranking
        .iter()
        .enumerate()
        .map(|(i, a)| Ok((a.clone(), rank_position_to_rating(i + 1, m, scale)?)))
        .collect()
}

/// Inverse of [`ranking_to_ratings`]: higher rating ranks first.
pub fn ratings_to_ranking(ratings: &ScoreMap) -> Result<AlgoRanking> {
    ranking_from_scores(ratings)
}

/// Baselevel performance: `(dataset, algorithm, measure) -> score`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PerformanceTable {
    scores: BTreeMap<(DatasetId, AlgorithmId, String), f64>,
    datasets: BTreeSet<DatasetId>,
    algorithms: BTreeSet<AlgorithmId>,
    measures: BTreeSet<String>,
}

/// Landmark scores share the performance schema; they are computed on
/// subsamples of each baselevel dataset.
pub type LandmarkTable = PerformanceTable;

impl PerformanceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts one score. Fails on a non-finite score, an empty measure
    /// name, or an already present `(dataset, algorithm, measure)` triple.
    pub fn insert(
        &mut self,
        dataset: DatasetId,
        algorithm: AlgorithmId,
        measure: impl Into<String>,
        score: f64,
    ) -> Result<()> {
        let measure = measure.into();
        if measure.trim().is_empty() {
            return Err(Error::invalid("measure name must be non-empty"));
        }
        if !score.is_finite() {
            return Err(Error::invalid(format!("score must be finite, got {score}")));
        }
        let key = (dataset, algorithm, measure);
        if self.scores.contains_key(&key) {
            return Err(Error::invalid(format!(
                "duplicate score for ({}, {}, {})",
                key.0, key.1, key.2
            )));
        }
        self.datasets.insert(key.0.clone());
        self.algorithms.insert(key.1.clone());
        self.measures.insert(key.2.clone());
        self.scores.insert(key, score);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn datasets(&self) -> &BTreeSet<DatasetId> {
        &self.datasets
    }

    pub fn algorithms(&self) -> &BTreeSet<AlgorithmId> {
        &self.algorithms
    }

    pub fn measures(&self) -> &BTreeSet<String> {
        &self.measures
    }

    pub fn score(&self, d: &DatasetId, a: &AlgorithmId, measure: &str) -> Option<f64> {
        self.scores
            .get(&(d.clone(), a.clone(), measure.to_string()))
            .copied()
    }

    /// Rows in `(dataset, algorithm, measure)` order.
    pub fn rows(&self) -> impl Iterator<Item = (&DatasetId, &AlgorithmId, &str, f64)> {
        self.scores
            .iter()
            .map(|((d, a, m), &s)| (d, a, m.as_str(), s))
    }

    /// All algorithm scores of `dataset` for `measure`, required to cover
    /// the table's whole algorithm set.
    pub fn scores_for(&self, dataset: &DatasetId, measure: &str) -> Result<ScoreMap> {
        self.scores_over(dataset, measure, &self.algorithms)
    }

    pub(crate) fn scores_over(
        &self,
        dataset: &DatasetId,
        measure: &str,
        algorithms: &BTreeSet<AlgorithmId>,
    ) -> Result<ScoreMap> {
        algorithms
            .iter()
            .map(|a| match self.score(dataset, a, measure) {
                Some(s) => Ok((a.clone(), s)),
                None => Err(Error::IncompleteTable {
                    dataset: dataset.to_string(),
                    algorithm: a.to_string(),
                    measure: measure.to_string(),
                }),
            })
            .collect()
    }

    /// True ranking of `dataset` under `measure`.
    pub fn ranking(&self, dataset: &DatasetId, measure: &str) -> Result<AlgoRanking> {
        ranking_from_scores(&self.scores_for(dataset, measure)?)
    }

    /// Checks that every dataset covers every algorithm for every measure.
    pub fn validate_complete(&self) -> Result<()> {
        for d in &self.datasets {
            for m in &self.measures {
                self.scores_for(d, m)?;
            }
        }
        Ok(())
    }

    /// Copy restricted to the given datasets.
    pub fn restrict<'a, I>(&self, keep: I) -> PerformanceTable
    where
        I: IntoIterator<Item = &'a DatasetId>,
    {
        let keep: BTreeSet<&DatasetId> = keep.into_iter().collect();
        let mut out = PerformanceTable::new();
        for ((d, a, m), &s) in &self.scores {
            if keep.contains(d) {
                out.insert(d.clone(), a.clone(), m.clone(), s)
                    .expect("rows of a valid table are valid");
            }
        }
        out
    }
}

/// Dataset × algorithm ratings on a common scale; rows may be partial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetaMatrix")]
pub struct MetaRatingMatrix {
    algorithms: Vec<AlgorithmId>,
    scale: RatingScale,
    rows: BTreeMap<DatasetId, ScoreMap>,
}

#[derive(Deserialize)]
struct RawMetaMatrix {
    algorithms: Vec<AlgorithmId>,
    scale: RatingScale,
    rows: BTreeMap<DatasetId, ScoreMap>,
}

impl TryFrom<RawMetaMatrix> for MetaRatingMatrix {
    type Error = Error;

    fn try_from(raw: RawMetaMatrix) -> Result<Self> {
        MetaRatingMatrix::new(raw.algorithms, raw.scale, raw.rows)
    }
}

impl MetaRatingMatrix {
    pub fn new(
        algorithms: Vec<AlgorithmId>,
        scale: RatingScale,
        rows: BTreeMap<DatasetId, ScoreMap>,
    ) -> Result<Self> {
        let universe: BTreeSet<&AlgorithmId> = algorithms.iter().collect();
        if universe.len() != algorithms.len() {
            return Err(Error::invalid("duplicate algorithm in meta matrix"));
        }
        for (d, row) in &rows {
            if row.is_empty() {
                return Err(Error::invalid(format!(
                    "meta matrix row `{d}` has no ratings"
                )));
            }
            for (a, &r) in row {
                if !universe.contains(a) {
                    return Err(Error::invalid(format!(
                        "row `{d}` rates unknown algorithm `{a}`"
                    )));
                }
                if !r.is_finite() || !scale.contains(r) {
                    return Err(Error::invalid(format!(
                        "rating {r} for ({d}, {a}) outside [{}, {}]",
                        scale.min, scale.max
                    )));
                }
            }
        }
        let mut algorithms = algorithms;
        algorithms.sort();
        Ok(Self {
            algorithms,
            scale,
            rows,
        })
    }

    /// Sorted algorithm universe.
    pub fn algorithms(&self) -> &[AlgorithmId] {
        &self.algorithms
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn rows(&self) -> &BTreeMap<DatasetId, ScoreMap> {
        &self.rows
    }

    pub fn row(&self, d: &DatasetId) -> Option<&ScoreMap> {
        self.rows.get(d)
    }

    pub fn datasets(&self) -> impl Iterator<Item = &DatasetId> {
        self.rows.keys()
    }

    pub fn n_ratings(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    /// Fraction of filled cells.
    pub fn density(&self) -> f64 {
        let cells = self.rows.len() * self.algorithms.len();
        if cells == 0 {
            0.0
        } else {
            self.n_ratings() as f64 / cells as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scores(pairs: &[(&str, f64)]) -> ScoreMap {
        pairs.iter().map(|&(a, s)| (a.into(), s)).collect()
    }

    fn ranking(ids: &[&str]) -> AlgoRanking {
        AlgoRanking::new(ids.iter().map(|&s| s.into()).collect()).unwrap()
    }

    #[test]
    fn sorts_by_decreasing_score() {
        let r = ranking_from_scores(&scores(&[("a1", 0.9), ("a2", 0.5), ("a3", 0.7)])).unwrap();
        assert_eq!(r, ranking(&["a1", "a3", "a2"]));
    }

    #[test]
    fn ties_are_lexicographic() {
        let r = ranking_from_scores(&scores(&[("a2", 0.5), ("a1", 0.5)])).unwrap();
        assert_eq!(r, ranking(&["a1", "a2"]));
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(ranking_from_scores(&ScoreMap::new()).is_err());
        assert!(ranking_from_scores(&scores(&[("a", f64::NAN)])).is_err());
        assert!(ranking_from_scores(&scores(&[("a", f64::INFINITY)])).is_err());
    }

    #[test]
    fn single_algorithm_rejected_on_conversion() {
        let r = ranking_from_scores(&scores(&[("x", 1.0)])).unwrap();
        assert_eq!(r.len(), 1);
        let err = ranking_to_ratings(&r, RatingScale::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn position_to_rating_examples() {
        let s = RatingScale::default();
        assert_eq!(rank_position_to_rating(1, 5, s).unwrap(), 5.0);
        assert_eq!(rank_position_to_rating(5, 5, s).unwrap(), 1.0);
        // (5 - 1)(5 - 2)/(5 - 1) + 1
        assert_eq!(rank_position_to_rating(2, 5, s).unwrap(), 4.0);
        assert!(rank_position_to_rating(1, 1, s).is_err());
        assert!(rank_position_to_rating(0, 3, s).is_err());
        assert!(rank_position_to_rating(4, 3, s).is_err());
    }

    #[test]
    fn ranking_to_ratings_examples() {
        let s = RatingScale::default();
        let got = ranking_to_ratings(&ranking(&["a1", "a3", "a2"]), s).unwrap();
        assert_eq!(got, scores(&[("a1", 5.0), ("a3", 3.0), ("a2", 1.0)]));

        let unit = RatingScale::new(0.0, 1.0).unwrap();
        let got = ranking_to_ratings(&ranking(&["a", "b"]), unit).unwrap();
        assert_eq!(got, scores(&[("a", 1.0), ("b", 0.0)]));

        let got = ranking_to_ratings(&ranking(&["a", "b", "c", "d", "e"]), s).unwrap();
        assert_eq!(
            got,
            scores(&[("a", 5.0), ("b", 4.0), ("c", 3.0), ("d", 2.0), ("e", 1.0)])
        );
    }

    #[test]
    fn ratings_back_to_ranking() {
        let r = ratings_to_ranking(&scores(&[("a1", 5.0), ("a3", 3.0), ("a2", 1.0)])).unwrap();
        assert_eq!(r, ranking(&["a1", "a3", "a2"]));
        let r = ratings_to_ranking(&scores(&[("b", 2.5), ("a", 2.5)])).unwrap();
        assert_eq!(r, ranking(&["a", "b"]));
    }

    #[test]
    fn scale_validation() {
        assert!(RatingScale::new(1.0, 1.0).is_err());
        assert!(RatingScale::new(2.0, 1.0).is_err());
        assert!(RatingScale::new(f64::NAN, 1.0).is_err());
        let bad: std::result::Result<RatingScale, _> =
            serde_json::from_str(r#"{"min":3.0,"max":1.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn ranking_rejects_duplicates() {
        assert!(AlgoRanking::new(vec!["a".into(), "a".into()]).is_err());
        assert!(AlgoRanking::new(vec![]).is_err());
        assert!(AlgorithmId::new("  ").is_err());
    }

    #[test]
    fn performance_table_rejects_duplicates_and_reports_gaps() {
        let mut t = PerformanceTable::new();
        t.insert("d1".into(), "a".into(), "NDCG", 0.4).unwrap();
        assert!(t.insert("d1".into(), "a".into(), "NDCG", 0.5).is_err());
        t.insert("d2".into(), "b".into(), "NDCG", 0.1).unwrap();
        match t.validate_complete().unwrap_err() {
            Error::IncompleteTable {
                dataset, algorithm, ..
            } => {
                assert_eq!((dataset.as_str(), algorithm.as_str()), ("d1", "b"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn meta_matrix_enforces_scale() {
        let s = RatingScale::default();
        let mut rows = BTreeMap::new();
        rows.insert(DatasetId::from("d"), scores(&[("a", 6.0)]));
        assert!(MetaRatingMatrix::new(vec!["a".into()], s, rows).is_err());
        let mut rows = BTreeMap::new();
        rows.insert(DatasetId::from("d"), ScoreMap::new());
        assert!(MetaRatingMatrix::new(vec!["a".into()], s, rows).is_err());
    }

    fn permutation(max_len: usize) -> impl Strategy<Value = AlgoRanking> {
        (2..=max_len)
            .prop_flat_map(|m| Just((0..m).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|order| {
                AlgoRanking::new(
                    order
                        .into_iter()
                        .map(|i| AlgorithmId::new(format!("alg{i:02}")).unwrap())
                        .collect(),
                )
                .unwrap()
            })
    }

    fn scale() -> impl Strategy<Value = RatingScale> {
        (-10.0f64..10.0, 0.01f64..20.0).prop_map(|(lo, w)| RatingScale::new(lo, lo + w).unwrap())
    }

    proptest! {
        #[test]
        fn round_trip(r in permutation(12), s in scale()) {
            let ratings = ranking_to_ratings(&r, s).unwrap();
            prop_assert_eq!(ratings_to_ranking(&ratings).unwrap(), r);
        }

        #[test]
        fn strictly_decreasing_within_scale(m in 2usize..40, s in scale()) {
            let mut prev = f64::INFINITY;
            for j in 1..=m {
                let v = rank_position_to_rating(j, m, s).unwrap();
                prop_assert!(v < prev);
                prop_assert!(s.contains(v));
                prev = v;
            }
            prop_assert_eq!(rank_position_to_rating(1, m, s).unwrap(), s.max());
            prop_assert_eq!(rank_position_to_rating(m, m, s).unwrap(), s.min());
        }

        #[test]
        fn affine_scales_give_affine_ratings(
            r in permutation(12),
            s in scale(),
            a in 0.1f64..5.0,
            b in -5.0f64..5.0,
        ) {
            let t = RatingScale::new(a * s.min() + b, a * s.max() + b).unwrap();
            let rs = ranking_to_ratings(&r, s).unwrap();
            let rt = ranking_to_ratings(&r, t).unwrap();
            for (alg, v) in &rs {
                let mapped = a * v + b;
                let tol = 1e-12 * mapped.abs().max(1.0) * 8.0;
                prop_assert!((rt[alg] - mapped).abs() <= tol, "{} vs {}", rt[alg], mapped);
            }
        }
    }
}
