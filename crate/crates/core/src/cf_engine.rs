//! User-based nearest-neighbour collaborative filtering over a
//! [`MetaRatingMatrix`]. Datasets play the role of users and algorithms
//! the role of items.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meta_model::{AlgorithmId, DatasetId, MetaRatingMatrix, ScoreMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Similarity {
    #[default]
    Cosine,
    Pearson,
}

impl std::str::FromStr for Similarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cosine" => Ok(Similarity::Cosine),
            "pearson" => Ok(Similarity::Pearson),
            other => Err(Error::invalid(format!("unknown similarity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighbourConfig {
    pub k: usize,
    pub similarity: Similarity,
    pub min_overlap: usize,
}

impl Default for NeighbourConfig {
    fn default() -> Self {
        Self {
            k: 5,
            similarity: Similarity::Cosine,
            min_overlap: 2,
        }
    }
}

impl NeighbourConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("neighbourhood size k must be >= 1"));
        }
        if self.min_overlap == 0 {
            return Err(Error::invalid("min_overlap must be >= 1"));
        }
        Ok(())
    }
}

/// Similarity of two rating rows over their co-rated algorithms.
/// Returns 0 when the overlap is smaller than `min_overlap` or the
/// similarity is undefined (zero norm, zero variance).
pub fn row_similarity(u: &ScoreMap, v: &ScoreMap, kind: Similarity, min_overlap: usize) -> f64 {
    let pairs: Vec<(f64, f64)> = u
        .iter()
        .filter_map(|(a, &x)| v.get(a).map(|&y| (x, y)))
        .collect();
    if pairs.is_empty() || pairs.len() < min_overlap {
        return 0.0;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = match kind {
        Similarity::Cosine => pairs.into_iter().unzip(),
        Similarity::Pearson => {
            let n = pairs.len() as f64;
            let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
            pairs.into_iter().map(|(x, y)| (x - mx, y - my)).unzip()
        }
    };
    let dot: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let nx = xs.iter().map(|x| x * x).sum::<f64>().sqrt();
    let ny = ys.iter().map(|y| y * y).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    (dot / (nx * ny)).clamp(-1.0, 1.0)
}

/// Initial ratings of the dataset being recommended for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveProfile {
    ratings: ScoreMap,
}

impl ActiveProfile {
    pub fn new(ratings: ScoreMap) -> Result<Self> {
        if ratings.is_empty() {
            return Err(Error::invalid(
                "active profile must rate at least one algorithm",
            ));
        }
        if let Some((a, r)) = ratings.iter().find(|(_, r)| !r.is_finite()) {
            return Err(Error::invalid(format!(
                "active rating for `{a}` is not finite ({r})"
            )));
        }
        Ok(Self { ratings })
    }

    pub fn ratings(&self) -> &ScoreMap {
        &self.ratings
    }

    pub fn contains(&self, a: &AlgorithmId) -> bool {
        self.ratings.contains_key(a)
    }
}

/// A trained user-based CF model: the rating matrix plus neighbourhood
/// parameters. Prediction is a pure read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighbourModel {
    matrix: MetaRatingMatrix,
    config: NeighbourConfig,
}

impl NeighbourModel {
    pub fn new(matrix: MetaRatingMatrix, config: NeighbourConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { matrix, config })
    }

    pub fn matrix(&self) -> &MetaRatingMatrix {
        &self.matrix
    }

    pub fn config(&self) -> &NeighbourConfig {
        &self.config
    }

    fn check_active(&self, active: &ActiveProfile) -> Result<()> {
        for a in active.ratings.keys() {
            if self.matrix.algorithms().binary_search(a).is_err() {
                return Err(Error::invalid(format!(
                    "active profile rates `{a}`, which the model does not know"
                )));
            }
        }
        Ok(())
    }

    /// Rows rating `target`, most similar first (ties by dataset id),
    /// nonzero similarity only, truncated to `k`.
    pub fn neighbours(
        &self,
        active: &ActiveProfile,
        target: &AlgorithmId,
    ) -> Vec<(&DatasetId, f64)> {
        let cfg = &self.config;
        let mut cands: Vec<(&DatasetId, f64)> = self
            .matrix
            .rows()
            .iter()
            .filter(|(_, row)| row.contains_key(target))
            .map(|(d, row)| {
                (
                    d,
                    row_similarity(&active.ratings, row, cfg.similarity, cfg.min_overlap),
                )
            })
            .filter(|&(_, s)| s != 0.0)
            .collect();
        cands.sort_by(|(da, sa), (db, sb)| {
            sb.partial_cmp(sa)
                .unwrap_or(Ordering::Equal)
                .then_with(|| da.cmp(db))
        });
        cands.truncate(cfg.k);
        cands
    }

    /// Similarity-weighted mean of the neighbours' ratings for `target`,
    /// clamped to the scale. Without usable neighbours falls back to the
    /// mean rating of `target`, then to the scale midpoint.
    pub fn predict_rating(&self, active: &ActiveProfile, target: &AlgorithmId) -> Result<f64> {
        if active.contains(target) {
            return Err(Error::invalid(format!(
                "`{target}` is already rated by the active profile"
            )));
        }
        if self.matrix.algorithms().binary_search(target).is_err() {
            return Err(Error::invalid(format!(
                "unknown target algorithm `{target}`"
            )));
        }
        self.check_active(active)?;
        let scale = self.matrix.scale();
        let neighbours = self.neighbours(active, target);
        if !neighbours.is_empty() {
            let mut num = 0.0;
            let mut den = 0.0;
            for (d, s) in &neighbours {
                num += s * self.matrix.rows()[*d][target];
                den += s.abs();
            }
            return Ok(scale.clamp(num / den));
        }
        let observed: Vec<f64> = self
            .matrix
            .rows()
            .values()
            .filter_map(|row| row.get(target).copied())
            .collect();
        if observed.is_empty() {
            Ok(scale.midpoint())
        } else {
            Ok(observed.iter().sum::<f64>() / observed.len() as f64)
        }
    }

    /// Predictions for every algorithm the active profile leaves unrated.
    pub fn predict_all_missing(&self, active: &ActiveProfile) -> Result<ScoreMap> {
        self.check_active(active)?;
        self.matrix
            .algorithms()
            .iter()
            .filter(|a| !active.contains(a))
            .map(|a| Ok((a.clone(), self.predict_rating(active, a)?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta_model::RatingScale;
    use std::collections::BTreeMap;

    fn row(pairs: &[(&str, f64)]) -> ScoreMap {
        pairs.iter().map(|&(a, s)| (a.into(), s)).collect()
    }

    fn model(rows: &[(&str, &[(&str, f64)])], algs: &[&str], k: usize) -> NeighbourModel {
        let rows: BTreeMap<DatasetId, ScoreMap> = rows
            .iter()
            .map(|(d, r)| (DatasetId::from(*d), row(r)))
            .collect();
        let m = MetaRatingMatrix::new(
            algs.iter().map(|&a| a.into()).collect(),
            RatingScale::default(),
            rows,
        )
        .unwrap();
        NeighbourModel::new(
            m,
            NeighbourConfig {
                k,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn cosine_examples() {
        let u = row(&[("a1", 5.0), ("a2", 3.0)]);
        assert!((row_similarity(&u, &u, Similarity::Cosine, 2) - 1.0).abs() < 1e-15);
        let v = row(&[("a3", 4.0)]);
        assert_eq!(row_similarity(&u, &v, Similarity::Cosine, 1), 0.0);
        assert_eq!(row_similarity(&u, &v, Similarity::Pearson, 1), 0.0);
        let w = row(&[("a1", 4.0), ("a2", 2.0)]);
        let expect = 26.0 / (34f64.sqrt() * 20f64.sqrt());
        assert!((row_similarity(&u, &w, Similarity::Cosine, 2) - expect).abs() < 1e-12);
        assert!((expect - 0.99706).abs() < 1e-5);
    }

    #[test]
    fn overlap_below_minimum_is_zero() {
        let u = row(&[("a1", 5.0), ("a2", 3.0)]);
        let v = row(&[("a1", 5.0), ("a3", 3.0)]);
        assert_eq!(row_similarity(&u, &v, Similarity::Cosine, 2), 0.0);
        assert!(row_similarity(&u, &v, Similarity::Cosine, 1) > 0.99);
    }

    #[test]
    fn pearson_zero_variance_is_zero() {
        let u = row(&[("a1", 3.0), ("a2", 3.0)]);
        let v = row(&[("a1", 1.0), ("a2", 5.0)]);
        assert_eq!(row_similarity(&u, &v, Similarity::Pearson, 2), 0.0);
        let w = row(&[("a1", 5.0), ("a2", 1.0)]);
        assert!((row_similarity(&v, &w, Similarity::Pearson, 2) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_mean_prediction() {
        let m = model(
            &[
                ("d1", &[("a1", 5.0), ("a2", 3.0), ("a3", 1.0)]),
                ("d2", &[("a1", 4.0), ("a2", 2.0), ("a3", 1.0)]),
            ],
            &["a1", "a2", "a3"],
            2,
        );
        let active = ActiveProfile::new(row(&[("a1", 5.0), ("a2", 3.0)])).unwrap();
        let p = m.predict_rating(&active, &"a3".into()).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_identical_neighbour() {
        let m = model(
            &[("d1", &[("a1", 5.0), ("a2", 3.0), ("a3", 4.0)])],
            &["a1", "a2", "a3"],
            5,
        );
        let active = ActiveProfile::new(row(&[("a1", 5.0), ("a2", 3.0)])).unwrap();
        assert!((m.predict_rating(&active, &"a3".into()).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn falls_back_to_item_mean_then_midpoint() {
        let m = model(
            &[
                ("d1", &[("a1", 5.0), ("a3", 2.0)]),
                ("d2", &[("a2", 5.0), ("a3", 4.0)]),
            ],
            &["a1", "a2", "a3", "a4"],
            5,
        );
        // single-rating profile never reaches min_overlap = 2
        let active = ActiveProfile::new(row(&[("a1", 5.0)])).unwrap();
        assert_eq!(m.predict_rating(&active, &"a3".into()).unwrap(), 3.0);
        assert_eq!(m.predict_rating(&active, &"a4".into()).unwrap(), 3.0);
    }

    #[test]
    fn rejects_rated_or_unknown_target() {
        let m = model(&[("d1", &[("a1", 5.0), ("a2", 1.0)])], &["a1", "a2"], 1);
        let active = ActiveProfile::new(row(&[("a1", 5.0)])).unwrap();
        assert!(matches!(
            m.predict_rating(&active, &"a1".into()),
            Err(Error::InvalidInput(_))
        ));
        assert!(m.predict_rating(&active, &"zz".into()).is_err());
        let stranger = ActiveProfile::new(row(&[("zz", 5.0)])).unwrap();
        assert!(m.predict_all_missing(&stranger).is_err());
    }

    #[test]
    fn predict_all_missing_cardinality() {
        let m = model(
            &[
                (
                    "d1",
                    &[
                        ("a1", 5.0),
                        ("a2", 4.0),
                        ("a3", 3.0),
                        ("a4", 2.0),
                        ("a5", 1.0),
                    ],
                ),
                (
                    "d2",
                    &[
                        ("a1", 1.0),
                        ("a2", 2.0),
                        ("a3", 3.0),
                        ("a4", 4.0),
                        ("a5", 5.0),
                    ],
                ),
            ],
            &["a1", "a2", "a3", "a4", "a5"],
            5,
        );
        let full = ActiveProfile::new(m.matrix().rows()[&DatasetId::from("d1")].clone()).unwrap();
        assert!(m.predict_all_missing(&full).unwrap().is_empty());

        let mut almost = full.ratings().clone();
        almost.remove(&AlgorithmId::from("a5"));
        let almost = ActiveProfile::new(almost).unwrap();
        let all = m.predict_all_missing(&almost).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(
            all[&AlgorithmId::from("a5")],
            m.predict_rating(&almost, &"a5".into()).unwrap()
        );

        let two = ActiveProfile::new(row(&[("a1", 4.0), ("a4", 2.0)])).unwrap();
        let p = m.predict_all_missing(&two).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.values().all(|&r| (1.0..=5.0).contains(&r)));
    }

    #[test]
    fn config_validation() {
        assert!(NeighbourConfig {
            k: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(NeighbourConfig {
            min_overlap: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
