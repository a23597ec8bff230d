//! Baselevel rating data: sparse `(user, item, rating)` triples.

use std::collections::{BTreeSet, HashSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RatingTriple {
    pub user: String,
    pub item: String,
    pub rating: f64,
}

/// Sparse user × item rating matrix. The user and item universes may be
/// larger than the set of ids that appear in the triples (a subsample keeps
/// the universe of its parent).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BaseRatingMatrix {
    users: BTreeSet<String>,
    items: BTreeSet<String>,
    triples: Vec<RatingTriple>,
}

impl BaseRatingMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matrix whose universe is exactly the ids in `triples`.
    pub fn from_triples<I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String, f64)>,
    {
        let mut m = Self::new();
        let mut seen = HashSet::new();
        for (u, i, r) in triples {
            if !seen.insert((u.clone(), i.clone())) {
                return Err(Error::invalid(format!("duplicate rating for ({u}, {i})")));
            }
            m.push_unchecked(u, i, r)?;
        }
        Ok(m)
    }

    fn push_unchecked(&mut self, user: String, item: String, rating: f64) -> Result<()> {
        if user.is_empty() || item.is_empty() {
            return Err(Error::invalid("user and item ids must be non-empty"));
        }
        if !rating.is_finite() {
            return Err(Error::invalid(format!(
                "rating must be finite, got {rating}"
            )));
        }
        self.users.insert(user.clone());
        self.items.insert(item.clone());
        self.triples.push(RatingTriple { user, item, rating });
        Ok(())
    }

    pub(crate) fn push(&mut self, user: String, item: String, rating: f64) -> Result<()> {
        self.push_unchecked(user, item, rating)
    }

    pub fn triples(&self) -> &[RatingTriple] {
        &self.triples
    }

    pub fn users(&self) -> &BTreeSet<String> {
        &self.users
    }

    pub fn items(&self) -> &BTreeSet<String> {
        &self.items
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_ratings(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Uniform sample without replacement of `ceil(fraction * n)` triples.
/// Triples keep their original relative order and the user/item
/// universes are inherited.
pub fn subsample_dataset(
    base: &BaseRatingMatrix,
    fraction: f64,
    seed: u64,
) -> Result<BaseRatingMatrix> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!(
            "subsample fraction must lie in (0, 1), got {fraction}"
        )));
    }
    if base.is_empty() {
        return Err(Error::invalid("cannot subsample an empty rating matrix"));
    }
    let n = base.n_ratings();
    let keep = ((fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, keep).into_vec();
    picked.sort_unstable();
    Ok(BaseRatingMatrix {
        users: base.users.clone(),
        items: base.items.clone(),
        triples: picked
            .into_iter()
            .map(|i| base.triples[i].clone())
            .collect(),
    })
}
