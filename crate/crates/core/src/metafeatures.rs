//! Systematic metafeatures of a baselevel rating matrix. Every feature is
//! named `object.function.post` and applies `function` to `object` (the
//! whole matrix `R`, its rows `U`, or its columns `I`), then summarises the
//! result with `post`. `nusers`, `nitems`, `nratings` and `sparsity` are
//! appended as plain counts.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::base::BaseRatingMatrix;
use crate::error::{Error, Result};

pub mod stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Object {
    /// All ratings of the matrix.
    R,
    /// Per-user rows.
    U,
    /// Per-item columns.
    I,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Function {
    Ratings,
    Count,
    Mean,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PostFunction {
    Max,
    Min,
    Mean,
    Sd,
    Median,
    Mode,
    Entropy,
    Gini,
    Skewness,
    Kurtosis,
}

impl Object {
    pub const ALL: [Object; 3] = [Object::R, Object::U, Object::I];
}

impl Function {
    pub const ALL: [Function; 4] = [
        Function::Ratings,
        Function::Count,
        Function::Mean,
        Function::Sum,
    ];
}

impl PostFunction {
    pub const ALL: [PostFunction; 10] = [
        PostFunction::Max,
        PostFunction::Min,
        PostFunction::Mean,
        PostFunction::Sd,
        PostFunction::Median,
        PostFunction::Mode,
        PostFunction::Entropy,
        PostFunction::Gini,
        PostFunction::Skewness,
        PostFunction::Kurtosis,
    ];

    pub fn apply(self, v: &[f64]) -> Result<f64> {
        if v.is_empty() {
            return Err(Error::invalid("post-function applied to an empty vector"));
        }
        Ok(match self {
            PostFunction::Max => stats::max(v),
            PostFunction::Min => stats::min(v),
            PostFunction::Mean => stats::mean(v),
            PostFunction::Sd => stats::sd(v),
            PostFunction::Median => stats::median(v),
            PostFunction::Mode => stats::mode(v),
            PostFunction::Entropy => stats::entropy(v),
            PostFunction::Gini => stats::gini(v)?,
            PostFunction::Skewness => stats::skewness(v),
            PostFunction::Kurtosis => stats::kurtosis(v),
        })
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Object::R => "R",
            Object::U => "U",
            Object::I => "I",
        })
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Function::Ratings => "ratings",
            Function::Count => "count",
            Function::Mean => "mean",
            Function::Sum => "sum",
        })
    }
}

impl fmt::Display for PostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PostFunction::Max => "max",
            PostFunction::Min => "min",
            PostFunction::Mean => "mean",
            PostFunction::Sd => "sd",
            PostFunction::Median => "median",
            PostFunction::Mode => "mode",
            PostFunction::Entropy => "entropy",
            PostFunction::Gini => "gini",
            PostFunction::Skewness => "skewness",
            PostFunction::Kurtosis => "kurtosis",
        })
    }
}

/// The selected subset, in reporting order.
pub const SELECTED: [&str; 12] = [
    "nusers",
    "R.ratings.kurtosis",
    "R.ratings.sd",
    "I.count.kurtosis",
    "I.count.min",
    "I.mean.entropy",
    "I.sum.skewness",
    "U.sum.entropy",
    "U.mean.min",
    "sparsity",
    "U.sum.kurtosis",
    "U.mean.skewness",
];

/// Number of features in the full systematic set.
pub const FULL_COUNT: usize = 74;

/// Ordered `name -> value` characterization of one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetafeatureVector {
    entries: Vec<(String, f64)>,
}

impl MetafeatureVector {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (name, v) in &entries {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("duplicate metafeature `{name}`")));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "metafeature `{name}` is not finite ({v})"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|&(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    pub fn same_names(&self, other: &MetafeatureVector) -> bool {
        self.names().eq(other.names())
    }
}

/// Per-group rating vectors (users or items), each sorted ascending.
fn groups(base: &BaseRatingMatrix, by_user: bool) -> Vec<Vec<f64>> {
    let mut g: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for t in base.triples() {
        let key = if by_user {
            t.user.as_str()
        } else {
            t.item.as_str()
        };
        g.entry(key).or_default().push(t.rating);
    }
    g.into_values()
        .map(|mut v| {
            v.sort_by(f64::total_cmp);
            v
        })
        .collect()
}

fn aggregate(groups: &[Vec<f64>], f: Function) -> Vec<f64> {
    groups
        .iter()
        .map(|v| match f {
            Function::Count => v.len() as f64,
            Function::Sum => v.iter().sum(),
            Function::Mean => v.iter().sum::<f64>() / v.len() as f64,
            Function::Ratings => unreachable!("ratings is only defined on R"),
        })
        .collect()
}

/// Extracts every valid `object.function.post` combination from the given
/// sets, in `objects × functions × post` order, followed by `nusers`,
/// `nitems`, `nratings` and `sparsity`. `ratings` pairs only with `R`;
/// `count`, `mean` and `sum` pair only with `U` and `I`.
pub fn extract_systematic(
    base: &BaseRatingMatrix,
    objects: &[Object],
    functions: &[Function],
    post: &[PostFunction],
) -> Result<MetafeatureVector> {
    if base.is_empty() {
        return Err(Error::invalid("cannot characterize an empty rating matrix"));
    }
    let mut all: Vec<f64> = base.triples().iter().map(|t| t.rating).collect();
    all.sort_by(f64::total_cmp);
    let users = groups(base, true);
    let items = groups(base, false);

    let mut entries = Vec::new();
    for &o in objects {
        for &f in functions {
            let values = match (o, f) {
                (Object::R, Function::Ratings) => all.clone(),
                (Object::U, f) if f != Function::Ratings => aggregate(&users, f),
                (Object::I, f) if f != Function::Ratings => aggregate(&items, f),
                _ => continue,
            };
            for &pf in post {
                entries.push((format!("{o}.{f}.{pf}"), pf.apply(&values)?));
            }
        }
    }
    let (nu, ni, nr) = (base.n_users(), base.n_items(), base.n_ratings());
    entries.push(("nusers".to_string(), nu as f64));
    entries.push(("nitems".to_string(), ni as f64));
    entries.push(("nratings".to_string(), nr as f64));
    entries.push((
        "sparsity".to_string(),
        1.0 - nr as f64 / (nu as f64 * ni as f64),
    ));
    MetafeatureVector::new(entries)
}

/// The complete systematic set.
pub fn extract_full(base: &BaseRatingMatrix) -> Result<MetafeatureVector> {
    extract_systematic(base, &Object::ALL, &Function::ALL, &PostFunction::ALL)
}

/// The twelve selected metafeatures, in [`SELECTED`] order.
pub fn extract_selected(base: &BaseRatingMatrix) -> Result<MetafeatureVector> {
    let full = extract_full(base)?;
    let entries = SELECTED
        .iter()
        .map(|&n| {
            (
                n.to_string(),
                full.get(n).expect("selected names are in the full set"),
            )
        })
        .collect();
    MetafeatureVector::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(triples: &[(&str, &str, f64)]) -> BaseRatingMatrix {
        BaseRatingMatrix::from_triples(
            triples
                .iter()
                .map(|&(u, i, r)| (u.to_string(), i.to_string(), r)),
        )
        .unwrap()
    }

    #[test]
    fn sparsity_of_half_filled() {
        let b = base(&[("u1", "i1", 1.0), ("u1", "i2", 2.0), ("u2", "i3", 3.0)]);
        let f = extract_full(&b).unwrap();
        assert_eq!(f.get("sparsity"), Some(0.5));
        assert_eq!(f.get("nusers"), Some(2.0));
        assert_eq!(f.get("nitems"), Some(3.0));
        assert_eq!(f.get("nratings"), Some(3.0));
    }

    #[test]
    fn constant_ratings() {
        let b = base(&[
            ("u1", "i1", 4.0),
            ("u2", "i1", 4.0),
            ("u2", "i2", 4.0),
            ("u3", "i3", 4.0),
        ]);
        let f = extract_full(&b).unwrap();
        assert_eq!(f.get("R.ratings.sd"), Some(0.0));
        assert_eq!(f.get("R.ratings.entropy"), Some(0.0));
        assert_eq!(f.get("R.ratings.gini"), Some(0.0));
    }

    #[test]
    fn user_count_mean() {
        let b = base(&[
            ("u1", "i1", 1.0),
            ("u1", "i2", 1.0),
            ("u2", "i1", 1.0),
            ("u2", "i2", 1.0),
            ("u2", "i3", 1.0),
            ("u2", "i4", 1.0),
        ]);
        let f = extract_full(&b).unwrap();
        assert_eq!(f.get("U.count.mean"), Some(3.0));
    }

    #[test]
    fn counts_and_order() {
        let b = base(&[("u1", "i1", 1.0), ("u2", "i2", 5.0)]);
        let full = extract_full(&b).unwrap();
        assert_eq!(full.len(), FULL_COUNT);
        let sel = extract_selected(&b).unwrap();
        assert_eq!(sel.len(), 12);
        assert!(sel.names().eq(SELECTED.iter().copied()));
    }

    #[test]
    fn selected_values() {
        let users: Vec<(String, String, f64)> = (0..7)
            .flat_map(|u| {
                (0..=u.min(3))
                    .map(move |i| (format!("u{u}"), format!("i{i}"), ((u + i) % 5 + 1) as f64))
            })
            .collect();
        let b = BaseRatingMatrix::from_triples(users).unwrap();
        let sel = extract_selected(&b).unwrap();
        assert_eq!(sel.get("nusers"), Some(7.0));
        // item i3 is rated by u3..u6 only
        assert_eq!(sel.get("I.count.min"), Some(4.0));
    }

    #[test]
    fn item_count_min_two() {
        let b = base(&[
            ("u1", "i1", 1.0),
            ("u2", "i1", 2.0),
            ("u3", "i1", 3.0),
            ("u1", "i2", 4.0),
            ("u2", "i2", 5.0),
        ]);
        assert_eq!(extract_selected(&b).unwrap().get("I.count.min"), Some(2.0));
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(matches!(
            extract_full(&BaseRatingMatrix::new()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn subset_extraction() {
        let b = base(&[("u1", "i1", 1.0), ("u2", "i2", 5.0)]);
        let v = extract_systematic(
            &b,
            &[Object::R, Object::U],
            &[Function::Ratings],
            &[PostFunction::Mean],
        )
        .unwrap();
        assert!(v
            .names()
            .eq(["R.ratings.mean", "nusers", "nitems", "nratings", "sparsity"]));
        assert_eq!(v.get("R.ratings.mean"), Some(3.0));
    }
}
