//! Algorithm selection for collaborative filtering.
//!
//! Two competing metalearners share one evaluation harness:
//!
//! * [`pipeline`]: CF4CF, which treats datasets as users and algorithms as
//!   items. Algorithm rankings are converted to ratings, a user-based
//!   nearest-neighbour model ([`cf_engine`]) is trained on them, and a new
//!   dataset is described by a few ratings derived from subsampling
//!   landmarkers.
//! * [`mtl`]: k-nearest-neighbour label ranking over [`metafeatures`], plus
//!   an average-ranking baseline.
//!
//! [`evaluation`] scores both with Kendall's tau under leave-one-out and
//! with top-t impact on baselevel performance. [`io`] holds the file
//! formats and [`synth`] a seeded generator of clustered meta-experiments.

pub mod base;
pub mod cf_engine;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod meta_model;
pub mod metafeatures;
pub mod mtl;
pub mod pipeline;
mod seeding;
pub mod synth;

pub use base::{BaseRatingMatrix, RatingTriple};
pub use cf_engine::{ActiveProfile, NeighbourConfig, NeighbourModel, Similarity};
pub use error::{Error, Result};
pub use evaluation::{EvalConfig, EvaluationReport, MetaCorpus, Method, SweepAxis};
pub use meta_model::{
    AlgoRanking, AlgorithmId, DatasetId, LandmarkTable, MetaRatingMatrix, PerformanceTable,
    RatingScale, ScoreMap,
};
pub use metafeatures::MetafeatureVector;
pub use pipeline::{Cf4cfConfig, LandmarkSampling};
pub use synth::{SyntheticCorpus, SyntheticSpec};
