//! Browser bindings for interactive exploration of the selection pipeline.
//!
//! Every exported function takes plain numbers and returns a JSON string so
//! the page needs no generated type glue. The `*_data` helpers behind them
//! are ordinary Rust and are tested natively.

use cf4cf_core::evaluation::{loocv, sweep, EvaluationReport, SweepAxis};
use cf4cf_core::meta_model::rank_position_to_rating;
use cf4cf_core::synth::{generate_synthetic, SyntheticSpec};
use cf4cf_core::{Cf4cfConfig, EvalConfig, Method, RatingScale, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct RatingPoint {
    position: usize,
    rating: f64,
}

#[derive(Serialize)]
pub struct Curve {
    pub method: Method,
    pub x: Vec<usize>,
    pub y: Vec<f64>,
}

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn respond<T: Serialize>(r: Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(e) => serde_json::to_string(&Failure {
            error: e.to_string(),
        }),
    }
    .expect("plain data serializes")
}

pub fn rating_curve_data(m: usize, min: f64, max: f64) -> Result<Vec<(usize, f64)>> {
    let scale = RatingScale::new(min, max)?;
    (1..=m)
        .map(|j| Ok((j, rank_position_to_rating(j, m, scale)?)))
        .collect()
}

fn corpus_spec(
    n_datasets: usize,
    m: usize,
    clusters: usize,
    landmark_noise: f64,
    seed: u64,
) -> Result<SyntheticSpec> {
    let spec = SyntheticSpec {
        landmark_noise,
        ..SyntheticSpec::new(n_datasets, m, clusters, seed)
    };
    spec.validate()?;
    Ok(spec)
}

/// Mean tau per `n_sl` in `1..M` for every method (MTL and the baseline do
/// not depend on `n_sl`, so they come out flat).
pub fn landmark_sweep_data(
    n_datasets: usize,
    m: usize,
    clusters: usize,
    landmark_noise: f64,
    seed: u64,
) -> Result<Vec<Curve>> {
    let corpus = generate_synthetic(&corpus_spec(n_datasets, m, clusters, landmark_noise, seed)?)?
        .into_meta_corpus();
    let values: Vec<usize> = (1..m).collect();
    let cfg = EvalConfig::new(Cf4cfConfig::new("NDCG", 1, seed));
    Method::ALL
        .iter()
        .map(|&method| {
            let reports = sweep(&corpus, SweepAxis::NSl, &values, method, &cfg)?;
            Ok(Curve {
                method,
                x: values.clone(),
                y: reports.iter().map(|r| r.mean_tau).collect(),
            })
        })
        .collect()
}

/// Mean best base-level score among the top `t` picks, `t = 1..=M`.
pub fn impact_curves_data(
    n_datasets: usize,
    m: usize,
    clusters: usize,
    landmark_noise: f64,
    n_sl: usize,
    seed: u64,
) -> Result<Vec<Curve>> {
    let corpus = generate_synthetic(&corpus_spec(n_datasets, m, clusters, landmark_noise, seed)?)?
        .into_meta_corpus();
    let cfg = EvalConfig::new(Cf4cfConfig::new("NDCG", n_sl, seed));
    Method::ALL
        .iter()
        .map(|&method| {
            let r: EvaluationReport = loocv(&corpus, method, &cfg)?;
            Ok(Curve {
                method,
                x: (1..=m).collect(),
                y: r.impact["NDCG"].clone(),
            })
        })
        .collect()
}

#[wasm_bindgen]
pub fn rating_curve(m: usize, min: f64, max: f64) -> String {
    respond(rating_curve_data(m, min, max).map(|v| {
        v.into_iter()
            .map(|(position, rating)| RatingPoint { position, rating })
            .collect::<Vec<_>>()
    }))
}

#[wasm_bindgen]
pub fn landmark_sweep(
    n_datasets: usize,
    m: usize,
    clusters: usize,
    landmark_noise: f64,
    seed: u32,
) -> String {
    respond(landmark_sweep_data(
        n_datasets,
        m,
        clusters,
        landmark_noise,
        seed.into(),
    ))
}

#[wasm_bindgen]
pub fn impact_curves(
    n_datasets: usize,
    m: usize,
    clusters: usize,
    landmark_noise: f64,
    n_sl: usize,
    seed: u32,
) -> String {
    respond(impact_curves_data(
        n_datasets,
        m,
        clusters,
        landmark_noise,
        n_sl,
        seed.into(),
    ))
}
