use std::collections::BTreeMap;
use std::path::Path;

use cf4cf_core::evaluation::{self, EvaluationReport, MetaCorpus, Method};
use cf4cf_core::io::{self, ModelFile};
use cf4cf_core::metafeatures::{extract_full, extract_selected};
use cf4cf_core::pipeline::{self, DEFAULT_SUBSAMPLE_FRACTION};
use cf4cf_core::synth::generate_synthetic;
use cf4cf_core::{AlgoRanking, DatasetId, Error, Result, SyntheticSpec};
use serde::Serialize;

use crate::config::ExperimentConfig;

#[derive(Serialize)]
struct IngestSummary<'a> {
    schema_version: u32,
    datasets: usize,
    algorithms: usize,
    measures: Vec<&'a str>,
    performance_rows: usize,
    landmark_rows: Option<usize>,
    rating_files: BTreeMap<String, usize>,
}

pub fn ingest(cfg: &ExperimentConfig, subsample_fraction: Option<f64>) -> Result<()> {
    let out = cfg.out_dir()?;
    let perf = io::load_performance_csv(cfg.require(&cfg.performance, "performance")?)?;
    perf.validate_complete()?;
    io::write_performance_csv(&perf, &out.join("performance.csv"))?;

    let mut landmark_rows = None;
    if let Some(path) = &cfg.landmarks {
        let lm = io::load_performance_csv(path)?;
        lm.validate_complete()?;
        if lm.algorithms() != perf.algorithms() || lm.measures() != perf.measures() {
            return Err(Error::InvalidInput(
                "landmark table must cover the same algorithms and measures as the performance table".into(),
            ));
        }
        io::write_performance_csv(&lm, &out.join("landmarks.csv"))?;
        landmark_rows = Some(lm.len());
    }

    let mut rating_files = BTreeMap::new();
    if let Some(dir) = &cfg.ratings_dir {
        let fraction = subsample_fraction.unwrap_or(DEFAULT_SUBSAMPLE_FRACTION);
        let seed = cfg.seed()?;
        for (d, base) in io::load_ratings_dir(dir)? {
            let sample = pipeline::subsample_dataset(&base, fraction, seed)?;
            io::write_atomic(
                &out.join("subsamples").join(format!("{d}.csv")),
                io::base_ratings_csv(&sample).as_bytes(),
            )?;
            rating_files.insert(d.to_string(), base.n_ratings());
        }
    } else if subsample_fraction.is_some() {
        return Err(Error::InvalidInput(
            "--subsample-fraction needs --ratings-dir".into(),
        ));
    }

    let summary = IngestSummary {
        schema_version: 1,
        datasets: perf.datasets().len(),
        algorithms: perf.algorithms().len(),
        measures: perf.measures().iter().map(String::as_str).collect(),
        performance_rows: perf.len(),
        landmark_rows,
        rating_files,
    };
    io::write_json(&summary, &out.join("summary.json"))
}

pub fn metafeatures(cfg: &ExperimentConfig, full: bool) -> Result<()> {
    let dir = cfg.require(&cfg.ratings_dir, "ratings-dir")?;
    let features = io::load_ratings_dir(dir)?
        .into_iter()
        .map(|(d, base)| {
            let v = if full {
                extract_full(&base)
            } else {
                extract_selected(&base)
            };
            Ok((d, v?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    io::write_metafeatures_csv(&features, &cfg.out_dir()?.join("metafeatures.csv"))
}

pub fn train(cfg: &ExperimentConfig) -> Result<()> {
    let perf = io::load_performance_csv(cfg.require(&cfg.performance, "performance")?)?;
    let c = cfg.cf4cf()?;
    c.validate(perf.algorithms().len())?;
    let model = pipeline::train(&perf, perf.datasets(), &c)?;
    io::write_json(
        &ModelFile::new(c, model),
        &cfg.out_dir()?.join("model.json"),
    )
}

#[derive(Serialize)]
struct Predictions {
    schema_version: u32,
    method: Method,
    predictions: BTreeMap<DatasetId, AlgoRanking>,
}

pub fn predict(cfg: &ExperimentConfig, model_path: &Path, datasets: &[String]) -> Result<()> {
    let file: ModelFile = io::read_json(model_path)?;
    if file.schema_version != io::MODEL_SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported model schema version {}",
            file.schema_version
        )));
    }
    let landmarks = io::load_performance_csv(cfg.require(&cfg.landmarks, "landmarks")?)?;
    // prediction-time settings may be overridden; the trained matrix is fixed
    let mut c = file.config.clone();
    c.seed = cfg.seed()?;
    if let Some(n) = cfg.n_sl {
        c.n_sl = n;
    }
    if let Some(m) = &cfg.measure {
        if *m != c.measure {
            return Err(Error::InvalidInput(format!(
                "model was trained for measure `{}`, not `{m}`",
                c.measure
            )));
        }
    }
    c.validate(file.model.matrix().algorithms().len())?;
    let targets: Vec<DatasetId> = if datasets.is_empty() {
        landmarks.datasets().iter().cloned().collect()
    } else {
        datasets
            .iter()
            .map(|d| DatasetId::new(d.clone()))
            .collect::<Result<_>>()?
    };
    let predictions = targets
        .into_iter()
        .map(|d| {
            let r = pipeline::predict_dataset(&file.model, &landmarks, &d, &c)?;
            Ok((d, r))
        })
        .collect::<Result<_>>()?;
    let out = Predictions {
        schema_version: 1,
        method: Method::Cf4cf,
        predictions,
    };
    io::write_json(&out, &cfg.out_dir()?.join("predictions.json"))
}

fn load_corpus(cfg: &ExperimentConfig, methods: &[Method]) -> Result<MetaCorpus> {
    let performance = io::load_performance_csv(cfg.require(&cfg.performance, "performance")?)?;
    let landmarks = if methods.contains(&Method::Cf4cf) {
        Some(io::load_performance_csv(
            cfg.require(&cfg.landmarks, "landmarks")?,
        )?)
    } else {
        None
    };
    let metafeatures = if methods.contains(&Method::Mtl) {
        Some(io::load_metafeatures_csv(
            cfg.require(&cfg.metafeatures, "metafeatures")?,
        )?)
    } else {
        None
    };
    Ok(MetaCorpus {
        performance,
        landmarks,
        metafeatures,
    })
}

pub fn evaluate(cfg: &ExperimentConfig) -> Result<()> {
    let methods = cfg.methods(&[Method::Cf4cf])?;
    let corpus = load_corpus(cfg, &methods)?;
    let eval = cfg.eval()?;
    let out = cfg.out_dir()?;
    let mut reports: Vec<EvaluationReport> = Vec::new();
    for m in methods {
        let r = evaluation::loocv(&corpus, m, &eval)?;
        io::write_json(&r, &out.join(format!("report_{m}.json")))?;
        io::write_atomic(
            &out.join(format!("tau_{m}.csv")),
            io::tau_csv(&r).as_bytes(),
        )?;
        reports.push(r);
    }
    io::write_atomic(
        &out.join("impact.csv"),
        io::impact_curve_csv(&reports).as_bytes(),
    )
}

pub fn sweep(cfg: &ExperimentConfig, axis: Option<&str>, values: &[usize]) -> Result<()> {
    let axis = cfg.sweep_axis(axis)?;
    let values: Vec<usize> = if values.is_empty() {
        cfg.sweep_values
            .clone()
            .ok_or_else(|| Error::InvalidInput("missing sweep values (--values)".into()))?
    } else {
        values.to_vec()
    };
    let methods = cfg.methods(&[Method::Cf4cf])?;
    let corpus = load_corpus(cfg, &methods)?;
    let eval = cfg.eval()?;
    let mut axis_values = Vec::new();
    let mut reports = Vec::new();
    for m in &methods {
        for r in evaluation::sweep(&corpus, axis, &values, *m, &eval)? {
            reports.push(r);
        }
        axis_values.extend_from_slice(&values);
    }
    let out = cfg.out_dir()?;
    io::write_atomic(
        &out.join(format!("sweep_{}.csv", axis.as_str())),
        io::sweep_curve_csv(&axis_values, &reports).as_bytes(),
    )?;
    io::write_json(&reports, &out.join(format!("sweep_{}.json", axis.as_str())))
}

pub fn synth(cfg: &ExperimentConfig, mut spec: SyntheticSpec) -> Result<()> {
    spec.seed = cfg.seed()?;
    let corpus = generate_synthetic(&spec)?;
    let out = cfg.out_dir()?;
    io::write_performance_csv(&corpus.performance, &out.join("performance.csv"))?;
    io::write_performance_csv(&corpus.landmarks, &out.join("landmarks.csv"))?;
    io::write_metafeatures_csv(&corpus.metafeatures, &out.join("metafeatures.csv"))
}
