//! File formats: CSV for tables and curves, JSON for reports and models.
//! All writers go through a temp file in the target directory and rename
//! it into place.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::base::BaseRatingMatrix;
use crate::cf_engine::NeighbourModel;
use crate::error::{Error, Result};
use crate::evaluation::{EvaluationReport, Method};
use crate::meta_model::{AlgorithmId, DatasetId, PerformanceTable};
use crate::metafeatures::MetafeatureVector;
use crate::pipeline::Cf4cfConfig;

pub const PERFORMANCE_HEADER: [&str; 4] = ["dataset", "algorithm", "measure", "score"];
pub const RATINGS_HEADER: [&str; 3] = ["user", "item", "rating"];
pub const MODEL_SCHEMA_VERSION: u32 = 1;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Writes `bytes` to `path` via a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(bytes).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(io_err(path))
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, path: &Path, want: &[&str]) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    if !header.iter().eq(want.iter().copied()) {
        return Err(parse_err(
            path,
            1,
            format!(
                "expected header `{}`, got `{}`",
                want.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

fn parse_real(path: &Path, line: u64, field: &str, what: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| parse_err(path, line, format!("{what} `{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(
            path,
            line,
            format!("{what} `{field}` is not finite"),
        ));
    }
    Ok(v)
}

fn records<R: Read>(
    rdr: &mut csv::Reader<R>,
    path: &Path,
    width: usize,
) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(parse_err(
                path,
                line,
                format!("expected {width} fields, got {}", rec.len()),
            ));
        }
        out.push((line, rec));
    }
    Ok(out)
}

/// Parses `dataset,algorithm,measure,score` rows. `path` labels errors.
pub fn parse_performance_csv<R: Read>(input: R, path: &Path) -> Result<PerformanceTable> {
    let mut rdr = reader(input);
    check_header(&mut rdr, path, &PERFORMANCE_HEADER)?;
    let mut table = PerformanceTable::new();
    for (line, rec) in records(&mut rdr, path, 4)? {
        let d = DatasetId::new(&rec[0]).map_err(|e| parse_err(path, line, e.to_string()))?;
        let a = AlgorithmId::new(&rec[1]).map_err(|e| parse_err(path, line, e.to_string()))?;
        let measure = &rec[2];
        if measure.is_empty() {
            return Err(parse_err(path, line, "empty measure name"));
        }
        let score = parse_real(path, line, &rec[3], "score")?;
        if table.score(&d, &a, measure).is_some() {
            return Err(Error::DuplicateEntry {
                path: path.to_path_buf(),
                line,
                key: format!("({d}, {a}, {measure})"),
            });
        }
        table.insert(d, a, measure, score)?;
    }
    Ok(table)
}

pub fn load_performance_csv(path: &Path) -> Result<PerformanceTable> {
    parse_performance_csv(open(path)?, path)
}

pub fn performance_csv(table: &PerformanceTable) -> String {
    let mut s = PERFORMANCE_HEADER.join(",");
    s.push('\n');
    for (d, a, m, v) in table.rows() {
        let _ = writeln!(s, "{d},{a},{m},{v}");
    }
    s
}

pub fn write_performance_csv(table: &PerformanceTable, path: &Path) -> Result<()> {
    write_atomic(path, performance_csv(table).as_bytes())
}

pub fn parse_base_ratings_csv<R: Read>(input: R, path: &Path) -> Result<BaseRatingMatrix> {
    let mut rdr = reader(input);
    check_header(&mut rdr, path, &RATINGS_HEADER)?;
    let mut base = BaseRatingMatrix::new();
    let mut seen = HashSet::new();
    for (line, rec) in records(&mut rdr, path, 3)? {
        let (u, i) = (rec[0].to_string(), rec[1].to_string());
        if u.is_empty() || i.is_empty() {
            return Err(parse_err(path, line, "empty user or item id"));
        }
        let r = parse_real(path, line, &rec[2], "rating")?;
        if !seen.insert((u.clone(), i.clone())) {
            return Err(Error::DuplicateEntry {
                path: path.to_path_buf(),
                line,
                key: format!("({u}, {i})"),
            });
        }
        base.push(u, i, r)?;
    }
    Ok(base)
}

pub fn load_base_ratings_csv(path: &Path) -> Result<BaseRatingMatrix> {
    parse_base_ratings_csv(open(path)?, path)
}

pub fn base_ratings_csv(base: &BaseRatingMatrix) -> String {
    let mut s = RATINGS_HEADER.join(",");
    s.push('\n');
    for t in base.triples() {
        let _ = writeln!(s, "{},{},{}", t.user, t.item, t.rating);
    }
    s
}

/// Loads every `*.csv` in `dir` as one baselevel dataset named after the
/// file stem.
pub fn load_ratings_dir(dir: &Path) -> Result<BTreeMap<DatasetId, BaseRatingMatrix>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let stem = p
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            Ok((DatasetId::new(stem)?, load_base_ratings_csv(&p)?))
        })
        .collect()
}

/// Wide format: `dataset,<name_1>,...,<name_n>`.
pub fn metafeatures_csv(features: &BTreeMap<DatasetId, MetafeatureVector>) -> Result<String> {
    let mut s = String::from("dataset");
    let Some(first) = features.values().next() else {
        s.push('\n');
        return Ok(s);
    };
    for n in first.names() {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for (d, v) in features {
        if !v.same_names(first) {
            return Err(Error::invalid(format!(
                "dataset `{d}` has a different metafeature set"
            )));
        }
        s.push_str(d.as_str());
        for x in v.values() {
            let _ = write!(s, ",{x}");
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn write_metafeatures_csv(
    features: &BTreeMap<DatasetId, MetafeatureVector>,
    path: &Path,
) -> Result<()> {
    write_atomic(path, metafeatures_csv(features)?.as_bytes())
}

pub fn parse_metafeatures_csv<R: Read>(
    input: R,
    path: &Path,
) -> Result<BTreeMap<DatasetId, MetafeatureVector>> {
    let mut rdr = reader(input);
    let header = rdr
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    if header.get(0) != Some("dataset") || header.len() < 2 {
        return Err(parse_err(
            path,
            1,
            "expected header `dataset,<metafeature>,...`",
        ));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut out = BTreeMap::new();
    for (line, rec) in records(&mut rdr, path, header.len())? {
        let d = DatasetId::new(&rec[0]).map_err(|e| parse_err(path, line, e.to_string()))?;
        let values = names
            .iter()
            .zip(rec.iter().skip(1))
            .map(|(n, f)| Ok((n.clone(), parse_real(path, line, f, n)?)))
            .collect::<Result<Vec<_>>>()?;
        let v = MetafeatureVector::new(values).map_err(|e| parse_err(path, line, e.to_string()))?;
        if out.insert(d.clone(), v).is_some() {
            return Err(Error::DuplicateEntry {
                path: path.to_path_buf(),
                line,
                key: d.to_string(),
            });
        }
    }
    Ok(out)
}

pub fn load_metafeatures_csv(path: &Path) -> Result<BTreeMap<DatasetId, MetafeatureVector>> {
    parse_metafeatures_csv(open(path)?, path)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.line() as u64, e.to_string()))
}

/// `dataset,tau` per LOOCV fold.
pub fn tau_csv(report: &EvaluationReport) -> String {
    let mut s = String::from("dataset,tau\n");
    for (d, t) in &report.per_dataset_tau {
        let _ = writeln!(s, "{d},{t}");
    }
    s
}

/// One `axis_value,method,measure,mean_tau` row per report.
pub fn sweep_curve_csv(axis_values: &[usize], reports: &[EvaluationReport]) -> String {
    let mut s = String::from("axis_value,method,measure,mean_tau\n");
    for (v, r) in axis_values.iter().zip(reports) {
        let _ = writeln!(s, "{v},{},{},{}", r.method, r.config.measure(), r.mean_tau);
    }
    s
}

/// `t,method,measure,mean_best_score` rows for every impact curve.
pub fn impact_curve_csv(reports: &[EvaluationReport]) -> String {
    let mut s = String::from("t,method,measure,mean_best_score\n");
    for r in reports {
        for (measure, curve) in &r.impact {
            for (i, v) in curve.iter().enumerate() {
                let _ = writeln!(s, "{},{},{measure},{v}", i + 1, r.method);
            }
        }
    }
    s
}

/// A trained CF4CF model on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub config: Cf4cfConfig,
    pub model: NeighbourModel,
}

impl ModelFile {
    pub fn new(config: Cf4cfConfig, model: NeighbourModel) -> Self {
        Self {
            schema_version: MODEL_SCHEMA_VERSION,
            config,
            model,
        }
    }
}

/// A single prediction on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionFile {
    pub schema_version: u32,
    pub method: Method,
    pub dataset: DatasetId,
    pub ranking: crate::meta_model::AlgoRanking,
}
