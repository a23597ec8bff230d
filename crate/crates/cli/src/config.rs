//! Experiment configuration: an optional TOML file overlaid by flags.

use std::path::{Path, PathBuf};

use cf4cf_core::evaluation::{EvalConfig, Method, SweepAxis};
use cf4cf_core::{
    Cf4cfConfig, Error, LandmarkSampling, NeighbourConfig, RatingScale, Result, Similarity,
};
use clap::Args;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub performance: Option<PathBuf>,
    pub landmarks: Option<PathBuf>,
    pub metafeatures: Option<PathBuf>,
    pub ratings_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub measure: Option<String>,
    pub scale_min: Option<f64>,
    pub scale_max: Option<f64>,
    pub n_ratings: Option<usize>,
    pub n_sl: Option<usize>,
    pub k: Option<usize>,
    pub mtl_k: Option<usize>,
    pub similarity: Option<String>,
    pub min_overlap: Option<usize>,
    pub landmark_sampling: Option<String>,
    pub methods: Option<Vec<String>>,
    pub sweep_axis: Option<String>,
    pub sweep_values: Option<Vec<usize>>,
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML experiment config; relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Metatarget measure, e.g. NDCG or AUC.
    #[arg(long, global = true)]
    pub measure: Option<String>,
    #[arg(long, global = true)]
    pub scale_min: Option<f64>,
    #[arg(long, global = true)]
    pub scale_max: Option<f64>,
    /// Ratings kept per training row of the meta matrix (default: all).
    #[arg(long, global = true)]
    pub n_ratings: Option<usize>,
    /// Landmark ratings given to the CF model for a new dataset.
    #[arg(long, global = true)]
    pub n_sl: Option<usize>,
    /// Neighbourhood size of the CF model.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Neighbourhood size of the label ranker.
    #[arg(long, global = true)]
    pub mtl_k: Option<usize>,
    /// Comma-separated methods: cf4cf, mtl, baseline.
    #[arg(long, global = true, value_delimiter = ',')]
    pub method: Vec<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub performance: Option<PathBuf>,
    #[arg(long, global = true)]
    pub landmarks: Option<PathBuf>,
    #[arg(long, global = true)]
    pub metafeatures: Option<PathBuf>,
    #[arg(long, global = true)]
    pub ratings_dir: Option<PathBuf>,
}

fn resolve(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_relative() { base.join(p) } else { p })
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| {
            let line = e.span().map_or(0, |s| {
                text[..s.start.min(text.len())].matches('\n').count() as u64 + 1
            });
            Error::Parse {
                path: path.to_path_buf(),
                line,
                message: e.message().to_string(),
            }
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.performance = resolve(base, cfg.performance);
        cfg.landmarks = resolve(base, cfg.landmarks);
        cfg.metafeatures = resolve(base, cfg.metafeatures);
        cfg.ratings_dir = resolve(base, cfg.ratings_dir);
        cfg.out = resolve(base, cfg.out);
        Ok(cfg)
    }

    /// File config (if any) with flag overrides applied.
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        macro_rules! overlay {
            ($($field:ident),*) => {
                $( if args.$field.is_some() { cfg.$field = args.$field.clone(); } )*
            };
        }
        overlay!(
            seed,
            measure,
            scale_min,
            scale_max,
            n_ratings,
            n_sl,
            k,
            mtl_k,
            out,
            performance,
            landmarks,
            metafeatures,
            ratings_dir
        );
        if !args.method.is_empty() {
            cfg.methods = Some(args.method.clone());
        }
        Ok(cfg)
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::InvalidInput("a seed is required (--seed or `seed` in the config)".into())
        })
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("an output directory is required (--out)".into()))
    }

    pub fn require<'a>(&self, value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::InvalidInput(format!("missing required input --{flag}")))
    }

    pub fn scale(&self) -> Result<RatingScale> {
        let d = RatingScale::default();
        RatingScale::new(
            self.scale_min.unwrap_or(d.min()),
            self.scale_max.unwrap_or(d.max()),
        )
    }

    pub fn methods(&self, default: &[Method]) -> Result<Vec<Method>> {
        match &self.methods {
            Some(ms) if !ms.is_empty() => ms.iter().map(|m| m.parse()).collect(),
            _ => Ok(default.to_vec()),
        }
    }

    pub fn cf4cf(&self) -> Result<Cf4cfConfig> {
        let d = NeighbourConfig::default();
        let similarity: Similarity = match &self.similarity {
            Some(s) => s.parse()?,
            None => d.similarity,
        };
        let landmark_sampling: LandmarkSampling = match &self.landmark_sampling {
            Some(s) => s.parse()?,
            None => LandmarkSampling::default(),
        };
        Ok(Cf4cfConfig {
            measure: self.measure.clone().unwrap_or_else(|| "NDCG".to_string()),
            scale: self.scale()?,
            n_ratings: self.n_ratings,
            n_sl: self.n_sl.unwrap_or(4),
            seed: self.seed()?,
            cf: NeighbourConfig {
                k: self.k.unwrap_or(d.k),
                similarity,
                min_overlap: self.min_overlap.unwrap_or(d.min_overlap),
            },
            landmark_sampling,
        })
    }

    pub fn eval(&self) -> Result<EvalConfig> {
        let mut e = EvalConfig::new(self.cf4cf()?);
        if let Some(k) = self.mtl_k {
            e.mtl_k = k;
        }
        Ok(e)
    }

    pub fn sweep_axis(&self, flag: Option<&str>) -> Result<SweepAxis> {
        flag.or(self.sweep_axis.as_deref())
            .ok_or_else(|| Error::InvalidInput("missing sweep axis (--axis)".into()))?
            .parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        std::fs::write(
            &path,
            "seed = 3\nn_sl = 2\nperformance = \"perf.csv\"\nmethods = [\"mtl\"]\n",
        )
        .unwrap();
        let args = CommonArgs {
            config: Some(path),
            n_sl: Some(4),
            ..Default::default()
        };
        let cfg = ExperimentConfig::from_args(&args).unwrap();
        assert_eq!(cfg.seed, Some(3));
        assert_eq!(cfg.n_sl, Some(4));
        assert_eq!(
            cfg.performance.as_deref(),
            Some(dir.path().join("perf.csv").as_path())
        );
        assert_eq!(cfg.methods(&Method::ALL).unwrap(), vec![Method::Mtl]);
    }

    #[test]
    fn unknown_keys_and_missing_seed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        std::fs::write(&path, "seed = 1\nbogus = 2\n").unwrap();
        assert!(matches!(
            ExperimentConfig::load(&path),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(ExperimentConfig::default().seed().is_err());
        assert!(ExperimentConfig::default().cf4cf().is_err());
    }
}
