//! Experiment configuration, read from TOML.
//!
//! A minimal file names the dimension, the population, the alternatives and
//! the root seed; everything else has a documented default:
//!
//! ```toml
//! seed = 7
//! dimension = 2
//!
//! [population]
//! kind = "point-mass"
//! theta = [1.0, 0.0]
//!
//! [alternatives]
//! count = 12
//! [alternatives.space]
//! kind = "uniform-box"
//! lo = [0.0, 0.0]
//! hi = [1.0, 1.0]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annotation::{PairScheme, VoterAssignment};
use crate::audit::ConsistencyScheme;
use crate::distortion::{RegretSearch, WeightSpace};
use crate::error::{Error, Result};
use crate::estimation::FitOptions;
use crate::model::LabelScheme;
use crate::population::{AlternativeSpaceSpec, PopulationSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Root of every random stream in the run.
    pub seed: u64,
    pub dimension: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub population: PopulationSpec,
    pub alternatives: AlternativesConfig,
    #[serde(default)]
    pub voters: VotersConfig,
    #[serde(default)]
    pub annotation: AnnotationConfig,
    #[serde(default)]
    pub estimation: EstimationConfig,
    #[serde(default)]
    pub audit: AuditConfig,
    #[serde(default)]
    pub distortion: DistortionConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlternativesConfig {
    /// Slate size; defaults to the slate length for explicit slates and 20 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub space: AlternativeSpaceSpec,
}

impl AlternativesConfig {
    pub fn resolved_count(&self) -> usize {
        match (&self.count, &self.space) {
            (Some(n), _) => *n,
            (None, AlternativeSpaceSpec::ExplicitSlate { alternatives }) => alternatives.len(),
            (None, _) => 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VotersConfig {
    pub count: usize,
}

impl Default for VotersConfig {
    fn default() -> Self {
        Self { count: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnotationConfig {
    pub pairs: PairScheme,
    pub assignment: VoterAssignment,
    pub labels: LabelScheme,
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        Self {
            pairs: PairScheme::RoundRobin { repeats: 10 },
            assignment: VoterAssignment::default(),
            labels: LabelScheme::TrueReward,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimationConfig {
    pub lambda: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        let opts = FitOptions::<f64>::default();
        Self {
            lambda: 1e-3,
            grad_tol: opts.grad_tol,
            max_iters: opts.max_iters,
        }
    }
}

impl EstimationConfig {
    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            init: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditConfig {
    pub enabled: bool,
    pub epsilons: Vec<f64>,
    pub consistency: ConsistencyConfig,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            epsilons: vec![0.0, 0.1, 0.5],
            consistency: ConsistencyConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConsistencyConfig {
    pub enabled: bool,
    pub blocks: usize,
    pub min_fraction: f64,
    pub partitions: usize,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        let scheme = ConsistencyScheme::default();
        Self {
            enabled: true,
            blocks: scheme.blocks,
            min_fraction: scheme.min_fraction,
            partitions: scheme.partitions,
        }
    }
}

impl ConsistencyConfig {
    pub fn scheme(&self, seed: u64) -> ConsistencyScheme {
        ConsistencyScheme {
            blocks: self.blocks,
            min_fraction: self.min_fraction,
            partitions: self.partitions,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistortionConfig {
    pub enabled: bool,
    /// Likelihood slack admitted into the consistent set.
    pub delta: f64,
    pub resolution: usize,
    pub theta_bound: f64,
    pub weights: WeightSpace,
    /// Hypotheses drawn when the dimension is too large to grid.
    pub samples: usize,
}

impl Default for DistortionConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            delta: 1.0,
            resolution: 11,
            theta_bound: 2.0,
            weights: WeightSpace::default(),
            samples: 100_000,
        }
    }
}

impl DistortionConfig {
    pub fn search(&self, seed: u64) -> RegretSearch {
        RegretSearch {
            resolution: self.resolution,
            theta_bound: self.theta_bound,
            weights: self.weights.clone(),
            samples: self.samples,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub enabled: bool,
    /// Points per axis of the brute-force likelihood grid.
    pub resolution: usize,
    pub bound: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            resolution: 21,
            bound: 3.0,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a config document.
    pub fn from_toml(src: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(src).map_err(|e| {
            let line = e.span().map(|s| line_of(src, s.start));
            Error::Config {
                field: "<document>".into(),
                line,
                message: e.message().to_string(),
            }
        })?;
        config.validate().map_err(|e| match e {
            Error::Config { field, message, .. } => Error::Config {
                line: locate(src, &field),
                field,
                message,
            },
            other => other,
        })?;
        Ok(config)
    }

    /// Fully resolved TOML, every default spelled out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::config("dimension", "must be at least 1"));
        }
        let dim_matches = |field: &str, found: usize| -> Result<()> {
            if found == d {
                Ok(())
            } else {
                Err(Error::config(field, format!("has dimension {found}, expected {d}")))
            }
        };
        self.population.validate_at("population")?;
        dim_matches("population", self.population.dim())?;
        self.alternatives.space.validate_at("alternatives.space")?;
        dim_matches("alternatives.space", self.alternatives.space.dim())?;
        if self.alternatives.resolved_count() < 2 {
            return Err(Error::config("alternatives.count", "need at least two alternatives"));
        }
        if self.voters.count == 0 {
            return Err(Error::config("voters.count", "need at least one voter"));
        }
        match self.annotation.pairs {
            PairScheme::RoundRobin { repeats: 0 } => {
                return Err(Error::config("annotation.pairs.repeats", "must be at least 1"))
            }
            PairScheme::UniformRandomPairs { count: 0 } => {
                return Err(Error::config("annotation.pairs.count", "must be at least 1"))
            }
            _ => {}
        }
        if let LabelScheme::Proxy { w } = &self.annotation.labels {
            dim_matches("annotation.labels.w", w.dim())?;
        }
        let est = &self.estimation;
        if !(est.lambda >= 0.0 && est.lambda.is_finite()) {
            return Err(Error::config("estimation.lambda", "must be finite and >= 0"));
        }
        if !(est.grad_tol > 0.0 && est.grad_tol.is_finite()) {
            return Err(Error::config("estimation.grad_tol", "must be finite and > 0"));
        }
        for (i, eps) in self.audit.epsilons.iter().enumerate() {
            if !(*eps >= 0.0 && eps.is_finite()) {
                return Err(Error::config(format!("audit.epsilons[{i}]"), "must be finite and >= 0"));
            }
        }
        let scheme = self.audit.consistency.scheme(0);
        scheme.validate()?;
        let dist = &self.distortion;
        if !(dist.delta >= 0.0 && dist.delta.is_finite()) {
            return Err(Error::config("distortion.delta", "must be finite and >= 0"));
        }
        dist.search(0).validate(d)?;
        if self.verify.resolution < crate::oracle::MIN_ORACLE_RESOLUTION {
            return Err(Error::config(
                "verify.resolution",
                format!("must be at least {}", crate::oracle::MIN_ORACLE_RESOLUTION),
            ));
        }
        if !(self.verify.bound > 0.0 && self.verify.bound.is_finite()) {
            return Err(Error::config("verify.bound", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Config {
        field: path.display().to_string(),
        line: None,
        message: format!("cannot read config: {e}"),
    })?;
    ExperimentConfig::from_toml(&src)
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Best-effort line number of a dotted field path such as
/// `population.variance[1]`. Falls back to enclosing keys or tables.
fn locate(src: &str, field: &str) -> Option<usize> {
    let segments: Vec<&str> = field
        .split('.')
        .map(|s| s.split('[').next().unwrap_or(s))
        .filter(|s| !s.is_empty())
        .collect();
    for depth in (1..=segments.len()).rev() {
        let (table, key) = segments[..depth].split_at(depth - 1);
        if let Some(line) = find_key(src, &table.join("."), key[0]) {
            return Some(line);
        }
    }
    None
}

fn find_key(src: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (n, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(header) = line.strip_prefix('[') {
            let name = header.trim_start_matches('[').split(']').next().unwrap_or("").trim();
            if name == format!("{table}.{key}").trim_start_matches('.') {
                return Some(n + 1);
            }
            current = name.to_string();
            continue;
        }
        if current == table {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(n + 1);
                }
            }
        }
    }
    None
}
