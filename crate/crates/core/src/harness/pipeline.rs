//! Seeded end-to-end runs.
//!
//! A run is the sequence simulate, fit, audit, distort, verify. Each stage
//! reads what it needs from the output directory, so any suffix of the
//! sequence can be re-run against saved artifacts. Every invocation rewrites
//! `manifest.json` with the resolved config, the derived seeds, the status of
//! each stage it attempted and a SHA-256 of every artifact present. Wall-clock
//! measurements and the thread count go to `timing.json`, the one file that
//! is not reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::annotation::generate_dataset;
use crate::audit::{audit_condorcet, audit_consistency, audit_unanimity, Axiom, AxiomReport, MleTrainer, Verdict};
use crate::distortion::{worst_case_regret, DistortionReport};
use crate::error::{Error, Result};
use crate::estimation::{fit_mle, nll};
use crate::harness::config::ExperimentConfig;
use crate::harness::io::{format_dataset, format_slate, format_voters, parse_dataset, parse_slate, parse_voters, read_artifact};
use crate::model::{ComparisonRecord, FeatureVector, RewardModel, VoterParams};
use crate::oracle::{brute_force_mle, exhaustive_axiom_check, MleGrid, Reference, MAX_ORACLE_DIM, MAX_ORACLE_SLATE};
use crate::population::{sample_alternatives, sample_voters};
use crate::rng::derive_seed;

/// File names inside the output directory.
pub mod artifacts {
    pub const VOTERS: &str = "voters.txt";
    pub const SLATE: &str = "slate.txt";
    pub const DATASET: &str = "dataset.txt";
    pub const MODEL: &str = "model.json";
    pub const AUDIT: &str = "audit.json";
    pub const DISTORTION: &str = "distortion.json";
    pub const VERIFY: &str = "verify.json";
    pub const MANIFEST: &str = "manifest.json";
    pub const TIMING: &str = "timing.json";

    /// Everything the manifest hashes, in a fixed order.
    pub const HASHED: [&str; 7] = [VOTERS, SLATE, DATASET, MODEL, AUDIT, DISTORTION, VERIFY];
}

/// Slack allowed when comparing the grid optimum against the fitted NLL.
pub const VERIFY_NLL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Simulate,
    Fit,
    Audit,
    Distort,
    Verify,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Simulate, Stage::Fit, Stage::Audit, Stage::Distort, Stage::Verify];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Simulate => "simulate",
            Stage::Fit => "fit",
            Stage::Audit => "audit",
            Stage::Distort => "distort",
            Stage::Verify => "verify",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::input(format!("unknown stage `{s}` (expected simulate, fit, audit, distort or verify)")))
    }
}

/// Seeds of every random stream a run uses, derived from the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSeeds {
    pub root: u64,
    pub voters: u64,
    pub alternatives: u64,
    pub annotation: u64,
    pub consistency: u64,
    pub distortion: u64,
}

impl RunSeeds {
    pub fn derive(root: u64) -> Self {
        Self {
            root,
            voters: derive_seed(root, "simulate", 0),
            alternatives: derive_seed(root, "simulate", 1),
            annotation: derive_seed(root, "simulate", 2),
            consistency: derive_seed(root, "audit", 0),
            distortion: derive_seed(root, "distort", 0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Headline verdict of one audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub axiom: Axiom,
    pub epsilon: f64,
    pub verdict: String,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: ExperimentConfig,
    pub seeds: RunSeeds,
    pub stages: Vec<StageRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub audits: Vec<AuditSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_case_regret: Option<f64>,
    /// SHA-256 of each artifact present when the manifest was written.
    pub artifacts: BTreeMap<String, String>,
}

impl Manifest {
    pub fn status(&self, stage: Stage) -> Option<StageStatus> {
        self.stages.iter().find(|r| r.stage == stage).map(|r| r.status)
    }

    /// Verdict recorded for `(axiom, epsilon)`, if that audit ran.
    pub fn verdict(&self, axiom: Axiom, epsilon: f64) -> Option<&str> {
        self.audits
            .iter()
            .find(|a| a.axiom == axiom && a.epsilon == epsilon)
            .map(|a| a.verdict.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub threads: usize,
    pub total_seconds: f64,
    pub stages: BTreeMap<String, f64>,
}

/// Result of cross-checking a run against the brute-force oracles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mle: Option<MleCheck>,
    pub axioms: Vec<AxiomCheck>,
    pub notes: Vec<String>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleCheck {
    pub grid: MleGrid,
    pub grid_theta: FeatureVector,
    pub grid_nll: f64,
    pub fit_nll: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub epsilon: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub stages: Vec<Stage>,
}

impl RunOptions {
    /// Every stage, into the config's output directory.
    pub fn for_config(config: &ExperimentConfig) -> Self {
        Self {
            out_dir: config.output_dir.clone(),
            threads: None,
            stages: Stage::ALL.to_vec(),
        }
    }

    pub fn stages(mut self, stages: &[Stage]) -> Self {
        self.stages = stages.to_vec();
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn out_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.out_dir = dir.into();
        self
    }
}

/// Runs the requested stages in pipeline order and writes the manifest.
///
/// On a stage error the manifest is still written, with that stage marked
/// failed, and the error is returned.
pub fn run_pipeline(config: &ExperimentConfig, opts: &RunOptions) -> Result<Manifest> {
    config.validate()?;
    if opts.stages.is_empty() {
        return Err(Error::input("no stages requested"));
    }
    match opts.threads {
        Some(0) => Err(Error::input("thread count must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Numeric(format!("cannot start thread pool: {e}")))?;
            pool.install(|| run_stages(config, opts, n))
        }
        None => run_stages(config, opts, rayon::current_num_threads()),
    }
}

fn run_stages(config: &ExperimentConfig, opts: &RunOptions, threads: usize) -> Result<Manifest> {
    let dir = &opts.out_dir;
    fs::create_dir_all(dir)?;
    let seeds = RunSeeds::derive(config.seed);
    let mut stages: Vec<Stage> = opts.stages.clone();
    stages.sort();
    stages.dedup();

    let start = Instant::now();
    let mut timing = BTreeMap::new();
    let mut records = Vec::new();
    let mut failure = None;
    for stage in stages {
        let t0 = Instant::now();
        log::info!("stage {stage}: starting");
        let outcome = match stage {
            Stage::Simulate => simulate(config, &seeds, dir),
            Stage::Fit => fit(config, dir),
            Stage::Audit => audit(config, &seeds, dir),
            Stage::Distort => distort(config, &seeds, dir),
            Stage::Verify => verify(config, dir),
        };
        timing.insert(stage.name().to_string(), t0.elapsed().as_secs_f64());
        match outcome {
            Ok(note) => {
                let status = if note.as_deref().is_some_and(|n| n.starts_with("skipped")) {
                    StageStatus::Skipped
                } else {
                    StageStatus::Ok
                };
                log::info!("stage {stage}: {status:?}");
                records.push(StageRecord { stage, status, note });
            }
            Err(e) => {
                log::error!("stage {stage} failed: {e}");
                records.push(StageRecord {
                    stage,
                    status: StageStatus::Failed,
                    note: Some(e.to_string()),
                });
                failure = Some(e);
                break;
            }
        }
    }

    let manifest = build_manifest(config, seeds, records, dir)?;
    write_json(&dir.join(artifacts::MANIFEST), &manifest)?;
    let timing = Timing {
        threads,
        total_seconds: start.elapsed().as_secs_f64(),
        stages: timing,
    };
    write_json(&dir.join(artifacts::TIMING), &timing)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

fn build_manifest(config: &ExperimentConfig, seeds: RunSeeds, stages: Vec<StageRecord>, dir: &Path) -> Result<Manifest> {
    let mut hashes = BTreeMap::new();
    for name in artifacts::HASHED {
        let path = dir.join(name);
        if path.exists() {
            hashes.insert(name.to_string(), sha256_hex(&fs::read(&path)?));
        }
    }
    let audits = match fs::read_to_string(dir.join(artifacts::AUDIT)) {
        Ok(text) if stages.iter().any(|r| r.stage == Stage::Audit && r.status == StageStatus::Ok) => {
            let reports: Vec<AxiomReport> = serde_json::from_str(&text)?;
            reports
                .iter()
                .map(|r| AuditSummary {
                    axiom: r.axiom,
                    epsilon: r.epsilon,
                    verdict: r.verdict().to_string(),
                    violations: r.violations.len(),
                })
                .collect()
        }
        _ => Vec::new(),
    };
    let worst_case_regret = match fs::read_to_string(dir.join(artifacts::DISTORTION)) {
        Ok(text) if stages.iter().any(|r| r.stage == Stage::Distort && r.status == StageStatus::Ok) => {
            serde_json::from_str::<DistortionReport>(&text)?.worst_case_regret
        }
        _ => None,
    };
    Ok(Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        seeds,
        stages,
        audits,
        worst_case_regret,
        artifacts: hashes,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(fs::write(path, text)?)
}

fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    Ok(serde_json::from_str(&read_artifact(path)?)?)
}

/// Saved artifacts of a run directory, loaded on demand.
pub fn load_voters(dir: &Path) -> Result<Vec<VoterParams>> {
    parse_voters(&read_artifact(&dir.join(artifacts::VOTERS))?)
}

pub fn load_slate(dir: &Path) -> Result<Vec<FeatureVector>> {
    parse_slate(&read_artifact(&dir.join(artifacts::SLATE))?)
}

pub fn load_dataset(dir: &Path) -> Result<Vec<ComparisonRecord>> {
    parse_dataset(&read_artifact(&dir.join(artifacts::DATASET))?)
}

pub fn load_model(dir: &Path) -> Result<RewardModel> {
    read_json(&dir.join(artifacts::MODEL))
}

pub fn load_audits(dir: &Path) -> Result<Vec<AxiomReport>> {
    read_json(&dir.join(artifacts::AUDIT))
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    read_json(&dir.join(artifacts::MANIFEST))
}

type StageResult = Result<Option<String>>;

fn simulate(config: &ExperimentConfig, seeds: &RunSeeds, dir: &Path) -> StageResult {
    let voters = sample_voters(&config.population, config.voters.count, seeds.voters)?;
    let slate = sample_alternatives(&config.alternatives.space, config.alternatives.resolved_count(), seeds.alternatives)?;
    let ann = &config.annotation;
    let data = generate_dataset(&voters, &slate, ann.pairs, ann.assignment, &ann.labels, seeds.annotation)?;
    fs::write(dir.join(artifacts::VOTERS), format_voters(&voters))?;
    fs::write(dir.join(artifacts::SLATE), format_slate(&slate))?;
    fs::write(dir.join(artifacts::DATASET), format_dataset(&data))?;
    Ok(Some(format!("{} voters, {} alternatives, {} comparisons", voters.len(), slate.len(), data.len())))
}

fn fit(config: &ExperimentConfig, dir: &Path) -> StageResult {
    let data = load_dataset(dir)?;
    let model = fit_mle(&data, config.estimation.lambda, &config.estimation.fit_options())?;
    if !model.converged {
        log::warn!(
            "fit did not converge after {} iterations: {}",
            model.iterations,
            model.diagnostic.as_deref().unwrap_or("no diagnostic")
        );
    }
    write_json(&dir.join(artifacts::MODEL), &model)?;
    Ok(Some(format!(
        "{} after {} iterations",
        if model.converged { "converged" } else { "not converged" },
        model.iterations
    )))
}

fn audit(config: &ExperimentConfig, seeds: &RunSeeds, dir: &Path) -> StageResult {
    let path = dir.join(artifacts::AUDIT);
    if !config.audit.enabled {
        remove_stale(&path)?;
        return Ok(Some("skipped: audits disabled".into()));
    }
    let model = load_model(dir)?;
    let slate = load_slate(dir)?;
    let voters = load_voters(dir)?;
    let data = if config.audit.consistency.enabled { Some(load_dataset(dir)?) } else { None };
    let trainer = MleTrainer {
        lambda: config.estimation.lambda,
        options: config.estimation.fit_options(),
    };
    let scheme = config.audit.consistency.scheme(seeds.consistency);
    let mut reports = Vec::new();
    for &eps in &config.audit.epsilons {
        reports.push(audit_unanimity(&model, &slate, &voters, eps)?);
        reports.push(audit_condorcet(&model, &slate, &config.population, eps)?);
        if let Some(data) = &data {
            reports.push(audit_consistency(&model, &trainer, data, &slate, eps, &scheme)?);
        }
    }
    write_json(&path, &reports)?;
    let failed = reports.iter().filter(|r| r.verdict() == Verdict::Fail).count();
    Ok(Some(format!("{} reports, {failed} failing", reports.len())))
}

fn distort(config: &ExperimentConfig, seeds: &RunSeeds, dir: &Path) -> StageResult {
    let path = dir.join(artifacts::DISTORTION);
    if !config.distortion.enabled {
        remove_stale(&path)?;
        return Ok(Some("skipped: distortion disabled".into()));
    }
    let model = load_model(dir)?;
    let slate = load_slate(dir)?;
    let data = load_dataset(dir)?;
    let report = worst_case_regret(
        &model,
        &slate,
        &data,
        config.distortion.delta,
        &config.distortion.search(seeds.distortion),
    )?;
    write_json(&path, &report)?;
    Ok(Some(match report.worst_case_regret {
        Some(r) => format!("worst-case regret {r}"),
        None => "no consistent hypothesis".into(),
    }))
}

fn verify(config: &ExperimentConfig, dir: &Path) -> StageResult {
    let path = dir.join(artifacts::VERIFY);
    if !config.verify.enabled {
        remove_stale(&path)?;
        return Ok(Some("skipped: verification disabled".into()));
    }
    let model = load_model(dir)?;
    let slate = load_slate(dir)?;
    let voters = load_voters(dir)?;
    let mut notes = Vec::new();

    let mle = if config.dimension <= MAX_ORACLE_DIM {
        let data = load_dataset(dir)?;
        let grid = MleGrid::symmetric(config.verify.resolution, config.verify.bound);
        let lambda = config.estimation.lambda;
        let grid_theta = brute_force_mle(&data, lambda, &grid)?;
        let grid_nll = nll(&grid_theta, &data, lambda)?;
        Some(MleCheck {
            grid,
            ok: grid_nll >= model.final_nll - VERIFY_NLL_SLACK,
            grid_theta,
            grid_nll,
            fit_nll: model.final_nll,
        })
    } else {
        notes.push(format!("likelihood grid skipped: dimension {} exceeds {MAX_ORACLE_DIM}", config.dimension));
        None
    };

    let mut axioms = Vec::new();
    if slate.len() <= MAX_ORACLE_SLATE {
        for &eps in &config.audit.epsilons {
            let fast = audit_unanimity(&model, &slate, &voters, eps)?;
            let slow = exhaustive_axiom_check(&model, &slate, Reference::Voters(&voters), eps, Axiom::Unanimity)?;
            axioms.push(AxiomCheck {
                axiom: Axiom::Unanimity,
                epsilon: eps,
                agrees: fast == slow,
            });
            let fast = audit_condorcet(&model, &slate, &config.population, eps)?;
            let slow =
                exhaustive_axiom_check(&model, &slate, Reference::Population(&config.population), eps, Axiom::Condorcet)?;
            axioms.push(AxiomCheck {
                axiom: Axiom::Condorcet,
                epsilon: eps,
                agrees: fast == slow,
            });
        }
    } else {
        notes.push(format!("axiom cross-check skipped: slate of {} exceeds {MAX_ORACLE_SLATE}", slate.len()));
    }

    let ok = mle.as_ref().is_none_or(|m| m.ok) && axioms.iter().all(|a| a.agrees);
    let report = VerifyReport { mle, axioms, notes, ok };
    write_json(&path, &report)?;
    if !ok {
        return Err(Error::Numeric(format!(
            "oracle cross-check disagrees with the main implementation; see {}",
            path.display()
        )));
    }
    Ok(Some(format!("{} axiom checks agree", report.axioms.len())))
}

fn remove_stale(path: &Path) -> Result<()> {
    match fs::remove_file(path) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
seed = 11
dimension = 2

[population]
kind = "point-mass"
theta = [1.0, -0.5]

[alternatives]
count = 6
[alternatives.space]
kind = "uniform-box"
lo = [0.0, 0.0]
hi = [1.0, 1.0]

[voters]
count = 8

[annotation.pairs]
kind = "round-robin"
repeats = 20

[audit]
epsilons = [0.0]

[audit.consistency]
partitions = 3

[distortion]
resolution = 7
"#;

    fn config() -> ExperimentConfig {
        ExperimentConfig::from_toml(SMALL).unwrap()
    }

    #[test]
    fn full_run_writes_every_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let m = run_pipeline(&config(), &RunOptions::for_config(&config()).out_dir(dir.path())).unwrap();
        for name in artifacts::HASHED {
            assert!(dir.path().join(name).exists(), "{name}");
            assert!(m.artifacts.contains_key(name));
        }
        assert!(m.stages.iter().all(|s| s.status == StageStatus::Ok), "{:?}", m.stages);
        assert_eq!(m.verdict(Axiom::Unanimity, 0.0), Some("PASS"));
        assert_eq!(load_manifest(dir.path()).unwrap(), m);
    }

    #[test]
    fn disabled_distortion_is_skipped() {
        let mut c = config();
        c.distortion.enabled = false;
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(artifacts::DISTORTION), "stale").unwrap();
        let m = run_pipeline(&c, &RunOptions::for_config(&c).out_dir(dir.path())).unwrap();
        assert_eq!(m.status(Stage::Distort), Some(StageStatus::Skipped));
        assert!(!dir.path().join(artifacts::DISTORTION).exists());
        let text = fs::read_to_string(dir.path().join(artifacts::MANIFEST)).unwrap();
        assert!(text.contains("\"skipped\""));
    }

    #[test]
    fn single_stage_needs_prior_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let c = config();
        let err = run_pipeline(&c, &RunOptions::for_config(&c).out_dir(dir.path()).stages(&[Stage::Fit])).unwrap_err();
        assert!(matches!(err, Error::MissingArtifact(ref p) if p.ends_with(artifacts::DATASET)), "{err:?}");
        let m = load_manifest(dir.path()).unwrap();
        assert_eq!(m.status(Stage::Fit), Some(StageStatus::Failed));
    }

    #[test]
    fn stages_can_be_rerun_separately() {
        let c = config();
        let whole = tempfile::tempdir().unwrap();
        run_pipeline(&c, &RunOptions::for_config(&c).out_dir(whole.path())).unwrap();
        let split = tempfile::tempdir().unwrap();
        for stage in Stage::ALL {
            run_pipeline(&c, &RunOptions::for_config(&c).out_dir(split.path()).stages(&[stage])).unwrap();
        }
        for name in artifacts::HASHED {
            assert_eq!(
                fs::read(whole.path().join(name)).unwrap(),
                fs::read(split.path().join(name)).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn manifest_echoes_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let c = config();
        run_pipeline(&c, &RunOptions::for_config(&c).out_dir(dir.path()).stages(&[Stage::Simulate])).unwrap();
        let text = fs::read_to_string(dir.path().join(artifacts::MANIFEST)).unwrap();
        for key in ["\"lambda\"", "\"grad_tol\"", "\"max_iters\"", "\"min_fraction\"", "\"theta_bound\"", "\"assignment\""] {
            assert!(text.contains(key), "{key} missing");
        }
    }

    #[test]
    fn stage_names_parse() {
        for s in Stage::ALL {
            assert_eq!(s.name().parse::<Stage>().unwrap(), s);
        }
        assert!("plot".parse::<Stage>().is_err());
    }
}
