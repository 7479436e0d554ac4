//! Axiom audits for a fitted preference-modeling voting rule.
//!
//! Each audit quantifies over a finite slate. For every anchor `a` it builds
//! the dominated set `A'_a` (alternatives the reference preference says `a`
//! beats by more than `epsilon`) and records a violation wherever the rule's
//! score gap `f(a) - f(a')` fails to exceed `epsilon`.
//!
//! * unanimity: `A'_a` uses the minimum reward gap over the sampled voters;
//! * Condorcet consistency: `A'_a` uses the analytic population-mean gap;
//! * consistency: `A'_a` holds the alternatives every block model of a voter
//!   partition ranks below `a` by more than `epsilon`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::estimation::{fit_mle, FitOptions};
use crate::model::{dot, ComparisonRecord, FeatureVector, RewardModel, VoterId, VoterParams};
use crate::population::PopulationSpec;
use crate::rng::stream;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Unanimity,
    Condorcet,
    Consistency,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Unanimity => "unanimity",
            Axiom::Condorcet => "condorcet",
            Axiom::Consistency => "consistency",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unanimity" => Ok(Axiom::Unanimity),
            "condorcet" => Ok(Axiom::Condorcet),
            "consistency" => Ok(Axiom::Consistency),
            other => Err(Error::input(format!("unknown axiom `{other}`"))),
        }
    }
}

/// Result for one anchor alternative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AnchorResult<T: Scalar = f64> {
    pub anchor: usize,
    /// Slate indices in `A'_a`, ascending.
    pub dominated: Vec<usize>,
    /// Members of `dominated` whose score gap did not exceed epsilon.
    pub violations: Vec<usize>,
    /// `min over A'_a of (f(a) - f(a') - epsilon)`; absent when `A'_a` is empty.
    pub min_margin: Option<T>,
}

impl<T: Scalar> AnchorResult<T> {
    pub fn vacuous(&self) -> bool {
        self.dominated.is_empty()
    }

    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// How the consistency audit draws voter subsets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyScheme {
    /// Blocks per partition.
    #[serde(default = "ConsistencyScheme::default_blocks")]
    pub blocks: usize,
    /// Every block must hold at least this fraction of the voters.
    #[serde(default = "ConsistencyScheme::default_min_fraction")]
    pub min_fraction: f64,
    #[serde(default = "ConsistencyScheme::default_partitions")]
    pub partitions: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ConsistencyScheme {
    fn default_blocks() -> usize {
        2
    }
    fn default_min_fraction() -> f64 {
        0.4
    }
    fn default_partitions() -> usize {
        10
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks < 1 {
            return Err(Error::config("audit.consistency.blocks", "need at least one block"));
        }
        if self.partitions < 1 {
            return Err(Error::config("audit.consistency.partitions", "need at least one partition"));
        }
        if !(0.0..=1.0).contains(&self.min_fraction) {
            return Err(Error::config("audit.consistency.min_fraction", "must lie in [0, 1]"));
        }
        if self.blocks as f64 * self.min_fraction > 1.0 + 1e-12 {
            return Err(Error::config(
                "audit.consistency.min_fraction",
                format!(
                    "{} blocks of at least {} of the voters cannot fit in one partition",
                    self.blocks, self.min_fraction
                ),
            ));
        }
        Ok(())
    }
}

impl Default for ConsistencyScheme {
    fn default() -> Self {
        Self {
            blocks: Self::default_blocks(),
            min_fraction: Self::default_min_fraction(),
            partitions: Self::default_partitions(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub voter_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<ConsistencyScheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions_evaluated: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions_skipped: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions_passed: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AxiomReport<T: Scalar = f64> {
    pub axiom: Axiom,
    pub epsilon: T,
    pub slate_size: usize,
    pub anchors: Vec<AnchorResult<T>>,
    /// Every violating `(anchor, dominated)` pair.
    pub violations: Vec<(usize, usize)>,
    pub pass: bool,
    pub metadata: AuditMetadata,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Passed only because every dominated set was empty.
    VacuousPass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::VacuousPass => "VACUOUS",
            Verdict::Fail => "FAIL",
        })
    }
}

impl<T: Scalar> AxiomReport<T> {
    pub(crate) fn assemble(
        axiom: Axiom,
        epsilon: T,
        slate_size: usize,
        anchors: Vec<AnchorResult<T>>,
        metadata: AuditMetadata,
    ) -> Self {
        let violations: Vec<(usize, usize)> = anchors
            .iter()
            .flat_map(|r| r.violations.iter().map(move |&j| (r.anchor, j)))
            .collect();
        Self {
            axiom,
            epsilon,
            slate_size,
            pass: violations.is_empty(),
            anchors,
            violations,
            metadata,
        }
    }

    /// True when no anchor has a non-empty dominated set.
    pub fn vacuous(&self) -> bool {
        self.anchors.iter().all(AnchorResult::vacuous)
    }

    pub fn vacuous_anchors(&self) -> Vec<usize> {
        self.anchors.iter().filter(|r| r.vacuous()).map(|r| r.anchor).collect()
    }

    pub fn dominated_pairs(&self) -> usize {
        self.anchors.iter().map(|r| r.dominated.len()).sum()
    }

    pub fn verdict(&self) -> Verdict {
        match (self.pass, self.vacuous()) {
            (false, _) => Verdict::Fail,
            (true, true) => Verdict::VacuousPass,
            (true, false) => Verdict::Pass,
        }
    }

    /// Smallest margin across all anchors.
    pub fn min_margin(&self) -> Option<T> {
        self.anchors.iter().filter_map(|r| r.min_margin).reduce(|a, b| a.min(b))
    }
}

fn check_slate<T: Scalar>(model: &RewardModel<T>, slate: &[FeatureVector<T>], epsilon: T) -> Result<()> {
    if slate.len() < 2 {
        return Err(Error::input("axiom audits need a slate of at least two alternatives"));
    }
    if !(epsilon >= T::zero() && epsilon.is_finite()) {
        return Err(Error::input(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    for a in slate {
        check_dim(model.dim(), a.dim())?;
    }
    Ok(())
}

/// Per-anchor evaluation shared by all audits. `dominates(i, j)` decides
/// membership of `j` in `A'_i`; `j == i` is never considered.
fn evaluate_anchors<T, D>(scores: &[T], epsilon: T, dominates: D) -> Vec<AnchorResult<T>>
where
    T: Scalar,
    D: Fn(usize, usize) -> bool + Sync,
{
    (0..scores.len())
        .into_par_iter()
        .map(|i| {
            let mut result = AnchorResult {
                anchor: i,
                dominated: Vec::new(),
                violations: Vec::new(),
                min_margin: None,
            };
            for j in (0..scores.len()).filter(|&j| j != i) {
                if !dominates(i, j) {
                    continue;
                }
                result.dominated.push(j);
                let gap = scores[i] - scores[j];
                let margin = gap - epsilon;
                result.min_margin = Some(result.min_margin.map_or(margin, |m: T| m.min(margin)));
                if gap <= epsilon || gap.is_nan() {
                    result.violations.push(j);
                }
            }
            result
        })
        .collect()
}

fn scores<T: Scalar>(model: &RewardModel<T>, slate: &[FeatureVector<T>]) -> Vec<T> {
    slate.iter().map(|a| dot(model.theta_hat.coords(), a.coords())).collect()
}

fn diff_matrix<T: Scalar>(slate: &[FeatureVector<T>]) -> Vec<Vec<Vec<T>>> {
    slate
        .iter()
        .map(|a| {
            slate
                .iter()
                .map(|b| a.coords().iter().zip(b.coords()).map(|(&x, &y)| x - y).collect())
                .collect()
        })
        .collect()
}

/// Empirical epsilon-unanimity over the slate: `A'_a` holds the `a'` for
/// which every sampled voter's reward gap exceeds `epsilon`.
pub fn audit_unanimity<T: Scalar>(
    model: &RewardModel<T>,
    slate: &[FeatureVector<T>],
    voters: &[VoterParams<T>],
    epsilon: T,
) -> Result<AxiomReport<T>> {
    check_slate(model, slate, epsilon)?;
    if voters.is_empty() {
        return Err(Error::input("unanimity audit needs at least one voter"));
    }
    for v in voters {
        check_dim(model.dim(), v.theta.dim())?;
    }
    let diffs = diff_matrix(slate);
    let s = scores(model, slate);
    let anchors = evaluate_anchors(&s, epsilon, |i, j| {
        let min_gap = voters
            .iter()
            .map(|v| dot(v.theta.coords(), &diffs[i][j]))
            .fold(T::infinity(), T::min);
        min_gap > epsilon
    });
    let metadata = AuditMetadata {
        voter_count: Some(voters.len()),
        ..AuditMetadata::default()
    };
    Ok(AxiomReport::assemble(Axiom::Unanimity, epsilon, slate.len(), anchors, metadata))
}

/// Epsilon-Condorcet consistency over the slate, with `A'_a` built from the
/// population's expected reward gap.
pub fn audit_condorcet<T: Scalar>(
    model: &RewardModel<T>,
    slate: &[FeatureVector<T>],
    population: &PopulationSpec<T>,
    epsilon: T,
) -> Result<AxiomReport<T>> {
    check_slate(model, slate, epsilon)?;
    population.validate()?;
    let mean = population.mean();
    check_dim(model.dim(), mean.dim())?;
    let diffs = diff_matrix(slate);
    let s = scores(model, slate);
    let anchors = evaluate_anchors(&s, epsilon, |i, j| dot(mean.coords(), &diffs[i][j]) > epsilon);
    Ok(AxiomReport::assemble(Axiom::Condorcet, epsilon, slate.len(), anchors, AuditMetadata::default()))
}

/// A fitting procedure that can be re-run on subsets of the ballots.
pub trait Trainer<T: Scalar>: Sync {
    fn train(&self, data: &[ComparisonRecord<T>]) -> Result<RewardModel<T>>;
}

impl<T: Scalar, F> Trainer<T> for F
where
    F: Fn(&[ComparisonRecord<T>]) -> Result<RewardModel<T>> + Sync,
{
    fn train(&self, data: &[ComparisonRecord<T>]) -> Result<RewardModel<T>> {
        self(data)
    }
}

/// [`fit_mle`] with fixed regularization and options.
#[derive(Clone, Debug)]
pub struct MleTrainer<T: Scalar = f64> {
    pub lambda: T,
    pub options: FitOptions<T>,
}

impl<T: Scalar> Trainer<T> for MleTrainer<T> {
    fn train(&self, data: &[ComparisonRecord<T>]) -> Result<RewardModel<T>> {
        fit_mle(data, self.lambda, &self.options)
    }
}

/// Splits voter ids into `blocks` near-equal groups after a seeded shuffle.
pub fn partition_voters(
    voter_ids: &[VoterId],
    blocks: usize,
    rng: &mut crate::rng::StreamRng,
) -> Vec<Vec<VoterId>> {
    let mut ids = voter_ids.to_vec();
    ids.shuffle(rng);
    let n = ids.len();
    (0..blocks).map(|b| ids[b * n / blocks..(b + 1) * n / blocks].to_vec()).collect()
}

/// Epsilon-consistency audit.
///
/// `model` is the rule fitted on all ballots (`f_V`); `trainer` refits the
/// rule on each block of `partitions` random voter partitions. Within one
/// partition `A'_a` is the set of `a'` every block model ranks below `a` by
/// more than epsilon; a violation is a member of that set where `model`'s
/// gap does not exceed epsilon. Anchor results aggregate partitions: an
/// alternative is listed as dominated if some partition put it in `A'_a`.
/// Partitions with a block that has no ballots or whose fit did not converge
/// are skipped and counted in the metadata.
pub fn audit_consistency<T: Scalar, R: Trainer<T> + ?Sized>(
    model: &RewardModel<T>,
    trainer: &R,
    data: &[ComparisonRecord<T>],
    slate: &[FeatureVector<T>],
    epsilon: T,
    scheme: &ConsistencyScheme,
) -> Result<AxiomReport<T>> {
    check_slate(model, slate, epsilon)?;
    scheme.validate()?;
    let mut by_voter: BTreeMap<VoterId, Vec<usize>> = BTreeMap::new();
    for (idx, r) in data.iter().enumerate() {
        check_dim(model.dim(), r.dim())?;
        by_voter.entry(r.voter_id).or_default().push(idx);
    }
    let voter_ids: Vec<VoterId> = by_voter.keys().copied().collect();
    if voter_ids.len() < 2 {
        return Err(Error::input("consistency audit needs ballots from at least two voters"));
    }
    let n = voter_ids.len();
    let min_block = (scheme.min_fraction * n as f64).ceil() as usize;
    let full_scores = scores(model, slate);

    let mut rng = stream(scheme.seed);
    let mut dominated: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); slate.len()];
    let mut violated: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); slate.len()];
    let mut margins: Vec<Option<T>> = vec![None; slate.len()];
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut passed = 0;
    let mut warnings = Vec::new();

    for p in 0..scheme.partitions {
        let blocks = partition_voters(&voter_ids, scheme.blocks, &mut rng);
        if let Some(small) = blocks.iter().find(|b| b.len() < min_block.max(1)) {
            skipped += 1;
            warnings.push(format!(
                "partition {p}: block of {} voters is below the minimum of {}",
                small.len(),
                min_block.max(1)
            ));
            continue;
        }
        let block_data: Vec<Vec<ComparisonRecord<T>>> = blocks
            .iter()
            .map(|b| b.iter().flat_map(|id| by_voter[id].iter().map(|&i| data[i].clone())).collect())
            .collect();
        if block_data.iter().any(Vec::is_empty) {
            skipped += 1;
            warnings.push(format!("partition {p}: a block has no ballots"));
            continue;
        }
        let fits: Vec<Result<RewardModel<T>>> = block_data.par_iter().map(|d| trainer.train(d)).collect();
        let mut block_models = Vec::with_capacity(fits.len());
        let mut failure = None;
        for (b, fit) in fits.into_iter().enumerate() {
            match fit {
                Ok(m) if m.converged => block_models.push(m),
                Ok(m) => {
                    failure = Some(format!(
                        "partition {p}: block {b} fit did not converge ({})",
                        m.diagnostic.unwrap_or_default()
                    ))
                }
                Err(e) => failure = Some(format!("partition {p}: block {b} fit failed: {e}")),
            }
        }
        if let Some(msg) = failure {
            log::warn!("{msg}");
            warnings.push(msg);
            skipped += 1;
            continue;
        }
        evaluated += 1;
        let block_scores: Vec<Vec<T>> = block_models.iter().map(|m| scores(m, slate)).collect();
        let anchors = evaluate_anchors(&full_scores, epsilon, |i, j| {
            block_scores.iter().all(|s| s[i] - s[j] > epsilon)
        });
        if anchors.iter().all(AnchorResult::pass) {
            passed += 1;
        }
        for r in anchors {
            dominated[r.anchor].extend(&r.dominated);
            violated[r.anchor].extend(&r.violations);
            if let Some(m) = r.min_margin {
                margins[r.anchor] = Some(margins[r.anchor].map_or(m, |x: T| x.min(m)));
            }
        }
    }

    let anchors = (0..slate.len())
        .map(|i| AnchorResult {
            anchor: i,
            dominated: dominated[i].iter().copied().collect(),
            violations: violated[i].iter().copied().collect(),
            min_margin: margins[i],
        })
        .collect();
    let metadata = AuditMetadata {
        voter_count: Some(n),
        scheme: Some(*scheme),
        partitions_evaluated: Some(evaluated),
        partitions_skipped: Some(skipped),
        partitions_passed: Some(passed),
        warnings,
    };
    Ok(AxiomReport::assemble(Axiom::Consistency, epsilon, slate.len(), anchors, metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::{generate_dataset, PairScheme, VoterAssignment};
    use crate::model::{Label, LabelScheme};
    use crate::population::MixtureComponent;

    fn fv(c: &[f64]) -> FeatureVector {
        FeatureVector::from_f64(c).unwrap()
    }

    fn model(c: &[f64]) -> RewardModel {
        RewardModel::from_theta(fv(c))
    }

    fn two_point_slate() -> Vec<FeatureVector> {
        vec![fv(&[1.0, 0.0]), fv(&[0.0, 0.0])]
    }

    #[test]
    fn unanimity_pass_example() {
        let voters = vec![VoterParams::new(0, fv(&[1.0, 0.0])); 3];
        let r = audit_unanimity(&model(&[1.0, 0.0]), &two_point_slate(), &voters, 0.5).unwrap();
        assert_eq!(r.anchors[0].dominated, vec![1]);
        assert!(r.anchors[1].dominated.is_empty());
        assert!(r.pass);
        assert_eq!(r.verdict(), Verdict::Pass);
        assert_eq!(r.min_margin(), Some(0.5));
    }

    #[test]
    fn unanimity_is_vacuous_with_opposed_voters() {
        let voters = vec![VoterParams::new(0, fv(&[1.0, 0.0])), VoterParams::new(1, fv(&[-1.0, 0.0]))];
        for eps in [0.0, 0.3, 2.0] {
            let r = audit_unanimity(&model(&[-3.0, 1.0]), &two_point_slate(), &voters, eps).unwrap();
            assert!(r.pass);
            assert_eq!(r.verdict(), Verdict::VacuousPass);
            assert_eq!(r.vacuous_anchors(), vec![0, 1]);
        }
    }

    #[test]
    fn negated_model_violates_unanimity() {
        let voters = vec![VoterParams::new(0, fv(&[1.0, 0.0]))];
        let r = audit_unanimity(&model(&[-1.0, 0.0]), &two_point_slate(), &voters, 0.5).unwrap();
        assert!(!r.pass);
        assert_eq!(r.violations, vec![(0, 1)]);
        assert_eq!(r.verdict(), Verdict::Fail);
    }

    #[test]
    fn condorcet_examples() {
        let pop = PopulationSpec::gaussian(fv(&[1.0, 0.0]), vec![1.0, 1.0]);
        let r = audit_condorcet(&model(&[1.0, 0.0]), &two_point_slate(), &pop, 0.5).unwrap();
        assert!(r.pass);
        assert_eq!(r.dominated_pairs(), 1);

        let dup = vec![fv(&[1.0, 2.0]), fv(&[1.0, 2.0])];
        let r = audit_condorcet(&model(&[1.0, 0.0]), &dup, &pop, 0.0).unwrap();
        assert!(r.vacuous());

        let centred = PopulationSpec::Mixture {
            components: vec![
                MixtureComponent { weight: 0.5, mean: fv(&[1.0, -2.0]), variance: vec![1.0, 1.0] },
                MixtureComponent { weight: 0.5, mean: fv(&[-1.0, 2.0]), variance: vec![1.0, 1.0] },
            ],
        };
        let slate = vec![fv(&[0.0, 0.0]), fv(&[1.0, 3.0]), fv(&[-2.0, 0.5])];
        let r = audit_condorcet(&model(&[1.0, 1.0]), &slate, &centred, 0.0).unwrap();
        assert_eq!(r.verdict(), Verdict::VacuousPass);
    }

    #[test]
    fn audits_reject_degenerate_inputs() {
        let voters = vec![VoterParams::new(0, fv(&[1.0, 0.0]))];
        assert!(audit_unanimity(&model(&[1.0, 0.0]), &[fv(&[0.0, 0.0])], &voters, 0.0).is_err());
        assert!(audit_unanimity(&model(&[1.0, 0.0]), &two_point_slate(), &[], 0.0).is_err());
        assert!(audit_unanimity(&model(&[1.0, 0.0]), &two_point_slate(), &voters, -0.1).is_err());
        assert!(audit_unanimity(&model(&[1.0]), &two_point_slate(), &voters, 0.0).is_err());
    }

    #[test]
    fn dominated_sets_shrink_as_epsilon_grows() {
        let voters: Vec<_> = [[1.0, 0.2], [0.8, -0.1], [1.2, 0.4]]
            .iter()
            .enumerate()
            .map(|(i, t)| VoterParams::new(i, fv(t)))
            .collect();
        let slate: Vec<_> = (0..8).map(|i| fv(&[(i as f64 * 0.37).sin() * 2.0, (i as f64).cos()])).collect();
        let m = model(&[0.9, 0.1]);
        let mut prev: Option<AxiomReport> = None;
        for eps in [0.0, 0.1, 0.5, 1.0, 2.0] {
            let r = audit_unanimity(&m, &slate, &voters, eps).unwrap();
            if let Some(p) = &prev {
                for (now, before) in r.anchors.iter().zip(&p.anchors) {
                    assert!(now.dominated.iter().all(|j| before.dominated.contains(j)));
                }
            }
            prev = Some(r);
        }
    }

    fn point_mass_data(voters: usize, seed: u64) -> (Vec<FeatureVector>, Vec<ComparisonRecord>) {
        let theta = fv(&[1.0, -0.5]);
        let voters: Vec<_> = (0..voters).map(|i| VoterParams::new(i, theta.clone())).collect();
        let slate = vec![fv(&[0.0, 0.0]), fv(&[1.0, 0.0]), fv(&[0.0, 1.0]), fv(&[1.5, 1.0]), fv(&[-1.0, -1.0])];
        let data = generate_dataset(
            &voters,
            &slate,
            PairScheme::RoundRobin { repeats: 400 },
            VoterAssignment::EachPairRandomVoter,
            &LabelScheme::TrueReward,
            seed,
        )
        .unwrap();
        (slate, data)
    }

    #[test]
    fn consistency_passes_for_homogeneous_voters() {
        let (slate, data) = point_mass_data(20, 3);
        let trainer = MleTrainer { lambda: 1e-3, options: FitOptions::default() };
        let full = trainer.train(&data).unwrap();
        let scheme = ConsistencyScheme { partitions: 4, seed: 9, ..ConsistencyScheme::default() };
        let r = audit_consistency(&full, &trainer, &data, &slate, 0.0, &scheme).unwrap();
        assert!(r.pass, "{:?}", r.violations);
        assert!(!r.vacuous());
        assert_eq!(r.metadata.partitions_evaluated, Some(4));
        assert_eq!(r.metadata.partitions_passed, Some(4));

        let bad = audit_consistency(&full.negated(), &trainer, &data, &slate, 0.0, &scheme).unwrap();
        assert!(!bad.pass);
        for (a, b) in &bad.violations {
            assert!(bad.anchors[*a].dominated.contains(b));
        }
    }

    #[test]
    fn disagreeing_blocks_exclude_the_pair() {
        // Voters 0 and 1 have opposite ballots, so the two block models of
        // any 2-partition disagree in sign and nothing is dominated.
        let a = fv(&[1.0]);
        let b = fv(&[0.0]);
        let mut data = Vec::new();
        for _ in 0..5 {
            data.push(ComparisonRecord::new(0, a.clone(), b.clone(), Label::First, LabelScheme::TrueReward).unwrap());
            data.push(ComparisonRecord::new(1, a.clone(), b.clone(), Label::Second, LabelScheme::TrueReward).unwrap());
        }
        let trainer = MleTrainer { lambda: 1e-3, options: FitOptions::default() };
        let scheme = ConsistencyScheme { partitions: 1, ..ConsistencyScheme::default() };
        let r = audit_consistency(&model(&[-5.0]), &trainer, &data, &[a, b], 0.0, &scheme).unwrap();
        assert!(r.pass);
        assert!(r.vacuous());
    }

    #[test]
    fn identical_slate_is_vacuous() {
        let (_, data) = point_mass_data(6, 1);
        let slate = vec![fv(&[0.3, 0.3]); 4];
        let trainer = MleTrainer { lambda: 1e-3, options: FitOptions::default() };
        let full = trainer.train(&data).unwrap();
        let r = audit_consistency(&full, &trainer, &data, &slate, 0.0, &ConsistencyScheme { partitions: 2, ..Default::default() }).unwrap();
        assert_eq!(r.verdict(), Verdict::VacuousPass);
    }

    #[test]
    fn non_convergent_blocks_are_skipped() {
        let (slate, data) = point_mass_data(4, 2);
        let trainer = MleTrainer { lambda: 1e-3, options: FitOptions { max_iters: 1, ..FitOptions::default() } };
        let full = model(&[1.0, -0.5]);
        let scheme = ConsistencyScheme { partitions: 3, ..ConsistencyScheme::default() };
        let r = audit_consistency(&full, &trainer, &data, &slate, 0.0, &scheme).unwrap();
        assert_eq!(r.metadata.partitions_skipped, Some(3));
        assert_eq!(r.metadata.partitions_evaluated, Some(0));
        assert_eq!(r.metadata.warnings.len(), 3);
        assert!(r.vacuous());
    }

    #[test]
    fn consistency_scheme_validation() {
        let bad = ConsistencyScheme { blocks: 3, min_fraction: 0.4, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(ConsistencyScheme::default().validate().is_ok());
    }

    #[test]
    fn closure_trainers_work() {
        let (slate, data) = point_mass_data(4, 5);
        let trainer = |d: &[ComparisonRecord]| fit_mle(d, 1e-3, &FitOptions::default());
        let full = trainer(&data).unwrap();
        let scheme = ConsistencyScheme { partitions: 2, seed: 4, ..Default::default() };
        let a = audit_consistency(&full, &trainer, &data, &slate, 0.0, &scheme).unwrap();
        let b = audit_consistency(&full, &trainer, &data, &slate, 0.0, &scheme).unwrap();
        assert_eq!(a, b);
    }
}
