//! Pairwise annotation datasets drawn under Bradley-Terry-Luce noise.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::{btl_prob, ComparisonRecord, FeatureVector, Label, LabelScheme, VoterParams};
use crate::rng::{stream, StreamRng};
use crate::scalar::Scalar;

/// Which pairs of alternatives get compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PairScheme {
    /// `count` pairs drawn uniformly among distinct alternatives.
    UniformRandomPairs { count: usize },
    /// Every unordered pair, `repeats` times over.
    RoundRobin { repeats: usize },
}

impl PairScheme {
    pub fn total(&self, alternatives: usize) -> usize {
        match *self {
            PairScheme::UniformRandomPairs { count } => count,
            PairScheme::RoundRobin { repeats } => repeats * alternatives * alternatives.saturating_sub(1) / 2,
        }
    }
}

/// Which voter labels each pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoterAssignment {
    /// Each comparison goes to a voter chosen uniformly at random.
    #[default]
    EachPairRandomVoter,
    /// The comparison list is cut into contiguous, near-equal runs, one per voter.
    PartitionByVoter,
}

/// Draws one label: `Second` with probability `btl(r(a1), r(a0))`.
pub fn sample_label<T: Scalar, R: Rng + ?Sized>(
    voter: &VoterParams<T>,
    a0: &FeatureVector<T>,
    a1: &FeatureVector<T>,
    scheme: &LabelScheme<T>,
    rng: &mut R,
) -> Result<Label> {
    check_dim(a0.dim(), a1.dim())?;
    let r0 = scheme.generating_reward(&voter.theta, a0)?;
    let r1 = scheme.generating_reward(&voter.theta, a1)?;
    let p_second = btl_prob(r1, r0)?.as_f64();
    let u: f64 = rng.random();
    Ok(if u < p_second { Label::Second } else { Label::First })
}

/// Builds a comparison dataset. Pairs are unordered; which member lands in
/// slot `a0` is a fair coin flip.
pub fn generate_dataset<T: Scalar>(
    voters: &[VoterParams<T>],
    alternatives: &[FeatureVector<T>],
    pairs: PairScheme,
    assignment: VoterAssignment,
    labels: &LabelScheme<T>,
    seed: u64,
) -> Result<Vec<ComparisonRecord<T>>> {
    if alternatives.len() < 2 {
        return Err(Error::config(
            "alternatives.count",
            "pairwise comparisons need at least two alternatives",
        ));
    }
    if voters.is_empty() {
        return Err(Error::config("annotation.voters", "need at least one voter"));
    }
    let d = alternatives[0].dim();
    for a in alternatives {
        check_dim(d, a.dim())?;
    }
    for v in voters {
        check_dim(d, v.theta.dim())?;
    }
    if let LabelScheme::Proxy { w } = labels {
        check_dim(d, w.dim())?;
    }

    let mut rng = stream(seed);
    let pair_list = pair_indices(pairs, alternatives.len(), &mut rng);
    let total = pair_list.len();
    let mut records = Vec::with_capacity(total);
    for (t, (i, j)) in pair_list.into_iter().enumerate() {
        let (first, second) = if rng.random::<bool>() { (j, i) } else { (i, j) };
        let voter = match assignment {
            VoterAssignment::EachPairRandomVoter => &voters[rng.random_range(0..voters.len())],
            VoterAssignment::PartitionByVoter => &voters[t * voters.len() / total],
        };
        let a0 = &alternatives[first];
        let a1 = &alternatives[second];
        let label = sample_label(voter, a0, a1, labels, &mut rng)?;
        records.push(ComparisonRecord::new(
            voter.voter_id,
            a0.clone(),
            a1.clone(),
            label,
            labels.clone(),
        )?);
    }
    Ok(records)
}

fn pair_indices(scheme: PairScheme, m: usize, rng: &mut StreamRng) -> Vec<(usize, usize)> {
    match scheme {
        PairScheme::RoundRobin { repeats } => {
            let mut out = Vec::with_capacity(scheme.total(m));
            for _ in 0..repeats {
                for i in 0..m {
                    for j in i + 1..m {
                        out.push((i, j));
                    }
                }
            }
            out
        }
        PairScheme::UniformRandomPairs { count } => (0..count)
            .map(|_| {
                let i = rng.random_range(0..m);
                let mut j = rng.random_range(0..m - 1);
                if j >= i {
                    j += 1;
                }
                (i, j)
            })
            .collect(),
    }
}
