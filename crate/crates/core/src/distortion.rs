//! Worst-case welfare regret of the learned rule's winner.
//!
//! Annotations are assumed to come from a proxy reward `sum_j theta_j w_j a_j`
//! while true welfare depends on `theta` alone. A hypothesis `(theta, w)` is
//! consistent with the observed ballots when the negative log-likelihood of
//! the effective parameters `theta * w` is within `delta` of the best value
//! found. Regret is the largest welfare shortfall of the learned winner over
//! all consistent hypotheses on a finite search set.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::estimation::Objective;
use crate::model::{dot, reward, ComparisonRecord, FeatureVector, FeatureWeights, RewardModel};
use crate::population::PopulationSpec;
use crate::rng::stream;
use crate::scalar::Scalar;

/// Largest dimension searched exhaustively; above it the search samples.
pub const MAX_GRID_DIM: usize = 3;

/// `E_{theta ~ V}[<theta, a>]`.
pub fn welfare<T: Scalar>(population: &PopulationSpec<T>, a: &FeatureVector<T>) -> Result<T> {
    reward(&population.mean(), a)
}

/// Checks `nll(theta * w) <= best_nll + delta`. Non-finite likelihoods are
/// never members.
pub fn consistent_set_membership<T: Scalar>(
    theta: &FeatureVector<T>,
    w: &FeatureWeights<T>,
    data: &[ComparisonRecord<T>],
    delta: T,
    lambda: T,
    best_nll: T,
) -> Result<bool> {
    let effective = theta.hadamard(&w.w)?;
    let objective = Objective::new(data, lambda)?;
    let value = objective.value(effective.coords())?;
    Ok(within(value, best_nll, delta))
}

fn within<T: Scalar>(value: T, best: T, delta: T) -> bool {
    value.is_finite() && value <= best + delta
}

/// The likelihood ball around a fitted model.
#[derive(Clone, Debug)]
pub struct ConsistentSet<T: Scalar = f64> {
    objective: Objective<T>,
    best_nll: T,
}

impl<T: Scalar> ConsistentSet<T> {
    /// Uses the model's own objective value as the best achieved likelihood.
    pub fn around(model: &RewardModel<T>, data: &[ComparisonRecord<T>]) -> Result<Self> {
        let objective = Objective::new(data, model.lambda)?;
        check_dim(objective.dim(), model.dim())?;
        let best_nll = objective.value(model.theta_hat.coords())?;
        Ok(Self { objective, best_nll })
    }

    pub fn best_nll(&self) -> T {
        self.best_nll
    }

    pub fn nll(&self, theta: &FeatureVector<T>, w: &FeatureWeights<T>) -> Result<T> {
        let effective = theta.hadamard(&w.w)?;
        self.objective.value(effective.coords())
    }

    pub fn contains(&self, theta: &FeatureVector<T>, w: &FeatureWeights<T>, delta: T) -> Result<bool> {
        Ok(within(self.nll(theta, w)?, self.best_nll, delta))
    }
}

/// Where the per-feature weights `w` may range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound = "T: Scalar", deny_unknown_fields)]
pub enum WeightSpace<T: Scalar = f64> {
    /// `w` pinned to one vector (all-ones when absent).
    Fixed {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w: Option<FeatureWeights<T>>,
    },
    /// Independent coordinates in `[lo, hi]`, searched alongside `theta`.
    Box { lo: T, hi: T },
}

impl<T: Scalar> Default for WeightSpace<T> {
    fn default() -> Self {
        WeightSpace::Fixed { w: None }
    }
}

/// Search over hypotheses. `theta` coordinates range over `[-theta_bound,
/// theta_bound]`. Up to [`MAX_GRID_DIM`] features the search is an
/// exhaustive grid with `resolution` points per coordinate; above that it
/// draws `samples` hypotheses uniformly from the same box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct RegretSearch<T: Scalar = f64> {
    pub resolution: usize,
    pub theta_bound: T,
    #[serde(default)]
    pub weights: WeightSpace<T>,
    #[serde(default = "RegretSearch::<T>::default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl<T: Scalar> RegretSearch<T> {
    fn default_samples() -> usize {
        100_000
    }

    pub fn grid(resolution: usize, theta_bound: T) -> Self {
        Self {
            resolution,
            theta_bound,
            weights: WeightSpace::default(),
            samples: Self::default_samples(),
            seed: 0,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::config("distortion.resolution", "need at least two grid points per coordinate"));
        }
        if !(self.theta_bound.is_finite() && self.theta_bound >= T::zero()) {
            return Err(Error::config("distortion.theta_bound", "bound must be finite and non-negative"));
        }
        match &self.weights {
            WeightSpace::Fixed { w: Some(w) } if w.dim() != dim => Err(Error::config(
                "distortion.weights.w",
                format!("expected {dim} weights, found {}", w.dim()),
            )),
            WeightSpace::Box { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo <= hi) => {
                Err(Error::config("distortion.weights", "weight box needs finite lo <= hi"))
            }
            _ => {
                if dim > MAX_GRID_DIM && self.samples == 0 {
                    return Err(Error::config("distortion.samples", "random search needs at least one sample"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Hypothesis<T: Scalar = f64> {
    pub theta: FeatureVector<T>,
    pub w: FeatureWeights<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SearchMode {
    Grid { resolution: usize },
    Random { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DistortionReport<T: Scalar = f64> {
    pub slate_size: usize,
    pub learned_winner: usize,
    /// Absent when no searched hypothesis was consistent.
    pub worst_case_regret: Option<T>,
    pub hypothesis: Option<Hypothesis<T>>,
    /// The alternative that is best under the attaining hypothesis.
    pub best_alternative: Option<usize>,
    pub delta: T,
    pub best_nll: T,
    pub candidates: usize,
    pub consistent: usize,
    pub search: SearchMode,
    pub theta_bound: T,
    pub weights: WeightSpace<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Index of the slate member with the highest score; ties go to the lowest index.
pub fn learned_winner<T: Scalar>(model: &RewardModel<T>, slate: &[FeatureVector<T>]) -> Result<usize> {
    let mut best = 0;
    let mut best_score = T::neg_infinity();
    for (i, a) in slate.iter().enumerate() {
        let s = model.score(a)?;
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    Ok(best)
}

/// Grid value `i` of `resolution` evenly spaced points on `[lo, hi]`.
pub(crate) fn grid_point<T: Scalar>(lo: T, hi: T, i: usize, resolution: usize) -> T {
    let frac = T::lit(i as f64 / (resolution - 1) as f64);
    lo + (hi - lo) * frac
}

/// Decodes a mixed-radix grid index into per-coordinate positions, most
/// significant coordinate first so index order is lexicographic.
pub(crate) fn grid_digits(mut index: usize, resolution: usize, dims: usize) -> Vec<usize> {
    let mut digits = vec![0; dims];
    for slot in digits.iter_mut().rev() {
        *slot = index % resolution;
        index /= resolution;
    }
    digits
}

struct Evaluation<T: Scalar> {
    nll: T,
    regret: T,
    best_alternative: usize,
}

/// Worst-case regret of the learned winner over consistent hypotheses.
///
/// The candidate list starts with the fitted point itself (`theta_hat` with
/// unit weights), so the consistent set is never empty at `delta = 0` when
/// the fitted point is the best found; grid or sampled hypotheses follow in
/// lexicographic index order and ties in regret keep the earliest candidate.
pub fn worst_case_regret<T: Scalar>(
    model: &RewardModel<T>,
    slate: &[FeatureVector<T>],
    data: &[ComparisonRecord<T>],
    delta: T,
    search: &RegretSearch<T>,
) -> Result<DistortionReport<T>> {
    let d = model.dim();
    if slate.len() < 2 {
        return Err(Error::input("regret needs a slate of at least two alternatives"));
    }
    for a in slate {
        check_dim(d, a.dim())?;
    }
    if !(delta >= T::zero() && delta.is_finite()) {
        return Err(Error::input(format!("delta must be finite and >= 0, got {delta}")));
    }
    search.validate(d)?;
    let objective = Objective::new(data, model.lambda)?;
    check_dim(objective.dim(), d)?;

    let winner = learned_winner(model, slate)?;
    let slate_coords: Vec<&[T]> = slate.iter().map(|a| a.coords()).collect();
    let welfare_regret = |theta: &[T]| -> (T, usize) {
        let mut best = 0;
        let mut best_value = T::neg_infinity();
        for (i, a) in slate_coords.iter().enumerate() {
            let v = dot(theta, a);
            if v > best_value {
                best = i;
                best_value = v;
            }
        }
        ((best_value - dot(theta, slate_coords[winner])).max(T::zero()), best)
    };

    let unit = vec![T::one(); d];
    let fixed_w: Option<Vec<T>> = match &search.weights {
        WeightSpace::Fixed { w } => Some(w.as_ref().map_or_else(|| unit.clone(), |w| w.w.coords().to_vec())),
        WeightSpace::Box { .. } => None,
    };
    let searched_dims = if fixed_w.is_some() { d } else { 2 * d };
    let grid = d <= MAX_GRID_DIM;
    let total = if grid {
        search
            .resolution
            .checked_pow(searched_dims as u32)
            .ok_or_else(|| Error::config("distortion.resolution", "grid is too large to enumerate"))?
    } else {
        search.samples
    };

    let bound = search.theta_bound;
    let (w_lo, w_hi) = match &search.weights {
        WeightSpace::Box { lo, hi } => (*lo, *hi),
        WeightSpace::Fixed { .. } => (T::one(), T::one()),
    };
    let decode = |index: usize| -> (Vec<T>, Vec<T>) {
        let digits = grid_digits(index, search.resolution, searched_dims);
        let theta = digits[..d].iter().map(|&i| grid_point(-bound, bound, i, search.resolution)).collect();
        let w = match &fixed_w {
            Some(w) => w.clone(),
            None => digits[d..].iter().map(|&i| grid_point(w_lo, w_hi, i, search.resolution)).collect(),
        };
        (theta, w)
    };

    let sampled: Vec<(Vec<T>, Vec<T>)> = if grid {
        Vec::new()
    } else {
        let mut rng = stream(search.seed);
        (0..total)
            .map(|_| {
                let theta = (0..d).map(|_| -bound + (bound + bound) * T::lit(rng.random::<f64>())).collect();
                let w = match &fixed_w {
                    Some(w) => w.clone(),
                    None => (0..d).map(|_| w_lo + (w_hi - w_lo) * T::lit(rng.random::<f64>())).collect(),
                };
                (theta, w)
            })
            .collect()
    };
    let candidate = |k: usize| -> (Vec<T>, Vec<T>) {
        if k == 0 {
            (model.theta_hat.coords().to_vec(), unit.clone())
        } else if grid {
            decode(k - 1)
        } else {
            sampled[k - 1].clone()
        }
    };

    let evaluations: Vec<Evaluation<T>> = (0..=total)
        .into_par_iter()
        .map(|k| {
            let (theta, w) = candidate(k);
            let effective: Vec<T> = theta.iter().zip(&w).map(|(&t, &x)| t * x).collect();
            let nll = objective.value(&effective).unwrap_or(T::nan());
            let (regret, best_alternative) = welfare_regret(&theta);
            Evaluation { nll, regret, best_alternative }
        })
        .collect();

    let best_nll = evaluations
        .iter()
        .map(|e| e.nll)
        .filter(|v| v.is_finite())
        .fold(T::infinity(), T::min);

    let mut consistent = 0;
    let mut worst: Option<(usize, T)> = None;
    for (k, e) in evaluations.iter().enumerate() {
        if !within(e.nll, best_nll, delta) {
            continue;
        }
        consistent += 1;
        if worst.is_none_or(|(_, r)| e.regret > r) {
            worst = Some((k, e.regret));
        }
    }

    let search_mode = if grid {
        SearchMode::Grid { resolution: search.resolution }
    } else {
        SearchMode::Random {
            samples: search.samples,
            seed: search.seed,
        }
    };
    let mut report = DistortionReport {
        slate_size: slate.len(),
        learned_winner: winner,
        worst_case_regret: None,
        hypothesis: None,
        best_alternative: None,
        delta,
        best_nll,
        candidates: total + 1,
        consistent,
        search: search_mode,
        theta_bound: bound,
        weights: search.weights.clone(),
        diagnostic: None,
    };
    match worst {
        Some((k, regret)) => {
            let (theta, w) = candidate(k);
            report.worst_case_regret = Some(regret);
            report.best_alternative = Some(evaluations[k].best_alternative);
            report.hypothesis = Some(Hypothesis {
                theta: FeatureVector::new(theta)?,
                w: FeatureWeights::new(FeatureVector::new(w)?),
            });
        }
        None => {
            report.diagnostic = Some(format!(
                "no searched hypothesis has a finite likelihood within delta={delta} of the best ({best_nll})"
            ));
        }
    }
    Ok(report)
}
