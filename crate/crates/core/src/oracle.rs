//! Brute-force reference implementations for cross-checking the estimator
//! and the audits on small instances. Deliberately naive: no shared
//! precomputation with the code under test beyond the formulas themselves.

use serde::{Deserialize, Serialize};

use crate::audit::{AnchorResult, AuditMetadata, Axiom, AxiomReport};
use crate::distortion::{grid_digits, grid_point};
use crate::error::{check_dim, Error, Result};
use crate::estimation::{nll, score};
use crate::model::{ComparisonRecord, FeatureVector, RewardModel, VoterParams};
use crate::population::{empirical_unanimous_gap, population_mean_gap, PopulationSpec};
use crate::scalar::Scalar;

pub const MAX_ORACLE_DIM: usize = 3;
pub const MIN_ORACLE_RESOLUTION: usize = 11;
pub const MAX_ORACLE_SLATE: usize = 50;

/// Axis-aligned grid `[lo, hi]^d` with `resolution` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleGrid {
    pub resolution: usize,
    pub lo: f64,
    pub hi: f64,
}

impl MleGrid {
    pub fn symmetric(resolution: usize, bound: f64) -> Self {
        Self {
            resolution,
            lo: -bound,
            hi: bound,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.resolution - 1) as f64
    }
}

/// Grid point with the smallest [`nll`]; ties keep the first in
/// lexicographic order.
pub fn brute_force_mle<T: Scalar>(data: &[ComparisonRecord<T>], lambda: T, grid: &MleGrid) -> Result<FeatureVector<T>> {
    let Some(first) = data.first() else {
        return Err(Error::input("brute-force MLE of an empty dataset"));
    };
    let d = first.dim();
    if d > MAX_ORACLE_DIM {
        return Err(Error::input(format!("brute-force MLE supports d <= {MAX_ORACLE_DIM}, got {d}")));
    }
    if grid.resolution < MIN_ORACLE_RESOLUTION {
        return Err(Error::input(format!(
            "brute-force MLE needs at least {MIN_ORACLE_RESOLUTION} points per axis"
        )));
    }
    if !(grid.lo.is_finite() && grid.hi.is_finite() && grid.lo < grid.hi) {
        return Err(Error::input("brute-force grid needs finite lo < hi"));
    }
    let (lo, hi) = (T::lit(grid.lo), T::lit(grid.hi));
    let mut best: Option<(T, FeatureVector<T>)> = None;
    for index in 0..grid.resolution.pow(d as u32) {
        let coords = grid_digits(index, grid.resolution, d)
            .into_iter()
            .map(|i| grid_point(lo, hi, i, grid.resolution))
            .collect();
        let theta = FeatureVector::new(coords)?;
        let value = nll(&theta, data, lambda)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, theta));
        }
    }
    Ok(best.expect("grid is non-empty").1)
}

/// What an exhaustive axiom check compares against.
#[derive(Clone, Copy, Debug)]
pub enum Reference<'a, T: Scalar = f64> {
    Voters(&'a [VoterParams<T>]),
    Population(&'a PopulationSpec<T>),
}

/// Double-loop evaluation of unanimity (against voters) or Condorcet
/// consistency (against a population), producing the same report the
/// corresponding audit does.
pub fn exhaustive_axiom_check<T: Scalar>(
    model: &RewardModel<T>,
    slate: &[FeatureVector<T>],
    reference: Reference<'_, T>,
    epsilon: T,
    axiom: Axiom,
) -> Result<AxiomReport<T>> {
    if slate.len() > MAX_ORACLE_SLATE {
        return Err(Error::input(format!("exhaustive checks support slates up to {MAX_ORACLE_SLATE}")));
    }
    if slate.len() < 2 {
        return Err(Error::input("axiom audits need a slate of at least two alternatives"));
    }
    if !(epsilon >= T::zero() && epsilon.is_finite()) {
        return Err(Error::input(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    for a in slate {
        check_dim(model.dim(), a.dim())?;
    }
    let mut metadata = AuditMetadata::default();
    match (axiom, reference) {
        (Axiom::Unanimity, Reference::Voters(voters)) => {
            if voters.is_empty() {
                return Err(Error::input("unanimity audit needs at least one voter"));
            }
            metadata.voter_count = Some(voters.len());
        }
        (Axiom::Condorcet, Reference::Population(pop)) => pop.validate()?,
        (axiom, _) => {
            return Err(Error::input(format!(
                "exhaustive checks cover unanimity against voters and condorcet against a population, not {axiom}"
            )))
        }
    }

    let mut anchors = Vec::with_capacity(slate.len());
    for (i, a) in slate.iter().enumerate() {
        let mut result = AnchorResult {
            anchor: i,
            dominated: Vec::new(),
            violations: Vec::new(),
            min_margin: None,
        };
        for (j, b) in slate.iter().enumerate() {
            if i == j {
                continue;
            }
            let preferred = match reference {
                Reference::Voters(voters) => voters.iter().all(|v| {
                    let single = std::slice::from_ref(v);
                    empirical_unanimous_gap(single, a, b).is_ok_and(|g| g > epsilon)
                }),
                Reference::Population(pop) => population_mean_gap(pop, a, b)? > epsilon,
            };
            if !preferred {
                continue;
            }
            result.dominated.push(j);
            let gap = score(model, a)? - score(model, b)?;
            let margin = gap - epsilon;
            result.min_margin = Some(match result.min_margin {
                Some(m) if m <= margin => m,
                _ => margin,
            });
            if gap <= epsilon || gap.is_nan() {
                result.violations.push(j);
            }
        }
        anchors.push(result);
    }
    Ok(AxiomReport::assemble(axiom, epsilon, slate.len(), anchors, metadata))
}
