//! Voter populations and alternative spaces: sampling plus the analytic
//! statistics the audits need.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::{dot, FeatureVector, VoterParams};
use crate::rng::{stream, StreamRng};
use crate::scalar::Scalar;

const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct MixtureComponent<T: Scalar = f64> {
    pub weight: T,
    pub mean: FeatureVector<T>,
    /// Diagonal of the covariance matrix.
    pub variance: Vec<T>,
}

/// Generative description of the voter population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound = "T: Scalar", deny_unknown_fields)]
pub enum PopulationSpec<T: Scalar = f64> {
    /// Every voter shares `theta`.
    PointMass { theta: FeatureVector<T> },
    /// Independent normal coordinates.
    Gaussian { mean: FeatureVector<T>, variance: Vec<T> },
    Mixture { components: Vec<MixtureComponent<T>> },
}

impl<T: Scalar> PopulationSpec<T> {
    pub fn point_mass(theta: FeatureVector<T>) -> Self {
        PopulationSpec::PointMass { theta }
    }

    pub fn gaussian(mean: FeatureVector<T>, variance: Vec<T>) -> Self {
        PopulationSpec::Gaussian { mean, variance }
    }

    pub fn dim(&self) -> usize {
        match self {
            PopulationSpec::PointMass { theta } => theta.dim(),
            PopulationSpec::Gaussian { mean, .. } => mean.dim(),
            PopulationSpec::Mixture { components } => components.first().map_or(0, |c| c.mean.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("population")
    }

    /// Validates, reporting offending fields under the given path prefix.
    pub fn validate_at(&self, path: &str) -> Result<()> {
        match self {
            PopulationSpec::PointMass { .. } => Ok(()),
            PopulationSpec::Gaussian { mean, variance } => {
                check_variance(&format!("{path}.variance"), mean.dim(), variance)
            }
            PopulationSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::config(
                        format!("{path}.components"),
                        "a mixture needs at least one component",
                    ));
                }
                let d = components[0].mean.dim();
                let mut total = 0.0;
                for (k, c) in components.iter().enumerate() {
                    let at = format!("{path}.components[{k}]");
                    if c.mean.dim() != d {
                        return Err(Error::config(
                            format!("{at}.mean"),
                            format!("dimension {} differs from {d}", c.mean.dim()),
                        ));
                    }
                    let w = c.weight.as_f64();
                    if !(w > 0.0 && w.is_finite()) {
                        return Err(Error::config(format!("{at}.weight"), "weights must be positive"));
                    }
                    total += w;
                    check_variance(&format!("{at}.variance"), d, &c.variance)?;
                }
                if (total - 1.0).abs() > WEIGHT_TOLERANCE {
                    return Err(Error::config(
                        format!("{path}.components"),
                        format!("mixture weights sum to {total}, expected 1"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// `E[theta]` under the population.
    pub fn mean(&self) -> FeatureVector<T> {
        match self {
            PopulationSpec::PointMass { theta } => theta.clone(),
            PopulationSpec::Gaussian { mean, .. } => mean.clone(),
            PopulationSpec::Mixture { components } => {
                let d = self.dim();
                let mut acc = vec![T::zero(); d];
                for c in components {
                    for (slot, &m) in acc.iter_mut().zip(c.mean.coords()) {
                        *slot += c.weight * m;
                    }
                }
                FeatureVector::new(acc).expect("weighted mean of finite vectors is finite")
            }
        }
    }

    /// Draws one preference vector and the mixture component it came from.
    pub fn sample_one(&self, rng: &mut StreamRng) -> (FeatureVector<T>, usize) {
        match self {
            PopulationSpec::PointMass { theta } => (theta.clone(), 0),
            PopulationSpec::Gaussian { mean, variance } => (sample_normal(mean, variance, rng), 0),
            PopulationSpec::Mixture { components } => {
                let u: f64 = rng.random();
                let mut cumulative = 0.0;
                let mut chosen = components.len() - 1;
                for (k, c) in components.iter().enumerate() {
                    cumulative += c.weight.as_f64();
                    if u < cumulative {
                        chosen = k;
                        break;
                    }
                }
                let c = &components[chosen];
                (sample_normal(&c.mean, &c.variance, rng), chosen)
            }
        }
    }
}

fn check_variance<T: Scalar>(path: &str, d: usize, variance: &[T]) -> Result<()> {
    if variance.len() != d {
        return Err(Error::config(
            path,
            format!("expected {d} variance entries, found {}", variance.len()),
        ));
    }
    for (j, v) in variance.iter().enumerate() {
        if !(v.is_finite() && *v >= T::zero()) {
            return Err(Error::config(
                format!("{path}[{j}]"),
                format!("variance must be finite and non-negative, got {v}"),
            ));
        }
    }
    Ok(())
}

fn sample_normal<T: Scalar>(mean: &FeatureVector<T>, variance: &[T], rng: &mut StreamRng) -> FeatureVector<T> {
    let coords = mean
        .coords()
        .iter()
        .zip(variance)
        .map(|(&m, &v)| {
            let z: f64 = rng.sample(StandardNormal);
            m + v.sqrt() * T::lit(z)
        })
        .collect();
    FeatureVector::new(coords).expect("normal draws are finite")
}

/// Where alternatives come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound = "T: Scalar", deny_unknown_fields)]
pub enum AlternativeSpaceSpec<T: Scalar = f64> {
    UniformBox { lo: FeatureVector<T>, hi: FeatureVector<T> },
    Gaussian { mean: FeatureVector<T>, variance: Vec<T> },
    ExplicitSlate { alternatives: Vec<FeatureVector<T>> },
}

impl<T: Scalar> AlternativeSpaceSpec<T> {
    pub fn dim(&self) -> usize {
        match self {
            AlternativeSpaceSpec::UniformBox { lo, .. } => lo.dim(),
            AlternativeSpaceSpec::Gaussian { mean, .. } => mean.dim(),
            AlternativeSpaceSpec::ExplicitSlate { alternatives } => alternatives.first().map_or(0, |a| a.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("alternatives")
    }

    pub fn validate_at(&self, path: &str) -> Result<()> {
        match self {
            AlternativeSpaceSpec::UniformBox { lo, hi } => {
                if lo.dim() != hi.dim() {
                    return Err(Error::config(
                        format!("{path}.hi"),
                        format!("dimension {} differs from lo's {}", hi.dim(), lo.dim()),
                    ));
                }
                for (j, (l, h)) in lo.coords().iter().zip(hi.coords()).enumerate() {
                    if l > h {
                        return Err(Error::config(format!("{path}.lo[{j}]"), format!("lo {l} exceeds hi {h}")));
                    }
                }
                Ok(())
            }
            AlternativeSpaceSpec::Gaussian { mean, variance } => {
                check_variance(&format!("{path}.variance"), mean.dim(), variance)
            }
            AlternativeSpaceSpec::ExplicitSlate { alternatives } => {
                let Some(first) = alternatives.first() else {
                    return Err(Error::config(format!("{path}.alternatives"), "explicit slate is empty"));
                };
                for (i, a) in alternatives.iter().enumerate() {
                    if a.dim() != first.dim() {
                        return Err(Error::config(
                            format!("{path}.alternatives[{i}]"),
                            format!("dimension {} differs from {}", a.dim(), first.dim()),
                        ));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Draws `n` voters i.i.d. from `spec`, ids `0..n`.
pub fn sample_voters<T: Scalar>(spec: &PopulationSpec<T>, n: usize, seed: u64) -> Result<Vec<VoterParams<T>>> {
    Ok(sample_voters_with_components(spec, n, seed)?.0)
}

/// As [`sample_voters`], also returning each voter's mixture component.
pub fn sample_voters_with_components<T: Scalar>(
    spec: &PopulationSpec<T>,
    n: usize,
    seed: u64,
) -> Result<(Vec<VoterParams<T>>, Vec<usize>)> {
    if n == 0 {
        return Err(Error::input("need at least one voter"));
    }
    spec.validate()?;
    let mut rng = stream(seed);
    let (voters, components) = (0..n)
        .map(|id| {
            let (theta, k) = spec.sample_one(&mut rng);
            (VoterParams::new(id, theta), k)
        })
        .unzip();
    Ok((voters, components))
}

/// Draws `m` alternatives. Explicit slates are returned in order when `m`
/// equals the slate size and resampled with replacement otherwise.
pub fn sample_alternatives<T: Scalar>(
    spec: &AlternativeSpaceSpec<T>,
    m: usize,
    seed: u64,
) -> Result<Vec<FeatureVector<T>>> {
    if m == 0 {
        return Err(Error::input("need at least one alternative"));
    }
    spec.validate()?;
    let mut rng = stream(seed);
    let out = match spec {
        AlternativeSpaceSpec::ExplicitSlate { alternatives } if alternatives.len() == m => alternatives.clone(),
        AlternativeSpaceSpec::ExplicitSlate { alternatives } => (0..m)
            .map(|_| alternatives[rng.random_range(0..alternatives.len())].clone())
            .collect(),
        AlternativeSpaceSpec::UniformBox { lo, hi } => (0..m)
            .map(|_| {
                let coords = lo
                    .coords()
                    .iter()
                    .zip(hi.coords())
                    .map(|(&l, &h)| {
                        let u: f64 = rng.random();
                        l + (h - l) * T::lit(u)
                    })
                    .collect();
                FeatureVector::new(coords).expect("box draws are finite")
            })
            .collect(),
        AlternativeSpaceSpec::Gaussian { mean, variance } => {
            (0..m).map(|_| sample_normal(mean, variance, &mut rng)).collect()
        }
    };
    Ok(out)
}

/// `E_{theta ~ V}[<theta, a - a'>]`, computed from the population mean.
pub fn population_mean_gap<T: Scalar>(
    spec: &PopulationSpec<T>,
    a: &FeatureVector<T>,
    a_prime: &FeatureVector<T>,
) -> Result<T> {
    let mean = spec.mean();
    check_dim(mean.dim(), a.dim())?;
    let diff = a.sub(a_prime)?;
    Ok(dot(mean.coords(), diff.coords()))
}

/// `min_i <theta_i, a - a'>` over the given voters.
pub fn empirical_unanimous_gap<T: Scalar>(
    voters: &[VoterParams<T>],
    a: &FeatureVector<T>,
    a_prime: &FeatureVector<T>,
) -> Result<T> {
    if voters.is_empty() {
        return Err(Error::input("unanimity gap over an empty voter set"));
    }
    let diff = a.sub(a_prime)?;
    let mut min = T::infinity();
    for v in voters {
        check_dim(v.theta.dim(), diff.dim())?;
        min = min.min(dot(v.theta.coords(), diff.coords()));
    }
    Ok(min)
}
