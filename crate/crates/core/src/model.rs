//! Domain types and the elementary reward and choice-probability formulas.
//!
//! Alternatives and voter preferences both live in `R^d`. A voter with
//! preference vector `theta` ascribes the reward `<theta, a>` to alternative
//! `a`, and a Bradley-Terry-Luce voter picks `a` over `b` with probability
//! `sigmoid(r(a) - r(b))`.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

/// A point in `R^d`: a parameterized alternative, a preference vector or a
/// per-feature weight vector. Coordinates are finite and `d >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>", bound = "T: Scalar")]
pub struct FeatureVector<T: Scalar = f64> {
    coords: Vec<T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("feature vectors need at least one coordinate"));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("feature vector"));
        }
        Ok(Self { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            coords: vec![T::zero(); dim],
        }
    }

    pub fn ones(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            coords: vec![T::one(); dim],
        }
    }

    /// Builds from `f64` literals, converting to `T`.
    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| T::lit(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        check_dim(self.dim(), other.dim())?;
        Ok(dot(&self.coords, &other.coords))
    }

    /// `self - other`, coordinatewise.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let coords = self.coords.iter().zip(&other.coords).map(|(&x, &y)| x - y).collect();
        Self::new(coords)
    }

    /// Coordinatewise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let coords = self.coords.iter().zip(&other.coords).map(|(&x, &y)| x * y).collect();
        Self::new(coords)
    }

    pub fn scale(&self, c: T) -> Result<Self> {
        Self::new(self.coords.iter().map(|&x| x * c).collect())
    }

    pub fn norm_squared(&self) -> T {
        dot(&self.coords, &self.coords)
    }

    pub fn max_abs(&self) -> T {
        self.coords.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Key identifying this exact point, insensitive to the sign of zero.
    pub fn identity_key(&self) -> Vec<u64> {
        self.coords.iter().map(|x| x.identity_bits()).collect()
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> FeatureVector<U> {
        FeatureVector {
            coords: self.coords.iter().map(|x| U::lit(x.as_f64())).collect(),
        }
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for FeatureVector<T> {
    type Error = Error;

    fn try_from(coords: Vec<T>) -> Result<Self> {
        Self::new(coords)
    }
}

impl<T: Scalar> From<FeatureVector<T>> for Vec<T> {
    fn from(v: FeatureVector<T>) -> Self {
        v.coords
    }
}

impl<T: Scalar> Index<usize> for FeatureVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.coords[i]
    }
}

/// Plain left-to-right inner product. Slices must have equal length.
pub(crate) fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

pub type VoterId = usize;

/// A simulated evaluator and their preference weights over features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct VoterParams<T: Scalar = f64> {
    pub voter_id: VoterId,
    pub theta: FeatureVector<T>,
}

impl<T: Scalar> VoterParams<T> {
    pub fn new(voter_id: VoterId, theta: FeatureVector<T>) -> Self {
        Self { voter_id, theta }
    }

    pub fn reward(&self, a: &FeatureVector<T>) -> Result<T> {
        reward(&self.theta, a)
    }
}

/// Per-feature multipliers distorting how annotations are produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct FeatureWeights<T: Scalar = f64> {
    pub w: FeatureVector<T>,
}

impl<T: Scalar> FeatureWeights<T> {
    pub fn new(w: FeatureVector<T>) -> Self {
        Self { w }
    }

    pub fn ones(dim: usize) -> Self {
        Self {
            w: FeatureVector::ones(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.w.dim()
    }
}

/// Which of the two alternatives in a comparison was preferred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    /// `a0` preferred (encoded `0`).
    First,
    /// `a1` preferred (encoded `1`).
    Second,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::First => 0,
            Label::Second => 1,
        }
    }

    pub fn from_u8(x: u8) -> Result<Self> {
        match x {
            0 => Ok(Label::First),
            1 => Ok(Label::Second),
            other => Err(Error::input(format!("label must be 0 or 1, got {other}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::First => Label::Second,
            Label::Second => Label::First,
        }
    }
}

/// Reward that generated a label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound = "T: Scalar")]
pub enum LabelScheme<T: Scalar = f64> {
    /// Labels drawn from the voter's own reward `<theta, a>`.
    TrueReward,
    /// Labels drawn from the proxy reward `sum_j theta_j w_j a_j`.
    Proxy { w: FeatureWeights<T> },
}

impl<T: Scalar> LabelScheme<T> {
    pub fn generating_reward(&self, theta: &FeatureVector<T>, a: &FeatureVector<T>) -> Result<T> {
        match self {
            LabelScheme::TrueReward => reward(theta, a),
            LabelScheme::Proxy { w } => proxy_reward(theta, w, a),
        }
    }
}

/// One pairwise annotation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ComparisonRecord<T: Scalar = f64> {
    pub voter_id: VoterId,
    pub a0: FeatureVector<T>,
    pub a1: FeatureVector<T>,
    pub label: Label,
    pub scheme: LabelScheme<T>,
}

impl<T: Scalar> ComparisonRecord<T> {
    pub fn new(
        voter_id: VoterId,
        a0: FeatureVector<T>,
        a1: FeatureVector<T>,
        label: Label,
        scheme: LabelScheme<T>,
    ) -> Result<Self> {
        check_dim(a0.dim(), a1.dim())?;
        if let LabelScheme::Proxy { w } = &scheme {
            check_dim(a0.dim(), w.dim())?;
        }
        Ok(Self {
            voter_id,
            a0,
            a1,
            label,
            scheme,
        })
    }

    pub fn dim(&self) -> usize {
        self.a0.dim()
    }

    pub fn winner(&self) -> &FeatureVector<T> {
        match self.label {
            Label::First => &self.a0,
            Label::Second => &self.a1,
        }
    }

    pub fn loser(&self) -> &FeatureVector<T> {
        match self.label {
            Label::First => &self.a1,
            Label::Second => &self.a0,
        }
    }

    /// Same observation with the slots exchanged and the label flipped.
    pub fn swapped(&self) -> Self {
        Self {
            voter_id: self.voter_id,
            a0: self.a1.clone(),
            a1: self.a0.clone(),
            label: self.label.flipped(),
            scheme: self.scheme.clone(),
        }
    }

    /// Opposite outcome on the same slots.
    pub fn flipped(&self) -> Self {
        Self {
            label: self.label.flipped(),
            ..self.clone()
        }
    }
}

/// A fitted linear reward model: the preference-modeling voting rule
/// `f(a) = <theta_hat, a>` plus how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RewardModel<T: Scalar = f64> {
    pub theta_hat: FeatureVector<T>,
    pub lambda: T,
    pub final_nll: T,
    pub converged: bool,
    pub iterations: usize,
    /// Why the fit did not converge, when it did not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl<T: Scalar> RewardModel<T> {
    /// A model with the given parameters and no training history.
    pub fn from_theta(theta_hat: FeatureVector<T>) -> Self {
        Self {
            theta_hat,
            lambda: T::zero(),
            final_nll: T::zero(),
            converged: true,
            iterations: 0,
            diagnostic: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta_hat.dim()
    }

    pub fn score(&self, a: &FeatureVector<T>) -> Result<T> {
        reward(&self.theta_hat, a)
    }

    /// The same model with its parameters negated.
    pub fn negated(&self) -> Self {
        let theta_hat = self.theta_hat.scale(-T::one()).expect("negation keeps coordinates finite");
        Self {
            theta_hat,
            ..self.clone()
        }
    }
}

/// `<theta, a>`.
pub fn reward<T: Scalar>(theta: &FeatureVector<T>, a: &FeatureVector<T>) -> Result<T> {
    theta.dot(a)
}

/// `sum_j theta_j * w_j * a_j`.
pub fn proxy_reward<T: Scalar>(
    theta: &FeatureVector<T>,
    w: &FeatureWeights<T>,
    a: &FeatureVector<T>,
) -> Result<T> {
    check_dim(theta.dim(), w.dim())?;
    check_dim(theta.dim(), a.dim())?;
    let t = theta.coords();
    let wc = w.w.coords();
    let ac = a.coords();
    Ok((0..t.len()).fold(T::zero(), |acc, j| acc + t[j] * wc[j] * ac[j]))
}

/// Logistic function, evaluated without overflow for any finite input.
pub fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `ln sigmoid(x)`, stable in both tails.
pub fn log_sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Probability that an alternative with reward `r_a` is preferred over one
/// with reward `r_b` under Bradley-Terry-Luce.
pub fn btl_prob<T: Scalar>(r_a: T, r_b: T) -> Result<T> {
    if !r_a.is_finite() || !r_b.is_finite() {
        return Err(Error::NonFinite("reward passed to btl_prob"));
    }
    Ok(sigmoid(r_a - r_b))
}
