//! Simulation and audit toolkit for preference-modeling voting rules.
//!
//! Simulated voters with linear preferences label pairs of alternatives under
//! Bradley-Terry-Luce noise; a linear reward model is fitted by regularized
//! maximum likelihood and then audited against epsilon-unanimity,
//! epsilon-Condorcet consistency, epsilon-consistency and a worst-case
//! welfare regret.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`). Every generic
//! type defaults to `f64`; the `*32` aliases below name the single-precision
//! variants.

pub mod annotation;
pub mod audit;
pub mod distortion;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod population;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use annotation::{generate_dataset, sample_label, PairScheme, VoterAssignment};
pub use audit::{audit_condorcet, audit_consistency, audit_unanimity, Axiom, MleTrainer, Trainer, Verdict};
pub use distortion::{consistent_set_membership, welfare, worst_case_regret, RegretSearch, WeightSpace};
pub use estimation::{borda_scores, fit_mle, kendall_tau, nll, nll_gradient, score, FitOptions};
pub use model::{btl_prob, proxy_reward, reward, Label};
pub use oracle::{brute_force_mle, exhaustive_axiom_check, MleGrid, Reference};
pub use population::{empirical_unanimous_gap, population_mean_gap, sample_alternatives, sample_voters};

pub type FeatureVector = model::FeatureVector<f64>;
pub type FeatureWeights = model::FeatureWeights<f64>;
pub type VoterParams = model::VoterParams<f64>;
pub type ComparisonRecord = model::ComparisonRecord<f64>;
pub type LabelScheme = model::LabelScheme<f64>;
pub type RewardModel = model::RewardModel<f64>;
pub type PopulationSpec = population::PopulationSpec<f64>;
pub type AlternativeSpaceSpec = population::AlternativeSpaceSpec<f64>;
pub type AxiomReport = audit::AxiomReport<f64>;
pub type DistortionReport = distortion::DistortionReport<f64>;

pub type FeatureVector32 = model::FeatureVector<f32>;
pub type FeatureWeights32 = model::FeatureWeights<f32>;
pub type VoterParams32 = model::VoterParams<f32>;
pub type ComparisonRecord32 = model::ComparisonRecord<f32>;
pub type LabelScheme32 = model::LabelScheme<f32>;
pub type RewardModel32 = model::RewardModel<f32>;
pub type PopulationSpec32 = population::PopulationSpec<f32>;
pub type AlternativeSpaceSpec32 = population::AlternativeSpaceSpec<f32>;
pub type AxiomReport32 = audit::AxiomReport<f32>;
pub type DistortionReport32 = distortion::DistortionReport<f32>;
