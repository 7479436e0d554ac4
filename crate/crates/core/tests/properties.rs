//! Cross-module properties, checked on random instances.

use proptest::prelude::*;
use socialrm::annotation::{generate_dataset, PairScheme, VoterAssignment};
use socialrm::audit::{audit_condorcet, audit_unanimity};
use socialrm::distortion::{worst_case_regret, ConsistentSet, RegretSearch};
use socialrm::estimation::{fit_mle, fit_mle_traced, nll, FitOptions};
use socialrm::model::FeatureWeights;
use socialrm::population::{empirical_unanimous_gap, population_mean_gap, sample_alternatives, sample_voters};
use socialrm::{
    AlternativeSpaceSpec, ComparisonRecord, ComparisonRecord32, FeatureVector, FeatureVector32, LabelScheme, PopulationSpec,
    RewardModel, VoterParams,
};

fn coords(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, d)
}

fn fv(c: &[f64]) -> FeatureVector {
    FeatureVector::new(c.to_vec()).unwrap()
}

fn unit_box(d: usize) -> AlternativeSpaceSpec {
    AlternativeSpaceSpec::UniformBox {
        lo: FeatureVector::zeros(d),
        hi: FeatureVector::ones(d),
    }
}

fn simulated(theta: &[f64], m: usize, repeats: usize, seed: u64) -> (Vec<FeatureVector>, Vec<ComparisonRecord>) {
    let voters = vec![VoterParams::new(0, fv(theta)), VoterParams::new(1, fv(theta))];
    let slate = sample_alternatives(&unit_box(theta.len()), m, seed).unwrap();
    let data = generate_dataset(
        &voters,
        &slate,
        PairScheme::RoundRobin { repeats },
        VoterAssignment::EachPairRandomVoter,
        &LabelScheme::TrueReward,
        seed ^ 0x5eed,
    )
    .unwrap();
    (slate, data)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), mean in coords(3)) {
        let spec = PopulationSpec::gaussian(fv(&mean), vec![0.3; 3]);
        let a = sample_voters(&spec, 7, seed).unwrap();
        let b = sample_voters(&spec, 7, seed).unwrap();
        let bits = |v: &[VoterParams]| v.iter().flat_map(|p| p.theta.coords().iter().map(|x| x.to_bits())).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn mean_gap_is_antisymmetric(mean in coords(3), a in coords(3), b in coords(3)) {
        let spec = PopulationSpec::gaussian(fv(&mean), vec![1.0; 3]);
        let (a, b) = (fv(&a), fv(&b));
        prop_assert_eq!(population_mean_gap(&spec, &a, &b).unwrap(), -population_mean_gap(&spec, &b, &a).unwrap());
    }

    #[test]
    fn point_mass_gap_is_exact(theta in coords(3), a in coords(3), b in coords(3), seed in any::<u64>()) {
        let spec = PopulationSpec::point_mass(fv(&theta));
        let voters = sample_voters(&spec, 5, seed).unwrap();
        let (a, b) = (fv(&a), fv(&b));
        prop_assert_eq!(empirical_unanimous_gap(&voters, &a, &b).unwrap(), population_mean_gap(&spec, &a, &b).unwrap());
    }

    #[test]
    fn swapped_records_keep_the_likelihood(theta in coords(3), probe in coords(3), seed in any::<u64>()) {
        let (_, data) = simulated(&theta, 5, 3, seed);
        let swapped: Vec<_> = data.iter().map(ComparisonRecord::swapped).collect();
        let probe = fv(&probe);
        let (x, y) = (nll(&probe, &data, 0.01).unwrap(), nll(&probe, &swapped, 0.01).unwrap());
        prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{} vs {}", x, y);
    }

    #[test]
    fn descent_is_monotone(theta in coords(2), seed in any::<u64>(), lambda in 0.0..0.1f64) {
        let (_, data) = simulated(&theta, 6, 4, seed);
        let (_, trace) = fit_mle_traced(&data, lambda.max(1e-4), &FitOptions::default()).unwrap();
        prop_assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn record_order_does_not_matter(theta in coords(3), seed in any::<u64>(), rot in 1usize..50) {
        let (_, data) = simulated(&theta, 6, 5, seed);
        let mut shuffled = data.clone();
        shuffled.rotate_left(rot % data.len());
        shuffled.reverse();
        let opts = FitOptions::default();
        let a = fit_mle(&data, 1e-3, &opts).unwrap();
        let b = fit_mle(&shuffled, 1e-3, &opts).unwrap();
        let diff = a.theta_hat.sub(&b.theta_hat).unwrap().max_abs();
        prop_assert!(diff <= 1e-6, "theta moved by {}", diff);
    }

    #[test]
    fn dominated_sets_shrink_with_epsilon(theta in coords(2), model in coords(2), e1 in 0.0..0.5f64, extra in 0.0..0.5f64, seed in any::<u64>()) {
        let slate = sample_alternatives(&unit_box(2), 8, seed).unwrap();
        let pop = PopulationSpec::point_mass(fv(&theta));
        let voters = sample_voters(&pop, 3, seed).unwrap();
        let m = RewardModel::from_theta(fv(&model));
        let e2 = e1 + extra;
        for (lo, hi) in [
            (audit_unanimity(&m, &slate, &voters, e1).unwrap(), audit_unanimity(&m, &slate, &voters, e2).unwrap()),
            (audit_condorcet(&m, &slate, &pop, e1).unwrap(), audit_condorcet(&m, &slate, &pop, e2).unwrap()),
        ] {
            for (a, b) in lo.anchors.iter().zip(&hi.anchors) {
                prop_assert!(b.dominated.iter().all(|j| a.dominated.contains(j)));
            }
        }
    }

    #[test]
    fn positive_rescaling_of_truth_passes(theta in coords(3), c in 0.01..10.0f64, seed in any::<u64>()) {
        let slate = sample_alternatives(&unit_box(3), 10, seed).unwrap();
        let pop = PopulationSpec::point_mass(fv(&theta));
        let voters = sample_voters(&pop, 4, seed).unwrap();
        let m = RewardModel::from_theta(fv(&theta).scale(c).unwrap());
        prop_assert!(audit_unanimity(&m, &slate, &voters, 0.0).unwrap().pass);
        prop_assert!(audit_condorcet(&m, &slate, &pop, 0.0).unwrap().pass);
    }

    #[test]
    fn product_determines_the_likelihood(theta in coords(3), w in prop::collection::vec(0.25..4.0f64, 3), seed in any::<u64>()) {
        let (_, data) = simulated(&[1.0, -1.0, 0.5], 5, 2, seed);
        let model = fit_mle(&data, 1e-3, &FitOptions::default()).unwrap();
        let set = ConsistentSet::around(&model, &data).unwrap();
        let (theta, w) = (fv(&theta), fv(&w));
        // (theta * w, 1) and (theta, w) share the product theta * w.
        let product = theta.hadamard(&w).unwrap();
        let a = set.nll(&theta, &FeatureWeights::new(w)).unwrap();
        let b = set.nll(&product, &FeatureWeights::ones(3)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn regret_is_nonnegative_and_monotone_in_delta() {
    for seed in 0..8 {
        let (slate, data) = simulated(&[0.8, -0.6], 6, 3, seed);
        let model = fit_mle(&data, 1e-3, &FitOptions::default()).unwrap();
        let search = RegretSearch::grid(11, 2.0);
        let mut last = 0.0;
        for delta in [0.0, 0.25, 1.0, 4.0, 16.0] {
            let r = worst_case_regret(&model, &slate, &data, delta, &search).unwrap();
            let regret = r.worst_case_regret.unwrap();
            assert!(regret >= 0.0 && regret >= last, "seed {seed} delta {delta}: {regret} after {last}");
            last = regret;
        }
    }
}

#[test]
fn fits_do_not_depend_on_thread_count() {
    let (_, data) = simulated(&[1.0, 0.5, -0.25], 30, 4, 17);
    let fit_in = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| fit_mle(&data, 1e-3, &FitOptions::default()).unwrap())
    };
    let one = fit_in(1);
    for threads in [2, 3, 8] {
        let many = fit_in(threads);
        let bits = |m: &RewardModel| m.theta_hat.coords().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&one), bits(&many), "{threads} threads");
        assert_eq!(one.final_nll.to_bits(), many.final_nll.to_bits());
    }
}

#[test]
fn single_precision_fit_tracks_double() {
    let (_, data) = simulated(&[1.2, -0.4], 8, 20, 3);
    let data32: Vec<ComparisonRecord32> = data
        .iter()
        .map(|r| {
            ComparisonRecord32::new(r.voter_id, r.a0.cast(), r.a1.cast(), r.label, socialrm::LabelScheme32::TrueReward)
                .unwrap()
        })
        .collect();
    let opts = FitOptions::<f32> {
        grad_tol: 1e-3,
        ..FitOptions::default()
    };
    let single = fit_mle(&data32, 1e-3f32, &opts).unwrap();
    let double = fit_mle(&data, 1e-3, &FitOptions::default()).unwrap();
    let reference: FeatureVector32 = double.theta_hat.cast();
    for (a, b) in single.theta_hat.coords().iter().zip(reference.coords()) {
        assert!((a - b).abs() < 1e-2, "{a} vs {b}");
    }
}
