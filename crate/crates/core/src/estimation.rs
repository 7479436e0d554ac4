//! Regularized Bradley-Terry maximum likelihood for linear rewards, plus the
//! empirical Borda scores it is compared against.
//!
//! The objective is
//!
//! ```text
//! nll(theta) = sum_r -ln sigmoid(<theta, winner_r - loser_r>) + lambda * |theta|^2
//! ```
//!
//! minimized by full-batch gradient descent with an Armijo backtracking line
//! search. Sums over records use a fixed-shape tree reduction, so values are
//! reproducible independent of the worker thread count.

use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::{dot, log_sigmoid, reward, sigmoid, ComparisonRecord, FeatureVector, RewardModel};
use crate::scalar::{pairwise_sum, tree_reduce, Scalar};

const ARMIJO_C: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const GROW: f64 = 2.0;
const MAX_BACKTRACKS: usize = 200;

/// Objective over a fixed dataset, stored as the winner-minus-loser
/// differences in one flat row-major buffer.
#[derive(Clone, Debug)]
pub struct Objective<T: Scalar = f64> {
    diffs: Vec<T>,
    dim: usize,
    lambda: T,
}

impl<T: Scalar> Objective<T> {
    pub fn new(data: &[ComparisonRecord<T>], lambda: T) -> Result<Self> {
        let Some(first) = data.first() else {
            return Err(Error::input("negative log-likelihood of an empty dataset"));
        };
        if !(lambda >= T::zero() && lambda.is_finite()) {
            return Err(Error::input(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        let dim = first.dim();
        let mut diffs = Vec::with_capacity(data.len() * dim);
        for r in data {
            check_dim(dim, r.a0.dim())?;
            check_dim(dim, r.a1.dim())?;
            let (w, l) = (r.winner().coords(), r.loser().coords());
            diffs.extend(w.iter().zip(l).map(|(&x, &y)| x - y));
        }
        Ok(Self { diffs, dim, lambda })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.diffs.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    fn row(&self, r: usize) -> &[T] {
        &self.diffs[r * self.dim..(r + 1) * self.dim]
    }

    fn check(&self, theta: &[T]) -> Result<()> {
        check_dim(self.dim, theta.len())
    }

    /// Winner-minus-loser margins `<theta, diff_r>`.
    pub fn margins(&self, theta: &[T]) -> Result<Vec<T>> {
        self.check(theta)?;
        Ok((0..self.len()).map(|r| dot(theta, self.row(r))).collect())
    }

    /// Data term only.
    pub fn data_term(&self, theta: &[T]) -> Result<T> {
        self.check(theta)?;
        Ok(pairwise_sum(self.len(), |r| -log_sigmoid(dot(theta, self.row(r)))))
    }

    pub fn value(&self, theta: &[T]) -> Result<T> {
        Ok(self.data_term(theta)? + self.lambda * dot(theta, theta))
    }

    pub fn gradient(&self, theta: &[T]) -> Result<Vec<T>> {
        self.check(theta)?;
        let d = self.dim;
        let leaf = |range: Range<usize>| {
            let mut acc = vec![T::zero(); d];
            for r in range {
                let row = self.row(r);
                // -(1 - p_win) = -sigmoid(-margin)
                let coeff = -sigmoid(-dot(theta, row));
                for (slot, &x) in acc.iter_mut().zip(row) {
                    *slot += coeff * x;
                }
            }
            acc
        };
        let combine = |mut a: Vec<T>, b: Vec<T>| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        };
        let mut g = tree_reduce(0..self.len(), &leaf, &combine);
        let two_lambda = self.lambda + self.lambda;
        for (gj, &tj) in g.iter_mut().zip(theta) {
            *gj += two_lambda * tj;
        }
        Ok(g)
    }

    /// `value(theta + t * dir) - value(theta)`, evaluated term by term so the
    /// difference keeps full relative precision even when it is far below
    /// the resolution of the objective's absolute value.
    pub fn change_along(&self, theta: &[T], dir: &[T], t: T) -> Result<T> {
        self.check(theta)?;
        self.check(dir)?;
        let data = pairwise_sum(self.len(), |r| {
            let row = self.row(r);
            let m = dot(theta, row);
            let q = dot(dir, row);
            // softplus(-(m + t q)) - softplus(-m) = ln(1 + sigmoid(-m) * expm1(-t q))
            (sigmoid(-m) * (-(t * q)).exp_m1()).ln_1p()
        });
        let penalty = self.lambda * (T::lit(2.0) * t * dot(theta, dir) + t * t * dot(dir, dir));
        Ok(data + penalty)
    }
}

/// Negative log-likelihood of `theta` plus `lambda * |theta|^2`.
pub fn nll<T: Scalar>(theta: &FeatureVector<T>, data: &[ComparisonRecord<T>], lambda: T) -> Result<T> {
    Objective::new(data, lambda)?.value(theta.coords())
}

pub fn nll_gradient<T: Scalar>(
    theta: &FeatureVector<T>,
    data: &[ComparisonRecord<T>],
    lambda: T,
) -> Result<FeatureVector<T>> {
    let g = Objective::new(data, lambda)?.gradient(theta.coords())?;
    FeatureVector::new(g).map_err(|_| Error::Numeric("gradient is not finite".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FitOptions<T: Scalar = f64> {
    pub max_iters: usize,
    /// Stop once the gradient's largest absolute coordinate is at most this.
    pub grad_tol: T,
    /// Starting point; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<FeatureVector<T>>,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            grad_tol: T::lit(1e-8),
            init: None,
        }
    }
}

/// Fits `theta_hat` by minimizing [`nll`].
///
/// Non-convergence is reported in the returned model (`converged = false`
/// with a diagnostic) rather than as an error. With `lambda = 0`, reaching an
/// iterate that strictly separates every record means the likelihood has no
/// finite maximizer, and the fit is reported as not converged even if the
/// gradient became tiny along the way.
pub fn fit_mle<T: Scalar>(data: &[ComparisonRecord<T>], lambda: T, opts: &FitOptions<T>) -> Result<RewardModel<T>> {
    Ok(fit_mle_traced(data, lambda, opts)?.0)
}

/// [`fit_mle`] that also returns the objective value after every accepted step.
///
/// The first entry is the objective at the starting point; each later entry
/// adds the accepted step's change, evaluated per record in the cancellation-free
/// form the line search uses. Re-summing the objective from scratch jitters by
/// an ulp or two near the optimum, so that sequence would not be monotone even
/// though every step decreases the true objective.
pub fn fit_mle_traced<T: Scalar>(
    data: &[ComparisonRecord<T>],
    lambda: T,
    opts: &FitOptions<T>,
) -> Result<(RewardModel<T>, Vec<T>)> {
    let objective = Objective::new(data, lambda)?;
    let mut theta = match &opts.init {
        Some(init) => {
            check_dim(objective.dim(), init.dim())?;
            init.coords().to_vec()
        }
        None => vec![T::zero(); objective.dim()],
    };

    let mut value = objective.value(&theta)?;
    if !value.is_finite() {
        return Err(Error::Numeric(format!("objective is {value} at the starting point")));
    }
    let mut grad = objective.gradient(&theta)?;
    let mut trace = vec![value];
    let mut step = T::one();
    let mut iterations = 0;
    let mut converged = false;
    let mut diagnostic = None;

    let armijo = T::lit(ARMIJO_C);
    let shrink = T::lit(BACKTRACK);
    let grow = T::lit(GROW);

    loop {
        let grad_norm = inf_norm(&grad);
        if !grad_norm.is_finite() {
            return Err(Error::Numeric(format!("gradient became non-finite after {iterations} iterations")));
        }
        if grad_norm <= opts.grad_tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            diagnostic = Some(format!(
                "reached max_iters={} with gradient norm {grad_norm:e} > {:e}",
                opts.max_iters, opts.grad_tol
            ));
            break;
        }

        let dir: Vec<T> = grad.iter().map(|&g| -g).collect();
        let slope = -dot(&grad, &grad);
        let mut t = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let change = objective.change_along(&theta, &dir, t)?;
            if change.is_finite() && change <= armijo * t * slope {
                accepted = Some((t, change));
                break;
            }
            t *= shrink;
        }
        let Some((t, change)) = accepted else {
            diagnostic = Some(format!(
                "line search could not decrease the objective at gradient norm {grad_norm:e}"
            ));
            break;
        };

        let candidate: Vec<T> = theta.iter().zip(&dir).map(|(&x, &p)| x + t * p).collect();
        if candidate == theta {
            diagnostic = Some(format!("step underflowed at gradient norm {grad_norm:e}"));
            break;
        }
        theta = candidate;
        value = objective.value(&theta)?;
        if !value.is_finite() {
            return Err(Error::Numeric(format!(
                "objective became {value} after {} iterations (step {t:e})",
                iterations + 1
            )));
        }
        grad = objective.gradient(&theta)?;
        trace.push(*trace.last().expect("trace starts non-empty") + change);
        iterations += 1;
        step = t * grow;
    }

    if lambda == T::zero() && objective.margins(&theta)?.iter().all(|&m| m > T::zero()) {
        converged = false;
        diagnostic = Some(
            "data are linearly separable: the unregularized likelihood has no finite maximizer; use lambda > 0"
                .to_string(),
        );
    }

    let theta_hat = FeatureVector::new(theta).map_err(|_| Error::Numeric("fitted parameters are not finite".into()))?;
    let model = RewardModel {
        theta_hat,
        lambda,
        final_nll: value,
        converged,
        iterations,
        diagnostic,
    };
    Ok((model, trace))
}

fn inf_norm<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, v| if v.is_nan() { T::nan() } else { m.max(v.abs()) })
}

/// The fitted rule's score for `a`: `<theta_hat, a>`.
pub fn score<T: Scalar>(model: &RewardModel<T>, a: &FeatureVector<T>) -> Result<T> {
    reward(&model.theta_hat, a)
}

/// Per-alternative comparison tallies keyed by slate position.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub wins: usize,
    pub appearances: usize,
}

fn slate_index<T: Scalar>(slate: &[FeatureVector<T>]) -> HashMap<Vec<u64>, Vec<usize>> {
    let mut index: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for (i, a) in slate.iter().enumerate() {
        index.entry(a.identity_key()).or_default().push(i);
    }
    index
}

/// Wins and appearances for each slate member. Records are matched to slate
/// members by exact coordinates; repeated slate entries share one tally.
pub fn tally<T: Scalar>(data: &[ComparisonRecord<T>], slate: &[FeatureVector<T>]) -> Result<Vec<Tally>> {
    if data.is_empty() {
        return Err(Error::input("Borda scores of an empty dataset"));
    }
    let index = slate_index(slate);
    let mut out = vec![Tally::default(); slate.len()];
    for r in data {
        for (alt, won) in [(r.winner(), true), (r.loser(), false)] {
            if let Some(slots) = index.get(&alt.identity_key()) {
                for &i in slots {
                    out[i].appearances += 1;
                    out[i].wins += usize::from(won);
                }
            }
        }
    }
    Ok(out)
}

/// Empirical win-rate Borda score of each slate member: wins divided by
/// comparisons involving it. `None` marks members never compared.
pub fn borda_scores<T: Scalar>(data: &[ComparisonRecord<T>], slate: &[FeatureVector<T>]) -> Result<Vec<Option<T>>> {
    Ok(tally(data, slate)?
        .into_iter()
        .map(|t| (t.appearances > 0).then(|| T::lit(t.wins as f64 / t.appearances as f64)))
        .collect())
}

/// Positional Borda score from complete pairwise data: for each member, the
/// sum over opponents of the fraction of their head-to-head comparisons it
/// won. Equals the expected number of alternatives ranked below it.
///
/// Requires every pair of distinct slate entries to have been compared.
pub fn positional_borda<T: Scalar>(data: &[ComparisonRecord<T>], slate: &[FeatureVector<T>]) -> Result<Vec<T>> {
    if data.is_empty() {
        return Err(Error::input("Borda scores of an empty dataset"));
    }
    let index = slate_index(slate);
    let m = slate.len();
    let mut wins = vec![vec![0usize; m]; m];
    for r in data {
        let (Some(ws), Some(ls)) = (index.get(&r.winner().identity_key()), index.get(&r.loser().identity_key())) else {
            continue;
        };
        for &w in ws {
            for &l in ls {
                wins[w][l] += 1;
            }
        }
    }
    let mut scores = Vec::with_capacity(m);
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        let mut s = 0.0;
        for j in (0..m).filter(|&j| j != i) {
            let n = wins[i][j] + wins[j][i];
            if n == 0 {
                return Err(Error::input(format!(
                    "positional Borda needs full round-robin data; alternatives {i} and {j} were never compared"
                )));
            }
            s += wins[i][j] as f64 / n as f64;
        }
        scores.push(T::lit(s));
    }
    Ok(scores)
}

/// Kendall's tau-b rank correlation between two score lists.
pub fn kendall_tau<T: Scalar>(x: &[T], y: &[T]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len();
    let (mut concordant, mut discordant, mut ties_x, mut ties_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] - x[j]).as_f64().signum_or_zero();
            let dy = (y[i] - y[j]).as_f64().signum_or_zero();
            match (dx == 0.0, dy == 0.0) {
                (true, true) => {}
                (true, false) => ties_x += 1,
                (false, true) => ties_y += 1,
                (false, false) if dx == dy => concordant += 1,
                (false, false) => discordant += 1,
            }
        }
    }
    let n0 = (concordant + discordant + ties_x) as f64;
    let n1 = (concordant + discordant + ties_y) as f64;
    if n0 == 0.0 || n1 == 0.0 {
        return Err(Error::input("Kendall tau is undefined when one ranking is constant"));
    }
    Ok((concordant - discordant) as f64 / (n0 * n1).sqrt())
}

trait SignumOrZero {
    fn signum_or_zero(self) -> f64;
}

impl SignumOrZero for f64 {
    fn signum_or_zero(self) -> f64 {
        if self == 0.0 {
            0.0
        } else {
            self.signum()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Label, LabelScheme};
    use approx::assert_abs_diff_eq;

    fn fv(c: &[f64]) -> FeatureVector {
        FeatureVector::from_f64(c).unwrap()
    }

    fn rec(a0: &[f64], a1: &[f64], label: Label) -> ComparisonRecord {
        ComparisonRecord::new(0, fv(a0), fv(a1), label, LabelScheme::TrueReward).unwrap()
    }

    fn mirrored(data: &[ComparisonRecord]) -> Vec<ComparisonRecord> {
        data.iter().flat_map(|r| [r.clone(), r.swapped().flipped()]).collect()
    }

    #[test]
    fn nll_at_origin_is_n_ln2() {
        let data = vec![rec(&[1.0, 0.0], &[0.0, 1.0], Label::First); 7];
        let zero = FeatureVector::zeros(2);
        assert_abs_diff_eq!(nll(&zero, &data, 0.0).unwrap(), 7.0 * 2f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(nll(&zero, &data, 1.0).unwrap(), 7.0 * 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn nll_unit_margin() {
        let data = vec![rec(&[1.0], &[0.0], Label::First)];
        // -ln sigmoid(1) = ln(1 + e^-1)
        assert_abs_diff_eq!(nll(&fv(&[1.0]), &data, 0.0).unwrap(), 0.313_261_687_518_222_8, epsilon = 1e-14);
    }

    #[test]
    fn nll_rejects_bad_input() {
        assert!(nll::<f64>(&fv(&[1.0]), &[], 0.0).is_err());
        let data = vec![rec(&[1.0], &[0.0], Label::First)];
        assert!(nll(&fv(&[1.0, 2.0]), &data, 0.0).is_err());
        assert!(nll(&fv(&[1.0]), &data, -1.0).is_err());
    }

    #[test]
    fn gradient_at_origin_is_minus_half_delta() {
        let data = vec![rec(&[2.0, -1.0], &[0.5, 1.0], Label::First)];
        let g = nll_gradient(&FeatureVector::zeros(2), &data, 0.3).unwrap();
        assert_abs_diff_eq!(g[0], -0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mirrored_data_has_zero_gradient_at_origin() {
        let data = mirrored(&[rec(&[2.0, -1.0], &[0.5, 1.0], Label::First), rec(&[0.0, 3.0], &[1.0, 1.0], Label::Second)]);
        let g = nll_gradient(&FeatureVector::zeros(2), &data, 0.0).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn change_along_matches_value_difference() {
        let data = vec![
            rec(&[1.0, 0.2], &[0.0, -0.3], Label::First),
            rec(&[0.5, 0.5], &[1.5, -0.5], Label::Second),
            rec(&[-1.0, 2.0], &[0.25, 0.0], Label::First),
        ];
        let obj = Objective::new(&data, 0.1).unwrap();
        let theta = [0.3, -0.7];
        let dir = [1.2, 0.4];
        for t in [1e-3, 0.1, 1.0, 5.0] {
            let moved: Vec<f64> = theta.iter().zip(&dir).map(|(x, p)| x + t * p).collect();
            let direct = obj.value(&moved).unwrap() - obj.value(&theta).unwrap();
            assert_abs_diff_eq!(obj.change_along(&theta, &dir, t).unwrap(), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_record_without_regularization_does_not_converge() {
        let data = vec![rec(&[1.0, 0.0], &[0.0, 0.0], Label::First)];
        let model = fit_mle(&data, 0.0, &FitOptions::default()).unwrap();
        assert!(!model.converged);
        assert!(model.diagnostic.unwrap().contains("separable"));
        assert!(model.final_nll < 2f64.ln());
    }

    #[test]
    fn single_record_with_regularization_converges() {
        let data = vec![rec(&[1.0, 0.0], &[0.0, 0.0], Label::First)];
        let model = fit_mle(&data, 1e-3, &FitOptions::default()).unwrap();
        assert!(model.converged, "{:?}", model.diagnostic);
        let g = nll_gradient(&model.theta_hat, &data, 1e-3).unwrap();
        assert!(g.max_abs() <= 1e-8);
        assert!(model.theta_hat[0] > 1.0);
    }

    #[test]
    fn mirrored_data_fits_to_origin() {
        let base = vec![
            rec(&[1.0, 0.2], &[0.0, -0.3], Label::First),
            rec(&[0.5, 0.5], &[1.5, -0.5], Label::Second),
        ];
        let model = fit_mle(&mirrored(&base), 1e-3, &FitOptions::default()).unwrap();
        assert!(model.converged);
        assert!(model.theta_hat.max_abs() <= 1e-8);
    }

    #[test]
    fn max_iters_is_reported() {
        let data = vec![rec(&[1.0, 0.0], &[0.0, 0.0], Label::First), rec(&[0.0, 0.0], &[1.0, 0.1], Label::First)];
        let opts = FitOptions { max_iters: 1, ..FitOptions::default() };
        let model = fit_mle(&data, 1e-3, &opts).unwrap();
        assert!(!model.converged);
        assert_eq!(model.iterations, 1);
        assert!(model.diagnostic.unwrap().contains("max_iters"));
    }

    #[test]
    fn trace_is_non_increasing() {
        let data = vec![
            rec(&[1.0, 0.2], &[0.0, -0.3], Label::First),
            rec(&[0.5, 0.5], &[1.5, -0.5], Label::Second),
            rec(&[-1.0, 2.0], &[0.25, 0.0], Label::First),
            rec(&[-1.0, 2.0], &[0.25, 0.0], Label::Second),
        ];
        let (model, trace) = fit_mle_traced(&data, 1e-3, &FitOptions::default()).unwrap();
        assert!(model.converged);
        assert_eq!(trace.len(), model.iterations + 1);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0], "{} then {}", w[0], w[1]);
        }
        assert_eq!(trace[0], nll(&FeatureVector::zeros(2), &data, 1e-3).unwrap());
        let drift = (*trace.last().unwrap() - model.final_nll).abs();
        assert!(drift <= 1e-12 * model.final_nll, "tracked value drifted by {drift:e}");
    }

    #[test]
    fn f32_fit_runs() {
        let data: Vec<ComparisonRecord<f32>> = vec![
            ComparisonRecord::new(0, FeatureVector::from_f64(&[1.0]).unwrap(), FeatureVector::from_f64(&[0.0]).unwrap(), Label::First, LabelScheme::TrueReward).unwrap(),
            ComparisonRecord::new(0, FeatureVector::from_f64(&[1.0]).unwrap(), FeatureVector::from_f64(&[0.0]).unwrap(), Label::Second, LabelScheme::TrueReward).unwrap(),
            ComparisonRecord::new(0, FeatureVector::from_f64(&[1.0]).unwrap(), FeatureVector::from_f64(&[0.0]).unwrap(), Label::First, LabelScheme::TrueReward).unwrap(),
        ];
        let opts = FitOptions { grad_tol: 1e-4, ..FitOptions::default() };
        let model = fit_mle(&data, 0.0f32, &opts).unwrap();
        assert!(model.converged);
        // closed form: sigmoid(theta) = 2/3
        assert!((model.theta_hat[0] - 2f32.ln()).abs() < 1e-3);
    }

    #[test]
    fn score_examples() {
        let model = RewardModel::from_theta(fv(&[1.0, -1.0]));
        assert_eq!(score(&model, &fv(&[2.0, 3.0])).unwrap(), -1.0);
        let zero = RewardModel::from_theta(FeatureVector::zeros(2));
        assert_eq!(score(&zero, &fv(&[5.0, -8.0])).unwrap(), 0.0);
        let (a, b, c) = (fv(&[0.5, 1.0]), fv(&[2.0, -1.0]), fv(&[3.0, 4.0]));
        let gap = score(&model, &a).unwrap() - score(&model, &b).unwrap();
        let shifted = score(&model, &FeatureVector::new(vec![3.5, 5.0]).unwrap()).unwrap()
            - score(&model, &FeatureVector::new(vec![5.0, 3.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(gap, shifted, epsilon = 1e-12);
        assert!(score(&model, &c).is_ok());
    }

    #[test]
    fn borda_counts_wins() {
        let (a, b, c, z) = (&[1.0][..], &[2.0][..], &[3.0][..], &[9.0][..]);
        let data = vec![
            rec(a, b, Label::First),
            rec(c, a, Label::Second),
            rec(a, c, Label::First),
            rec(b, a, Label::First),
        ];
        let slate = vec![fv(a), fv(b), fv(c), fv(z)];
        let s = borda_scores(&data, &slate).unwrap();
        assert_eq!(s[0], Some(0.75));
        assert_eq!(s[1], Some(0.5));
        assert_eq!(s[2], Some(0.0));
        assert_eq!(s[3], None);
        assert!(borda_scores::<f64>(&[], &slate).is_err());
    }

    #[test]
    fn borda_deterministic_winner() {
        let data = vec![rec(&[1.0], &[0.0], Label::First); 5];
        let s = borda_scores(&data, &[fv(&[1.0]), fv(&[0.0])]).unwrap();
        assert_eq!(s, vec![Some(1.0), Some(0.0)]);
    }

    #[test]
    fn positional_borda_needs_full_data() {
        let (a, b, c) = (&[1.0][..], &[2.0][..], &[3.0][..]);
        let slate = vec![fv(a), fv(b), fv(c)];
        let partial = vec![rec(a, b, Label::First)];
        assert!(positional_borda(&partial, &slate).is_err());
        let full = vec![rec(a, b, Label::First), rec(a, c, Label::First), rec(b, c, Label::Second), rec(b, c, Label::First)];
        assert_eq!(positional_borda(&full, &slate).unwrap(), vec![2.0, 0.5, 0.5]);
    }

    #[test]
    fn kendall_tau_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&x, &[10.0, 20.0, 30.0, 40.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        // one swapped pair out of six
        assert_abs_diff_eq!(kendall_tau(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap(), 4.0 / 6.0, epsilon = 1e-15);
        assert!(kendall_tau(&x, &[1.0; 4]).is_err());
    }
}
