//! Model-assessment statistics.
//!
//! The tail-area p-value sums posterior error mass over the points that
//! are no more probable than a zero error; the comparison is inclusive,
//! so exact ties with the mass at zero count into the sum. Evidence comes
//! from exact-match acceptance rates on discrete models, where the rate
//! is an unbiased estimate of the marginal likelihood with a binomial
//! standard error.

use std::sync::Arc;

use crate::builtin::{location_error_likelihood, LocationModel};
use crate::error_prior::ErrorPrior;
use crate::model::{ErrorValue, Model, Observation, ObservationSpace, Param};
use crate::rng::RngStream;
use crate::samplers::{abc_reject, run_chunked, worker_count, SamplerError};
use thiserror::Error;

/// Normalization slack tolerated on stored posteriors.
pub const POSTERIOR_NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum CriticismError {
    #[error("posterior support does not include a zero error")]
    ZeroNotInSupport,
    #[error("masses must be finite and nonnegative (offender at index {0})")]
    InvalidMass(usize),
    #[error("masses sum to zero")]
    ZeroMass,
    #[error("p-value needs a lattice posterior")]
    NotLattice,
    #[error("evidence from acceptance rates needs a discrete observation space")]
    ContinuousModelUnsupported,
    #[error("denominator evidence is zero; the ratio is undefined")]
    UndefinedRatio,
    #[error("posterior sample is empty")]
    EmptyPosteriorSample,
    #[error("posterior and prior live on incompatible supports")]
    IncompatibleSupports,
    #[error("transform must be strictly monotone")]
    NonMonotoneTransform,
    #[error("operation requires a proper error prior")]
    ImproperPrior,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Support of an error posterior: an integer lattice or a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PosteriorSupport {
    Lattice { lo: i64 },
    Grid { lo: f64, step: f64 },
}

/// A truncated, normalized error posterior with tail-mass bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPosterior {
    support: PosteriorSupport,
    mass: Vec<f64>,
    tail_bound: f64,
}

impl ErrorPosterior {
    /// Normalize lattice weights on `lo..`. `raw_tail_bound` is an upper
    /// bound on the unnormalized mass beyond the truncation; it is stored
    /// relative to the normalizer.
    pub fn from_lattice_weights(
        lo: i64,
        weights: Vec<f64>,
        raw_tail_bound: f64,
    ) -> Result<Self, CriticismError> {
        let mass = normalize(weights)?;
        let z = mass.1;
        Ok(ErrorPosterior {
            support: PosteriorSupport::Lattice { lo },
            mass: mass.0,
            tail_bound: raw_tail_bound / z,
        })
    }

    /// Normalize density values on a uniform grid into per-cell masses.
    pub fn from_grid_density(
        lo: f64,
        step: f64,
        density: Vec<f64>,
    ) -> Result<Self, CriticismError> {
        let mass = normalize(density)?;
        Ok(ErrorPosterior {
            support: PosteriorSupport::Grid { lo, step },
            mass: mass.0,
            tail_bound: 0.0,
        })
    }

    pub fn support(&self) -> PosteriorSupport {
        self.support
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.support, PosteriorSupport::Lattice { .. })
    }

    pub fn support_lo_lattice(&self) -> Option<i64> {
        match self.support {
            PosteriorSupport::Lattice { lo } => Some(lo),
            PosteriorSupport::Grid { .. } => None,
        }
    }

    pub fn support_hi_lattice(&self) -> Option<i64> {
        self.support_lo_lattice()
            .map(|lo| lo + self.mass.len() as i64 - 1)
    }

    /// Mass at lattice point `k`; zero off support or on grid posteriors.
    pub fn pmf(&self, k: i64) -> f64 {
        match self.support {
            PosteriorSupport::Lattice { lo } => {
                if k < lo || k >= lo + self.mass.len() as i64 {
                    0.0
                } else {
                    self.mass[(k - lo) as usize]
                }
            }
            PosteriorSupport::Grid { .. } => 0.0,
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Upper bound on the probability mass lost to truncation.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }
}

fn normalize(mut values: Vec<f64>) -> Result<(Vec<f64>, f64), CriticismError> {
    if values.is_empty() {
        return Err(CriticismError::ZeroMass);
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() || *v < 0.0 {
            return Err(CriticismError::InvalidMass(i));
        }
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(CriticismError::ZeroMass);
    }
    for v in &mut values {
        *v /= total;
    }
    Ok((values, total))
}

/// Tail-area p-value: total posterior mass on lattice points whose mass
/// is no larger than the mass at zero (inclusive comparison, so exact
/// ties count). The posterior's recorded tail bound is the uncertainty
/// annotation on the returned value; it is reported alongside, never
/// added in.
pub fn pvalue_tail(post: &ErrorPosterior) -> Result<f64, CriticismError> {
    let lo = match post.support() {
        PosteriorSupport::Lattice { lo } => lo,
        PosteriorSupport::Grid { .. } => return Err(CriticismError::NotLattice),
    };
    let hi = lo + post.masses().len() as i64 - 1;
    if !(lo..=hi).contains(&0) {
        return Err(CriticismError::ZeroNotInSupport);
    }
    let at_zero = post.pmf(0);
    // Numerator and denominator accumulate in the same order so that the
    // all-included case divides a sum by itself and yields exactly 1.
    let mut num = 0.0;
    let mut den = 0.0;
    for &m in post.masses() {
        den += m;
        if m <= at_zero {
            num += m;
        }
    }
    Ok(num / den)
}

/// Evidence with a Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceEstimate {
    pub value: f64,
    pub std_error: f64,
    pub proposals: u64,
}

impl EvidenceEstimate {
    /// Binomial estimate from an acceptance count.
    pub fn from_acceptance(acceptances: u64, proposals: u64) -> Self {
        let p = acceptances as f64 / proposals as f64;
        EvidenceEstimate {
            value: p,
            std_error: (p * (1.0 - p) / proposals as f64).sqrt(),
            proposals,
        }
    }
}

/// Marginal likelihood from the exact-match acceptance rate.
///
/// Only valid on discrete models, where zero tolerance is an event of
/// positive probability and the rate estimates the evidence without any
/// approximation; on continuous data the event has measure zero and the
/// operation is refused.
pub fn evidence_exact_match(
    model: &dyn Model,
    obs: &Observation,
    proposals: u64,
    rng: &RngStream,
) -> Result<EvidenceEstimate, CriticismError> {
    if model.observation_space() != ObservationSpace::DiscreteInteger {
        return Err(CriticismError::ContinuousModelUnsupported);
    }
    let run = abc_reject(model, obs, 0.0, proposals, rng)?;
    Ok(EvidenceEstimate::from_acceptance(run.acceptances, run.proposals))
}

/// Ratio of two evidences with a first-order propagated standard error.
pub fn bayes_factor(
    a: &EvidenceEstimate,
    b: &EvidenceEstimate,
) -> Result<(f64, f64), CriticismError> {
    if b.value <= 0.0 {
        return Err(CriticismError::UndefinedRatio);
    }
    let ratio = a.value / b.value;
    let var = (a.std_error / b.value).powi(2)
        + (a.value * b.std_error).powi(2) / b.value.powi(4);
    Ok((ratio, var.sqrt()))
}

const TASK_PREDICTIVE: u64 = 0x07;

/// Two-sided posterior-predictive tail probability of the observed
/// summary: simulate one dataset per posterior draw and compare summaries.
pub fn posterior_predictive_pvalue(
    model: &dyn Model,
    posterior_thetas: &[Param],
    obs: &Observation,
    rng: &RngStream,
) -> Result<f64, CriticismError> {
    if posterior_thetas.is_empty() {
        return Err(CriticismError::EmptyPosteriorSample);
    }
    let observed = obs.summary.value();
    let counts = run_chunked(
        posterior_thetas.len() as u64,
        worker_count(),
        |_, range| {
            let mut le = 0u64;
            let mut ge = 0u64;
            for i in range {
                let mut draw_rng = rng.substream(TASK_PREDICTIVE, i);
                let theta = &posterior_thetas[i as usize];
                let data = model.simulate(&mut draw_rng, theta);
                let sim = model.summary(&data).value();
                if sim <= observed {
                    le += 1;
                }
                if sim >= observed {
                    ge += 1;
                }
            }
            (le, ge)
        },
    );
    let (le, ge) = counts
        .into_iter()
        .fold((0u64, 0u64), |(a, b), (c, d)| (a + c, b + d));
    let n = posterior_thetas.len() as f64;
    let two_sided = 2.0 * (le as f64 / n).min(ge as f64 / n);
    Ok(two_sided.clamp(0.0, 1.0))
}

/// Total variation distance between an error posterior and its prior,
/// evaluated on the posterior's support with the prior truncated and
/// renormalized to match where needed.
pub fn prior_dominance_tv(
    post: &ErrorPosterior,
    prior: &ErrorPrior,
) -> Result<f64, CriticismError> {
    match post.support() {
        PosteriorSupport::Lattice { lo } => {
            let lattice = prior
                .as_lattice()
                .map_err(|_| CriticismError::IncompatibleSupports)?;
            // Compare over the union of the two truncated supports;
            // either distribution is zero where it has no point.
            let union_lo = lo.min(lattice.lo());
            let union_hi = post
                .support_hi_lattice()
                .expect("lattice posterior")
                .max(lattice.hi());
            let mut l1 = 0.0;
            for k in union_lo..=union_hi {
                l1 += (post.pmf(k) - lattice.pmf(k)).abs();
            }
            Ok(0.5 * l1)
        }
        PosteriorSupport::Grid { lo, step } => {
            if !prior.is_proper() {
                return Err(CriticismError::ImproperPrior);
            }
            if prior.as_lattice().is_ok() {
                return Err(CriticismError::IncompatibleSupports);
            }
            let n = post.masses().len();
            let prior_mass: Vec<f64> = (0..n)
                .map(|i| prior.density(&ErrorValue::Real(lo + i as f64 * step)))
                .collect();
            let z: f64 = prior_mass.iter().sum();
            if z <= 0.0 {
                return Err(CriticismError::IncompatibleSupports);
            }
            let l1: f64 = post
                .masses()
                .iter()
                .zip(prior_mass.iter())
                .map(|(p, q)| (p - q / z).abs())
                .sum();
            Ok(0.5 * l1)
        }
    }
}

/// A strictly monotone, differentiable change of the error coordinate.
#[derive(Clone)]
pub struct MonotoneMap {
    pub forward: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl MonotoneMap {
    pub fn identity() -> Self {
        MonotoneMap {
            forward: Arc::new(|e| e),
            derivative: Arc::new(|_| 1.0),
        }
    }

    pub fn affine(scale: f64, shift: f64) -> Self {
        MonotoneMap {
            forward: Arc::new(move |e| scale * e + shift),
            derivative: Arc::new(move |_| scale),
        }
    }

    /// `e^3 + e`: a strictly increasing cubic with non-constant slope.
    pub fn cubic() -> Self {
        MonotoneMap {
            forward: Arc::new(|e| e * e * e + e),
            derivative: Arc::new(|e| 3.0 * e * e + 1.0),
        }
    }
}

const REPARAM_GRID_POINTS: usize = 4001;
const REPARAM_GRID_HALF_WIDTH_SDS: f64 = 8.0;

/// How far the error coordinate is from being a probability-preserving
/// parameter: transforming each factor of the error target as a density
/// picks up the Jacobian twice, while the pushforward of the normalized
/// target picks it up once. Returns the total variation between the two
/// for `transform`, and the same comparison for a reference affine map
/// (always zero up to quadrature noise, since a constant Jacobian cancels
/// under normalization).
pub fn reparam_demo(
    model: &LocationModel,
    prior: &ErrorPrior,
    transform: &MonotoneMap,
    x0: f64,
) -> Result<(f64, f64), CriticismError> {
    if !prior.is_proper() {
        return Err(CriticismError::ImproperPrior);
    }
    if prior.as_lattice().is_ok() {
        return Err(CriticismError::IncompatibleSupports);
    }
    let tv = reparam_tv(model, prior, transform, x0)?;
    let affine_tv = reparam_tv(model, prior, &MonotoneMap::affine(2.0, 1.0), x0)?;
    Ok((tv, affine_tv))
}

fn reparam_tv(
    model: &LocationModel,
    prior: &ErrorPrior,
    transform: &MonotoneMap,
    x0: f64,
) -> Result<f64, CriticismError> {
    let half = REPARAM_GRID_HALF_WIDTH_SDS;
    let (lo, hi) = (-half, half);
    let n = REPARAM_GRID_POINTS;
    let step = (hi - lo) / (n - 1) as f64;

    // Substituting the transform back into the transformed-coordinate
    // integrals turns everything into grid sums over the original
    // coordinate: with w = target density and t' the slope,
    //   pushforward mass   ~ w(e) / Zg
    //   double-Jacobian mass ~ w(e) / (t'(e) Za),  Za = sum w / t'.
    let mut slope_sign = 0.0f64;
    let mut w = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    for i in 0..n {
        let e = lo + i as f64 * step;
        let slope = (transform.derivative)(e);
        if slope == 0.0 || !slope.is_finite() {
            return Err(CriticismError::NonMonotoneTransform);
        }
        if slope_sign == 0.0 {
            slope_sign = slope.signum();
        } else if slope.signum() != slope_sign {
            return Err(CriticismError::NonMonotoneTransform);
        }
        let target =
            prior.density(&ErrorValue::Real(e)) * location_error_likelihood(model, e, x0);
        w.push(target);
        slopes.push(slope.abs());
    }
    let zg: f64 = w.iter().sum();
    let za: f64 = w.iter().zip(slopes.iter()).map(|(wi, si)| wi / si).sum();
    if zg <= 0.0 || za <= 0.0 {
        return Err(CriticismError::ZeroMass);
    }
    let l1: f64 = w
        .iter()
        .zip(slopes.iter())
        .map(|(wi, si)| (wi / (si * za) - wi / zg).abs())
        .sum();
    Ok(0.5 * l1)
}

/// Bundle of criticism quantities for one model and observation.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticismReport {
    pub model_id: String,
    pub pvalue: f64,
    pub evidence: Evidence,
    pub predictive_pvalue: Option<f64>,
}

/// Evidence entry of a report: exact when a closed form exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evidence {
    Exact(f64),
    Estimated(EvidenceEstimate),
}

impl CriticismReport {
    pub fn new(
        model_id: impl Into<String>,
        pvalue: f64,
        evidence: Evidence,
        predictive_pvalue: Option<f64>,
    ) -> Result<Self, CriticismError> {
        if !(0.0..=1.0).contains(&pvalue) {
            return Err(CriticismError::InvalidMass(0));
        }
        if let Some(p) = predictive_pvalue {
            if !(0.0..=1.0).contains(&p) {
                return Err(CriticismError::InvalidMass(0));
            }
        }
        Ok(CriticismReport {
            model_id: model_id.into(),
            pvalue,
            evidence,
            predictive_pvalue,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{
        binomial_error_posterior, poisson_error_posterior, poisson_evidence, PoissonExpModel,
    };
    use crate::error_prior::ErrorPrior;
    use crate::model::Observation;

    fn poisson_obs(x0: u64) -> Observation {
        Observation::from_data(&PoissonExpModel, vec![x0 as f64])
    }

    #[test]
    fn pvalue_is_exactly_one_while_zero_mass_dominates() {
        // Every point of the truncated posterior weighs at most the mass
        // at zero until the support reaches -5, so the indicator sums the
        // whole pmf.
        for x0 in 0..=4u64 {
            let post = poisson_error_posterior(x0, 200).unwrap();
            assert_eq!(pvalue_tail(&post).unwrap(), 1.0, "x0={x0}");
        }
    }

    #[test]
    fn pvalue_drops_once_heavy_negative_errors_enter() {
        let post = poisson_error_posterior(5, 200).unwrap();
        let p = pvalue_tail(&post).unwrap();
        // Frozen from the direct truncated summation.
        assert!((p - 0.797_903_351_774_145_4).abs() < 1e-12, "{p}");
    }

    #[test]
    fn pvalue_of_flat_posterior_is_one() {
        let post = binomial_error_posterior(5, 2).unwrap();
        assert_eq!(pvalue_tail(&post).unwrap(), 1.0);
    }

    #[test]
    fn pvalue_of_point_mass_is_one() {
        let post = ErrorPosterior::from_lattice_weights(0, vec![1.0], 0.0).unwrap();
        assert_eq!(pvalue_tail(&post).unwrap(), 1.0);
    }

    #[test]
    fn pvalue_requires_zero_in_support() {
        let post = ErrorPosterior::from_lattice_weights(1, vec![0.5, 0.5], 0.0).unwrap();
        assert_eq!(
            pvalue_tail(&post).unwrap_err(),
            CriticismError::ZeroNotInSupport
        );
    }

    #[test]
    fn pvalue_depends_only_on_the_multiset_of_masses() {
        // Permuting the non-zero support points leaves the p-value alone.
        let weights = vec![0.05, 0.3, 0.25, 0.2, 0.1, 0.1];
        let post = ErrorPosterior::from_lattice_weights(-2, weights.clone(), 0.0).unwrap();
        let p_ref = pvalue_tail(&post).unwrap();
        // Swap masses among points other than zero (index 2 holds k=0).
        let mut permuted = weights.clone();
        permuted.swap(0, 5);
        permuted.swap(1, 4);
        let post2 = ErrorPosterior::from_lattice_weights(-2, permuted, 0.0).unwrap();
        assert!((pvalue_tail(&post2).unwrap() - p_ref).abs() < 1e-15);
    }

    #[test]
    fn pvalue_is_one_exactly_when_zero_mass_is_maximal() {
        let mut rng = RngStream::from_seed(606);
        for _ in 0..200 {
            let len = 3 + (rng.next_u64() % 8) as usize;
            let lo = -((rng.next_u64() % len as u64) as i64);
            let weights: Vec<f64> = (0..len).map(|_| rng.next_f64() + 1e-3).collect();
            let post = ErrorPosterior::from_lattice_weights(lo, weights, 0.0).unwrap();
            let p = pvalue_tail(&post).unwrap();
            let max = post.masses().iter().cloned().fold(0.0f64, f64::max);
            if post.pmf(0) == max {
                assert_eq!(p, 1.0);
            } else {
                assert!(p < 1.0);
            }
        }
    }

    #[test]
    fn exact_match_evidence_hits_the_closed_form() {
        let model = PoissonExpModel;
        let rng = RngStream::from_seed(1_000_003);
        let n = 400_000u64;
        for x0 in [1u64, 5] {
            let est = evidence_exact_match(&model, &poisson_obs(x0), n, &rng).unwrap();
            let exact = poisson_evidence(x0);
            assert!(
                (est.value - exact).abs() <= 3.0 * est.std_error,
                "x0={x0}: {} vs {exact}",
                est.value
            );
            assert_eq!(est.proposals, n);
        }
    }

    #[test]
    fn exact_match_evidence_rejects_continuous_models() {
        let model = crate::builtin::LocationModel::gaussian(0.0, 1.0).unwrap();
        let obs = Observation::from_data(&model, vec![0.0]);
        let rng = RngStream::from_seed(4);
        assert_eq!(
            evidence_exact_match(&model, &obs, 1000, &rng).unwrap_err(),
            CriticismError::ContinuousModelUnsupported
        );
    }

    #[test]
    fn exact_match_evidence_needs_proposals() {
        let model = PoissonExpModel;
        let rng = RngStream::from_seed(4);
        assert!(matches!(
            evidence_exact_match(&model, &poisson_obs(1), 0, &rng),
            Err(CriticismError::Sampler(SamplerError::NoProposals))
        ));
    }

    #[test]
    fn bayes_factor_basics() {
        let a = EvidenceEstimate::from_acceptance(250, 1000);
        let (bf, se) = bayes_factor(&a, &a).unwrap();
        assert_eq!(bf, 1.0);
        assert!(se > 0.0);

        let zero = EvidenceEstimate::from_acceptance(0, 1000);
        let (bf, se) = bayes_factor(&zero, &a).unwrap();
        assert_eq!(bf, 0.0);
        assert_eq!(se, 0.0);

        assert_eq!(
            bayes_factor(&a, &zero).unwrap_err(),
            CriticismError::UndefinedRatio
        );
    }

    #[test]
    fn bayes_factor_of_analytic_evidences_is_exact() {
        // Evidences are powers of two, so the forward and reverse ratios
        // are exact and multiply back to one.
        let a = EvidenceEstimate {
            value: poisson_evidence(1),
            std_error: 0.0,
            proposals: 0,
        };
        let b = EvidenceEstimate {
            value: poisson_evidence(3),
            std_error: 0.0,
            proposals: 0,
        };
        let (fwd, _) = bayes_factor(&a, &b).unwrap();
        let (rev, _) = bayes_factor(&b, &a).unwrap();
        assert_eq!(fwd, 4.0);
        assert_eq!(fwd * rev, 1.0);
    }

    #[test]
    fn bayes_factor_between_estimates_within_propagated_error() {
        let model = PoissonExpModel;
        let rng_a = RngStream::from_seed(111);
        let rng_b = RngStream::from_seed(222);
        let n = 400_000u64;
        let a = evidence_exact_match(&model, &poisson_obs(1), n, &rng_a).unwrap();
        let b = evidence_exact_match(&model, &poisson_obs(3), n, &rng_b).unwrap();
        let (bf, se) = bayes_factor(&a, &b).unwrap();
        assert!((bf - 4.0).abs() <= 3.0 * se, "bf {bf} se {se}");
    }

    #[test]
    fn predictive_pvalue_near_one_at_the_median() {
        // All posterior mass at theta = 3; the observation sits at the
        // predictive median of Poisson(3).
        let model = PoissonExpModel;
        let thetas: Vec<Param> = (0..20_000).map(|_| Param::scalar(3.0)).collect();
        let obs = poisson_obs(3);
        let rng = RngStream::from_seed(12);
        let p = posterior_predictive_pvalue(&model, &thetas, &obs, &rng).unwrap();
        assert!(p > 0.9, "p {p}");
    }

    #[test]
    fn predictive_pvalue_flags_far_tail_observations() {
        let model = PoissonExpModel;
        let rng = RngStream::from_seed(77);
        let posterior = abc_reject(&model, &poisson_obs(1), 0.0, 200_000, &rng).unwrap();
        let thetas: Vec<Param> = posterior.accepted.into_iter().map(|d| d.param).collect();
        assert!(!thetas.is_empty());
        let far_obs = poisson_obs(50);
        let p = posterior_predictive_pvalue(&model, &thetas, &far_obs, &rng).unwrap();
        assert!(p < 0.01, "p {p}");
    }

    #[test]
    fn predictive_pvalue_degenerate_match_is_one() {
        // One posterior draw with a degenerate simulator that returns the
        // observation itself: both tail frequencies are 1.
        let model = crate::builtin::BinomialUniformModel::new(5).unwrap();
        let obs = Observation::from_data(&model, vec![5.0]);
        let thetas = vec![Param::scalar(1.0)];
        let rng = RngStream::from_seed(2);
        let p = posterior_predictive_pvalue(&model, &thetas, &obs, &rng).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn predictive_pvalue_requires_draws() {
        let model = PoissonExpModel;
        let rng = RngStream::from_seed(2);
        assert_eq!(
            posterior_predictive_pvalue(&model, &[], &poisson_obs(1), &rng).unwrap_err(),
            CriticismError::EmptyPosteriorSample
        );
    }

    #[test]
    fn tv_of_identical_distributions_is_zero() {
        let post = binomial_error_posterior(5, 2).unwrap();
        let prior = ErrorPrior::uniform_integer(5).unwrap();
        assert_eq!(prior_dominance_tv(&post, &prior).unwrap(), 0.0);
    }

    #[test]
    fn tv_of_point_mass_against_uniform() {
        let post = ErrorPosterior::from_lattice_weights(0, vec![1.0], 0.0).unwrap();
        let prior = ErrorPrior::uniform_integer(5).unwrap();
        let tv = prior_dominance_tv(&post, &prior).unwrap();
        assert!((tv - 10.0 / 11.0).abs() < 1e-15, "{tv}");
    }

    #[test]
    fn tv_rejects_incompatible_supports() {
        let post = binomial_error_posterior(5, 2).unwrap();
        let prior = ErrorPrior::gaussian_real(0.0, 1.0).unwrap();
        assert_eq!(
            prior_dominance_tv(&post, &prior).unwrap_err(),
            CriticismError::IncompatibleSupports
        );
    }

    #[test]
    fn reparam_affine_and_identity_cost_nothing() {
        let model = LocationModel::gaussian(0.0, 1.0).unwrap();
        let prior = ErrorPrior::gaussian_real(0.0, 1.0).unwrap();
        let (tv_affine, tv_ref) =
            reparam_demo(&model, &prior, &MonotoneMap::affine(2.0, 1.0), 0.0).unwrap();
        assert!(tv_affine < 1e-8, "{tv_affine}");
        assert!(tv_ref < 1e-8, "{tv_ref}");
        let (tv_id, _) = reparam_demo(&model, &prior, &MonotoneMap::identity(), 0.0).unwrap();
        assert!(tv_id < 1e-12, "{tv_id}");
    }

    #[test]
    fn reparam_cubic_moves_real_mass() {
        let model = LocationModel::gaussian(0.0, 1.0).unwrap();
        let prior = ErrorPrior::gaussian_real(0.0, 1.0).unwrap();
        let (tv, affine_ref) =
            reparam_demo(&model, &prior, &MonotoneMap::cubic(), 0.0).unwrap();
        assert!(tv > 0.01, "{tv}");
        // Quadrature value of the same comparison, frozen independently.
        assert!((tv - 0.241_776_25).abs() < 1e-3, "{tv}");
        assert!(affine_ref < 1e-8);
    }

    #[test]
    fn reparam_rejects_non_monotone_transforms() {
        let model = LocationModel::gaussian(0.0, 1.0).unwrap();
        let prior = ErrorPrior::gaussian_real(0.0, 1.0).unwrap();
        let square = MonotoneMap {
            forward: Arc::new(|e| e * e),
            derivative: Arc::new(|e| 2.0 * e),
        };
        assert_eq!(
            reparam_demo(&model, &prior, &square, 0.0).unwrap_err(),
            CriticismError::NonMonotoneTransform
        );
    }

    #[test]
    fn report_validates_probabilities() {
        assert!(CriticismReport::new("m", 1.5, Evidence::Exact(0.5), None).is_err());
        let report =
            CriticismReport::new("m", 0.5, Evidence::Exact(0.25), Some(0.7)).unwrap();
        assert_eq!(report.model_id, "m");
    }

    use crate::builtin::LocationModel;
}
