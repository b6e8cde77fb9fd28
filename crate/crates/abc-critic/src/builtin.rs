//! Closed-form oracle models.
//!
//! Three conjugate or semi-analytic models whose evidences and error
//! posteriors are known exactly (or to quadrature accuracy). Every Monte
//! Carlo estimator in the crate is validated against these. They are
//! ordinary public operations, not test helpers, so the CLI can print
//! analytic-vs-estimated tables.

use std::sync::Arc;

use crate::criticism::ErrorPosterior;
use crate::error_prior::ErrorPrior;
use crate::model::{DataPoint, Model, ObservationSpace, Param, SummaryVec};
use crate::quadrature::{adaptive_simpson_panels, DEFAULT_TOL};
use crate::rng::RngStream;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BuiltinError {
    #[error("truncation {trunc} must exceed the observed count {x0}")]
    TruncationTooSmall { trunc: i64, x0: u64 },
    #[error("observed count {x0} outside 0..={n}")]
    ObservationOutOfRange { x0: u64, n: u64 },
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("prior scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("operation requires a proper error prior")]
    ImproperPrior,
    #[error("operation requires a continuous error prior")]
    LatticePriorUnsupported,
    #[error("quadrature grid is empty or inverted")]
    BadGrid,
}

/// Count model: data Poisson(theta), rate prior Exponential(1).
///
/// Evidence and error posterior are available in closed form, which makes
/// this the primary calibration target for the exact-match machinery.
pub struct PoissonExpModel;

impl Model for PoissonExpModel {
    fn id(&self) -> &str {
        "poisson-exp"
    }

    fn observation_space(&self) -> ObservationSpace {
        ObservationSpace::DiscreteInteger
    }

    fn prior_sample(&self, rng: &mut RngStream) -> Param {
        Param::scalar(rng.next_exp())
    }

    fn prior_density(&self, param: &Param) -> f64 {
        let theta = param.value();
        if theta > 0.0 {
            (-theta).exp()
        } else {
            0.0
        }
    }

    fn param_in_support(&self, param: &Param) -> bool {
        param.value() > 0.0 && param.value().is_finite()
    }

    fn simulate(&self, rng: &mut RngStream, param: &Param) -> DataPoint {
        vec![rng.next_poisson(param.value()) as f64]
    }

    fn summary(&self, data: &DataPoint) -> SummaryVec {
        SummaryVec::scalar(data[0])
    }
}

/// Count model: data Binomial(n, theta), success prior Uniform(0, 1).
pub struct BinomialUniformModel {
    n: u64,
    id: String,
}

impl BinomialUniformModel {
    pub fn new(n: u64) -> Result<Self, BuiltinError> {
        if n == 0 {
            return Err(BuiltinError::NoTrials);
        }
        Ok(BinomialUniformModel {
            n,
            id: format!("binomial-n{n}"),
        })
    }

    pub fn trials(&self) -> u64 {
        self.n
    }
}

impl Model for BinomialUniformModel {
    fn id(&self) -> &str {
        &self.id
    }

    fn observation_space(&self) -> ObservationSpace {
        ObservationSpace::DiscreteInteger
    }

    fn prior_sample(&self, rng: &mut RngStream) -> Param {
        Param::scalar(rng.next_f64())
    }

    fn prior_density(&self, param: &Param) -> f64 {
        let theta = param.value();
        if (0.0..=1.0).contains(&theta) {
            1.0
        } else {
            0.0
        }
    }

    fn param_in_support(&self, param: &Param) -> bool {
        (0.0..=1.0).contains(&param.value())
    }

    fn simulate(&self, rng: &mut RngStream, param: &Param) -> DataPoint {
        vec![rng.next_binomial(self.n, param.value()) as f64]
    }

    fn summary(&self, data: &DataPoint) -> SummaryVec {
        SummaryVec::scalar(data[0])
    }
}

/// Noise distribution of a location-family model.
pub enum Noise {
    StdGaussian,
    Custom {
        density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        sample: Arc<dyn Fn(&mut RngStream) -> f64 + Send + Sync>,
    },
}

impl Noise {
    pub fn density(&self, x: f64) -> f64 {
        match self {
            Noise::StdGaussian => {
                (-0.5 * x * x).exp() / std::f64::consts::TAU.sqrt()
            }
            Noise::Custom { density, .. } => density(x),
        }
    }

    fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            Noise::StdGaussian => rng.next_normal(),
            Noise::Custom { sample, .. } => sample(rng),
        }
    }
}

/// Location family: data `theta + noise`, location prior Normal(mean, sd^2).
///
/// The pair `(theta, eps)` enters the likelihood only through `eps - theta`,
/// so that direction is known from the priors alone. This model drives the
/// prior-dominance and identifiability diagnostics.
pub struct LocationModel {
    prior_mean: f64,
    prior_sd: f64,
    noise: Noise,
}

impl LocationModel {
    pub fn gaussian(prior_mean: f64, prior_sd: f64) -> Result<Self, BuiltinError> {
        Self::with_noise(prior_mean, prior_sd, Noise::StdGaussian)
    }

    pub fn with_noise(prior_mean: f64, prior_sd: f64, noise: Noise) -> Result<Self, BuiltinError> {
        if prior_sd <= 0.0 || !prior_sd.is_finite() {
            return Err(BuiltinError::InvalidScale(prior_sd));
        }
        Ok(LocationModel {
            prior_mean,
            prior_sd,
            noise,
        })
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    pub fn prior_sd(&self) -> f64 {
        self.prior_sd
    }

    pub fn noise_density(&self, x: f64) -> f64 {
        self.noise.density(x)
    }
}

impl Model for LocationModel {
    fn id(&self) -> &str {
        "location"
    }

    fn observation_space(&self) -> ObservationSpace {
        ObservationSpace::ContinuousReal
    }

    fn prior_sample(&self, rng: &mut RngStream) -> Param {
        Param::scalar(self.prior_mean + self.prior_sd * rng.next_normal())
    }

    fn prior_density(&self, param: &Param) -> f64 {
        let z = (param.value() - self.prior_mean) / self.prior_sd;
        (-0.5 * z * z).exp() / (self.prior_sd * std::f64::consts::TAU.sqrt())
    }

    fn param_in_support(&self, param: &Param) -> bool {
        param.value().is_finite()
    }

    fn simulate(&self, rng: &mut RngStream, param: &Param) -> DataPoint {
        vec![param.value() + self.noise.sample(rng)]
    }

    fn summary(&self, data: &DataPoint) -> SummaryVec {
        SummaryVec::scalar(data[0])
    }
}

/// Evidence of the Poisson model with a unit-rate exponential prior:
/// exactly `2^-(x0+1)`.
pub fn poisson_evidence(x0: u64) -> f64 {
    2f64.powi(-(x0 as i32) - 1)
}

/// Error posterior of the Poisson model under the heavy-tailed integer
/// prior, truncated at `trunc`.
///
/// The mass at lattice point `k` is proportional to `2^(-k-x0-1)/(1+k^2)`
/// on `k >= -x0`: the support starts where `k + x0` is a valid count.
/// The unnormalized tail beyond the truncation is geometrically dominated
/// by `2^(-trunc-x0-1)` and recorded relative to the normalizer.
pub fn poisson_error_posterior(x0: u64, trunc: i64) -> Result<ErrorPosterior, BuiltinError> {
    if trunc <= x0 as i64 {
        return Err(BuiltinError::TruncationTooSmall { trunc, x0 });
    }
    let lo = -(x0 as i64);
    let weights: Vec<f64> = (lo..=trunc)
        .map(|k| {
            let exponent = -(k + x0 as i64 + 1) as i32;
            2f64.powi(exponent) / (1.0 + (k * k) as f64)
        })
        .collect();
    let raw_tail = 2f64.powi(-(trunc + x0 as i64 + 1) as i32);
    Ok(ErrorPosterior::from_lattice_weights(lo, weights, raw_tail)
        .expect("poisson posterior weights are finite and positive"))
}

/// Error posterior of the Binomial model with uniform priors on both the
/// success rate and the error: uniform `1/(2n+1)` on `{-n, ..., n}`.
///
/// The closed form sums the error over the full prior support without
/// clamping `eps + x0` to the observable range; the uniform value is
/// adopted as the contract and the sampling-side window is checked
/// separately where exact-match runs are compared against it.
pub fn binomial_error_posterior(n: u64, x0: u64) -> Result<ErrorPosterior, BuiltinError> {
    if x0 > n {
        return Err(BuiltinError::ObservationOutOfRange { x0, n });
    }
    let half = n as i64;
    let weights = vec![1.0; (2 * half + 1) as usize];
    Ok(ErrorPosterior::from_lattice_weights(-half, weights, 0.0)
        .expect("uniform weights are valid"))
}

/// Evaluation grid for continuous error posteriors.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub points: usize,
}

impl QuadratureSpec {
    pub fn new(eps_lo: f64, eps_hi: f64, points: usize) -> Result<Self, BuiltinError> {
        if !eps_lo.is_finite() || !eps_hi.is_finite() || eps_lo >= eps_hi || points < 2 {
            return Err(BuiltinError::BadGrid);
        }
        Ok(QuadratureSpec {
            eps_lo,
            eps_hi,
            points,
        })
    }

    pub fn step(&self) -> f64 {
        (self.eps_hi - self.eps_lo) / (self.points - 1) as f64
    }
}

const THETA_PANELS: usize = 256;

/// Marginal likelihood of the error value under the location model:
/// the noise density at `eps + x0 - theta` integrated against the
/// location prior.
pub fn location_error_likelihood(model: &LocationModel, eps: f64, x0: f64) -> f64 {
    let lo = model.prior_mean - 8.0 * model.prior_sd;
    let hi = model.prior_mean + 8.0 * model.prior_sd;
    adaptive_simpson_panels(
        |theta| model.noise_density(eps + x0 - theta) * model.prior_density(&Param::scalar(theta)),
        lo,
        hi,
        DEFAULT_TOL,
        THETA_PANELS,
    )
}

/// Error posterior of the location model on a fixed grid, normalized
/// numerically. The location parameter is integrated out by adaptive
/// Simpson over `prior_mean +- 8 sd`.
pub fn location_error_posterior(
    model: &LocationModel,
    prior: &ErrorPrior,
    x0: f64,
    grid: &QuadratureSpec,
) -> Result<ErrorPosterior, BuiltinError> {
    if !prior.is_proper() {
        return Err(BuiltinError::ImproperPrior);
    }
    if prior.as_lattice().is_ok() {
        return Err(BuiltinError::LatticePriorUnsupported);
    }
    let step = grid.step();
    let density: Vec<f64> = (0..grid.points)
        .map(|i| {
            let eps = grid.eps_lo + i as f64 * step;
            prior.density(&crate::model::ErrorValue::Real(eps))
                * location_error_likelihood(model, eps, x0)
        })
        .collect();
    ErrorPosterior::from_grid_density(grid.eps_lo, step, density)
        .map_err(|_| BuiltinError::BadGrid)
}

/// Unnormalized joint posterior density of `(theta, eps)` under the
/// location model: `noise(eps + x0 - theta) * prior(theta) * prior(eps)`.
pub fn location_joint_density(
    model: &LocationModel,
    prior: &ErrorPrior,
    theta: f64,
    eps: f64,
    x0: f64,
) -> f64 {
    model.noise_density(eps + x0 - theta)
        * model.prior_density(&Param::scalar(theta))
        * prior.density(&crate::model::ErrorValue::Real(eps))
}
