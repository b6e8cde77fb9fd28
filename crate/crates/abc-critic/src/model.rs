//! Generative-model abstraction shared by all samplers and criticism tools.
//!
//! A model bundles a parameter prior (sampler and density), a data
//! simulator, a summary statistic, and a discrepancy between summaries.
//! The built-in discrepancy is the signed difference `sim - obs`; the
//! error posteriors of the built-in models live on signed supports, so a
//! plain distance would lose half of them.

use crate::rng::RngStream;
use thiserror::Error;

/// Raw dataset produced by a simulator. The built-in models emit a single
/// number; the type is a vector to leave room for richer models.
pub type DataPoint = Vec<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("parameter outside the model's declared support")]
    OutOfSupport,
    #[error("summary length mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Whether a model's data live on the integer lattice or the real line.
///
/// Exact-match acceptance (and the evidence identity built on it) is only
/// meaningful for discrete data; continuous models must go through the
/// smooth kernel route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservationSpace {
    DiscreteInteger,
    ContinuousReal,
}

/// Model parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Param(pub Vec<f64>);

impl Param {
    pub fn scalar(v: f64) -> Self {
        Param(vec![v])
    }

    /// First component, for the one-dimensional built-ins.
    pub fn value(&self) -> f64 {
        self.0[0]
    }
}

/// Vector of summary statistics (length 1 for all built-ins).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryVec(pub Vec<f64>);

impl SummaryVec {
    pub fn scalar(v: f64) -> Self {
        SummaryVec(vec![v])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Signed discrepancy between a simulated and an observed summary.
///
/// Discrete models carry an exact integer; continuous models a finite real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorValue {
    Int(i64),
    Real(f64),
}

impl ErrorValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            ErrorValue::Int(k) => k as f64,
            ErrorValue::Real(x) => x,
        }
    }

    pub fn abs(&self) -> f64 {
        self.as_f64().abs()
    }

    /// The lattice point, if this is an integer error.
    pub fn as_int(&self) -> Option<i64> {
        match *self {
            ErrorValue::Int(k) => Some(k),
            ErrorValue::Real(_) => None,
        }
    }
}

/// An observed dataset together with its precomputed summary.
#[derive(Debug, Clone)]
pub struct Observation {
    pub data: DataPoint,
    pub summary: SummaryVec,
}

impl Observation {
    /// Build an observation, computing the summary with the model's own
    /// statistic so the two can never drift apart.
    pub fn from_data<M: Model + ?Sized>(model: &M, data: DataPoint) -> Self {
        let summary = model.summary(&data);
        Observation { data, summary }
    }
}

/// A generative model: prior, simulator, summary statistic, discrepancy.
///
/// Implementations must be immutable and freely shareable; all randomness
/// flows through the explicitly passed [`RngStream`].
pub trait Model: Send + Sync {
    /// Model label used in reports and CSV output.
    fn id(&self) -> &str;

    fn observation_space(&self) -> ObservationSpace;

    fn prior_sample(&self, rng: &mut RngStream) -> Param;

    /// Prior density at `param`; zero off support.
    fn prior_density(&self, param: &Param) -> f64;

    fn param_in_support(&self, param: &Param) -> bool;

    /// Simulate one dataset at `param`. Pure in `(rng state, param)`.
    fn simulate(&self, rng: &mut RngStream, param: &Param) -> DataPoint;

    fn summary(&self, data: &DataPoint) -> SummaryVec;

    /// Signed difference `sim - obs`, integer-valued on discrete models.
    fn discrepancy(&self, sim: &SummaryVec, obs: &SummaryVec) -> Result<ErrorValue, ModelError> {
        if sim.len() != obs.len() {
            return Err(ModelError::DimensionMismatch {
                left: sim.len(),
                right: obs.len(),
            });
        }
        let diff = sim.value() - obs.value();
        match self.observation_space() {
            ObservationSpace::DiscreteInteger => Ok(ErrorValue::Int(diff.round() as i64)),
            ObservationSpace::ContinuousReal => Ok(ErrorValue::Real(diff)),
        }
    }
}

/// Simulate one dataset at `param` and return its summary.
pub fn simulate_summary<M: Model + ?Sized>(
    model: &M,
    param: &Param,
    rng: &mut RngStream,
) -> Result<SummaryVec, ModelError> {
    if !model.param_in_support(param) {
        return Err(ModelError::OutOfSupport);
    }
    let data = model.simulate(rng, param);
    Ok(model.summary(&data))
}

/// Discrepancy of a simulated summary against an observed one.
pub fn error_of<M: Model + ?Sized>(
    model: &M,
    sim: &SummaryVec,
    obs: &SummaryVec,
) -> Result<ErrorValue, ModelError> {
    model.discrepancy(sim, obs)
}
