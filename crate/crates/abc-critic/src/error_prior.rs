//! Priors on the discrepancy parameter.
//!
//! Integer-supported priors are normalized on a truncated lattice, never
//! through closed forms, so user-supplied unnormalized weights get the
//! exact same treatment as the built-ins. The neglected tail mass beyond
//! the truncation is recorded as an upper bound. Improper real-line priors
//! are accepted but carry no normalizer; anything that needs one must fail
//! loudly instead of renormalizing behind the caller's back.

use crate::model::ErrorValue;
use crate::rng::RngStream;
use thiserror::Error;

/// Default truncation half-width for lattice priors on all of Z.
pub const DEFAULT_TRUNCATION: i64 = 200;

/// Normalization slack tolerated on the truncated lattice.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PriorError {
    #[error("truncation bound must be at least 1, got {0}")]
    InvalidTruncation(i64),
    #[error("lattice weights must be finite and nonnegative (offender at {at})")]
    InvalidWeight { at: i64 },
    #[error("lattice weights sum to zero")]
    ZeroMass,
    #[error("standard deviation must be positive, got {0}")]
    InvalidScale(f64),
    #[error("operation requires a proper (normalizable) prior")]
    ImproperPrior,
    #[error("operation requires an integer-lattice prior")]
    NotLattice,
}

/// Prior on an integer lattice, normalized over `lo..=hi`.
#[derive(Debug, Clone)]
pub struct LatticePrior {
    lo: i64,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    log_normalizer: f64,
    tail_bound: f64,
}

impl LatticePrior {
    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.pmf.len() as i64 - 1
    }

    /// Normalized mass at lattice point `k`; zero off support.
    pub fn pmf(&self, k: i64) -> f64 {
        if k < self.lo || k > self.hi() {
            0.0
        } else {
            self.pmf[(k - self.lo) as usize]
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.pmf
    }

    /// Inverse-CDF draw. A point mass consumes no randomness.
    pub fn sample(&self, rng: &mut RngStream) -> i64 {
        if self.pmf.len() == 1 {
            return self.lo;
        }
        let u = rng.next_f64();
        // First index with cdf >= u.
        let idx = self.cdf.partition_point(|&c| c < u);
        self.lo + idx.min(self.pmf.len() - 1) as i64
    }
}

/// Proper or improper prior on the real line.
#[derive(Debug, Clone)]
pub enum ContinuousPrior {
    Gaussian { mean: f64, sd: f64 },
    /// Flat improper prior: density 1 everywhere, no normalizer.
    ImproperFlat,
}

/// Prior on the error parameter.
#[derive(Debug, Clone)]
pub enum ErrorPrior {
    Lattice(LatticePrior),
    Continuous(ContinuousPrior),
}

impl ErrorPrior {
    /// Heavy-tailed integer prior with weights `1/(1+k^2)` truncated to
    /// `[-trunc, trunc]`. The full-lattice series converges, so the
    /// neglected tail mass is bounded by `2/trunc` before normalization.
    pub fn cauchy_integer(trunc: i64) -> Result<Self, PriorError> {
        if trunc < 1 {
            return Err(PriorError::InvalidTruncation(trunc));
        }
        let raw_tail = 2.0 / trunc as f64;
        Self::lattice_from_unnormalized(-trunc, trunc, |k| 1.0 / (1.0 + (k * k) as f64), raw_tail)
    }

    /// Uniform prior on `{-n, ..., n}`.
    pub fn uniform_integer(n: i64) -> Result<Self, PriorError> {
        if n < 0 {
            return Err(PriorError::InvalidTruncation(n));
        }
        Self::lattice_from_unnormalized(-n, n, |_| 1.0, 0.0)
    }

    /// Lattice prior from unnormalized weights on `lo..=hi`.
    ///
    /// `raw_tail_bound` is an upper bound on the unnormalized mass the
    /// truncation leaves out; it is stored relative to the normalizer.
    pub fn lattice_from_unnormalized(
        lo: i64,
        hi: i64,
        weight: impl Fn(i64) -> f64,
        raw_tail_bound: f64,
    ) -> Result<Self, PriorError> {
        debug_assert!(lo <= hi);
        let mut pmf = Vec::with_capacity((hi - lo + 1) as usize);
        for k in lo..=hi {
            let w = weight(k);
            if !w.is_finite() || w < 0.0 {
                return Err(PriorError::InvalidWeight { at: k });
            }
            pmf.push(w);
        }
        let total: f64 = pmf.iter().sum();
        if total <= 0.0 {
            return Err(PriorError::ZeroMass);
        }
        for w in &mut pmf {
            *w /= total;
        }
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for &w in &pmf {
            acc += w;
            cdf.push(acc);
        }
        *cdf.last_mut().expect("nonempty lattice") = 1.0;
        Ok(ErrorPrior::Lattice(LatticePrior {
            lo,
            pmf,
            cdf,
            log_normalizer: total.ln(),
            tail_bound: raw_tail_bound / total,
        }))
    }

    /// Proper Gaussian prior on the real line.
    pub fn gaussian_real(mean: f64, sd: f64) -> Result<Self, PriorError> {
        if sd <= 0.0 || !sd.is_finite() {
            return Err(PriorError::InvalidScale(sd));
        }
        Ok(ErrorPrior::Continuous(ContinuousPrior::Gaussian {
            mean,
            sd,
        }))
    }

    /// Improper flat prior on the real line.
    pub fn improper_flat() -> Self {
        ErrorPrior::Continuous(ContinuousPrior::ImproperFlat)
    }

    pub fn is_proper(&self) -> bool {
        !matches!(
            self,
            ErrorPrior::Continuous(ContinuousPrior::ImproperFlat)
        )
    }

    /// Log of the normalizer the raw weights were divided by.
    /// `None` marks an improper prior.
    pub fn log_normalizer(&self) -> Option<f64> {
        match self {
            ErrorPrior::Lattice(l) => Some(l.log_normalizer),
            ErrorPrior::Continuous(ContinuousPrior::Gaussian { .. }) => Some(0.0),
            ErrorPrior::Continuous(ContinuousPrior::ImproperFlat) => None,
        }
    }

    /// Upper bound on the probability mass lost to truncation.
    pub fn tail_bound(&self) -> f64 {
        match self {
            ErrorPrior::Lattice(l) => l.tail_bound,
            ErrorPrior::Continuous(_) => 0.0,
        }
    }

    /// Normalized density (pmf on lattices) at an error value.
    pub fn density(&self, eps: &ErrorValue) -> f64 {
        match self {
            ErrorPrior::Lattice(l) => match eps.as_int() {
                Some(k) => l.pmf(k),
                // Lattice priors place no mass off the integers.
                None => 0.0,
            },
            ErrorPrior::Continuous(c) => {
                let x = eps.as_f64();
                match c {
                    ContinuousPrior::Gaussian { mean, sd } => {
                        let z = (x - mean) / sd;
                        (-0.5 * z * z).exp() / (sd * (std::f64::consts::TAU).sqrt())
                    }
                    ContinuousPrior::ImproperFlat => 1.0,
                }
            }
        }
    }

    /// Draw from the prior. Fails on improper priors.
    pub fn sample(&self, rng: &mut RngStream) -> Result<ErrorValue, PriorError> {
        match self {
            ErrorPrior::Lattice(l) => Ok(ErrorValue::Int(l.sample(rng))),
            ErrorPrior::Continuous(ContinuousPrior::Gaussian { mean, sd }) => {
                Ok(ErrorValue::Real(mean + sd * rng.next_normal()))
            }
            ErrorPrior::Continuous(ContinuousPrior::ImproperFlat) => Err(PriorError::ImproperPrior),
        }
    }

    pub fn as_lattice(&self) -> Result<&LatticePrior, PriorError> {
        match self {
            ErrorPrior::Lattice(l) => Ok(l),
            ErrorPrior::Continuous(_) => Err(PriorError::NotLattice),
        }
    }
}

/// Draw one value from `prior`, failing loudly on improper priors.
pub fn prior_sample(prior: &ErrorPrior, rng: &mut RngStream) -> Result<ErrorValue, PriorError> {
    prior.sample(rng)
}
