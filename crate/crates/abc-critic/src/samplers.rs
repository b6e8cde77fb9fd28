//! Monte Carlo engines.
//!
//! All samplers draw proposal `i` from the substream `(task, i)` of the
//! master stream, process proposals in chunks of 2^16, and merge chunk
//! results in chunk order. Results are therefore bit-identical for a fixed
//! master seed no matter how many worker threads run, which the CSV-level
//! reproducibility contract depends on.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc;

use crate::error_prior::{ErrorPrior, PriorError};
use crate::model::{ErrorValue, Model, Observation, ObservationSpace, Param};
use crate::rng::RngStream;
use thiserror::Error;

/// Default smoothing bandwidth for integer-valued discrepancies.
pub const DEFAULT_BANDWIDTH: f64 = 0.5;

pub(crate) const CHUNK_SIZE: u64 = 1 << 16;

// The three proposal-based samplers share one draw stream. Per proposal
// the order is theta, error, data; a point-mass error prior consumes no
// randomness, so plain rejection, exact-match augmentation, and the
// smooth variant see literally the same draws under a shared seed and
// differ only in how they treat them.
const TASK_PROPOSAL: u64 = 0x01;
const TASK_PILOT: u64 = 0x05;
const TASK_FRESH: u64 = 0x06;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("at least one proposal is required")]
    NoProposals,
    #[error("exact matching needs a discrete observation space; use the smooth kernel sampler")]
    ContinuousObservationSpace,
    #[error("bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),
    #[error("at least one replicate is required")]
    NoReplicates,
    #[error("pilot and fresh counts must be at least 1")]
    EmptyPhase,
    #[error("run contains non-integer errors; no lattice marginal exists")]
    NonLatticeRun,
    #[error(transparent)]
    Prior(#[from] PriorError),
}

/// Number of worker threads: the `ABC_CRITIC_THREADS` override if set,
/// otherwise the available parallelism capped at 8. Results never depend
/// on this value.
pub fn worker_count() -> usize {
    if let Ok(raw) = std::env::var("ABC_CRITIC_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

/// Run `f` over `0..n_items` split into fixed-size chunks, returning the
/// per-chunk outputs in chunk order regardless of scheduling.
pub(crate) fn run_chunked<T, F>(n_items: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, Range<u64>) -> T + Sync,
{
    let n_chunks = n_items.div_ceil(CHUNK_SIZE);
    if n_chunks == 0 {
        return Vec::new();
    }
    let workers = workers.clamp(1, n_chunks as usize);
    let mut slots: Vec<Option<T>> = (0..n_chunks).map(|_| None).collect();
    if workers == 1 {
        for c in 0..n_chunks {
            let lo = c * CHUNK_SIZE;
            let hi = (lo + CHUNK_SIZE).min(n_items);
            slots[c as usize] = Some(f(c, lo..hi));
        }
    } else {
        let next = AtomicU64::new(0);
        let (tx, rx) = mpsc::channel::<(u64, T)>();
        std::thread::scope(|scope| {
            for _ in 0..workers {
                let tx = tx.clone();
                let next = &next;
                let f = &f;
                scope.spawn(move || loop {
                    let c = next.fetch_add(1, Ordering::Relaxed);
                    if c >= n_chunks {
                        break;
                    }
                    let lo = c * CHUNK_SIZE;
                    let hi = (lo + CHUNK_SIZE).min(n_items);
                    if tx.send((c, f(c, lo..hi))).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for (c, value) in rx {
                slots[c as usize] = Some(value);
            }
        });
    }
    slots.into_iter().map(|s| s.expect("chunk completed")).collect()
}

/// One retained proposal.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedDraw {
    pub param: Param,
    pub error: ErrorValue,
    pub weight: f64,
}

/// Output of a sampler run: retained draws plus proposal accounting.
///
/// Rejection-style runs retain accepted draws with weight 1; the smooth
/// sampler retains every proposal with its kernel weight. Raw weights are
/// stored as produced and only normalized by consumers, so acceptance
/// counts keep their meaning for evidence estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcRun {
    pub accepted: Vec<AcceptedDraw>,
    pub proposals: u64,
    pub acceptances: u64,
    pub master_seed: u64,
}

impl AbcRun {
    pub fn acceptance_rate(&self) -> f64 {
        self.acceptances as f64 / self.proposals as f64
    }

    /// Weighted marginal pmf of the integer error values.
    pub fn eps_marginal_lattice(&self) -> Result<BTreeMap<i64, f64>, SamplerError> {
        let mut mass: BTreeMap<i64, f64> = BTreeMap::new();
        let mut total = 0.0;
        for draw in &self.accepted {
            let k = draw.error.as_int().ok_or(SamplerError::NonLatticeRun)?;
            *mass.entry(k).or_insert(0.0) += draw.weight;
            total += draw.weight;
        }
        if total > 0.0 {
            for v in mass.values_mut() {
                *v /= total;
            }
        }
        Ok(mass)
    }

    /// Weighted histogram of the first parameter component over `bins`
    /// equal cells on `[lo, hi)`; draws at or beyond `hi` land in the last
    /// bin, draws below `lo` in the first.
    pub fn theta_histogram(&self, lo: f64, hi: f64, bins: usize) -> Vec<f64> {
        assert!(bins >= 1 && hi > lo);
        let width = (hi - lo) / bins as f64;
        let mut hist = vec![0.0; bins];
        let mut total = 0.0;
        for draw in &self.accepted {
            let x = draw.param.value();
            let idx = (((x - lo) / width).floor() as i64).clamp(0, bins as i64 - 1) as usize;
            hist[idx] += draw.weight;
            total += draw.weight;
        }
        if total > 0.0 {
            for v in &mut hist {
                *v /= total;
            }
        }
        hist
    }

    /// Sum of retained weights and the effective sample size
    /// `(sum w)^2 / sum w^2`.
    pub fn weight_summary(&self) -> (f64, f64) {
        let sum: f64 = self.accepted.iter().map(|d| d.weight).sum();
        let sum_sq: f64 = self.accepted.iter().map(|d| d.weight * d.weight).sum();
        let ess = if sum_sq > 0.0 { sum * sum / sum_sq } else { 0.0 };
        (sum, ess)
    }
}

/// Smoothing kernel for the kernel-weighted samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernel {
    #[default]
    Gaussian,
    Epanechnikov,
}

impl Kernel {
    /// Scaled kernel density `K_h(u) = K(u/h)/h`; symmetric, unit mass,
    /// maximal at `u = 0`.
    pub fn density(self, h: f64, u: f64) -> f64 {
        let z = u / h;
        match self {
            Kernel::Gaussian => (-0.5 * z * z).exp() / (h * std::f64::consts::TAU.sqrt()),
            Kernel::Epanechnikov => {
                if z.abs() <= 1.0 {
                    0.75 * (1.0 - z * z) / h
                } else {
                    0.0
                }
            }
        }
    }
}

struct ChunkAccum {
    accepted: Vec<AcceptedDraw>,
    acceptances: u64,
}

fn merge_chunks(chunks: Vec<ChunkAccum>, proposals: u64, master_seed: u64) -> AbcRun {
    let mut accepted = Vec::new();
    let mut acceptances = 0;
    for chunk in chunks {
        acceptances += chunk.acceptances;
        accepted.extend(chunk.accepted);
    }
    AbcRun {
        accepted,
        proposals,
        acceptances,
        master_seed,
    }
}

/// Plain rejection ABC: accept a prior draw when the absolute discrepancy
/// between its simulated summary and the observation is within `tolerance`.
pub fn abc_reject(
    model: &dyn Model,
    obs: &Observation,
    tolerance: f64,
    proposals: u64,
    rng: &RngStream,
) -> Result<AbcRun, SamplerError> {
    abc_reject_with_workers(model, obs, tolerance, proposals, rng, worker_count())
}

pub(crate) fn abc_reject_with_workers(
    model: &dyn Model,
    obs: &Observation,
    tolerance: f64,
    proposals: u64,
    rng: &RngStream,
    workers: usize,
) -> Result<AbcRun, SamplerError> {
    if proposals == 0 {
        return Err(SamplerError::NoProposals);
    }
    let chunks = run_chunked(proposals, workers, |_, range| {
        let mut acc = ChunkAccum {
            accepted: Vec::new(),
            acceptances: 0,
        };
        for i in range {
            let mut draw_rng = rng.substream(TASK_PROPOSAL, i);
            let theta = model.prior_sample(&mut draw_rng);
            let data = model.simulate(&mut draw_rng, &theta);
            let sim = model.summary(&data);
            let err = model
                .discrepancy(&sim, &obs.summary)
                .expect("model discrepancy on its own summaries");
            if err.abs() <= tolerance {
                acc.acceptances += 1;
                acc.accepted.push(AcceptedDraw {
                    param: theta,
                    error: err,
                    weight: 1.0,
                });
            }
        }
        acc
    });
    Ok(merge_chunks(chunks, proposals, rng.root_seed()))
}

/// Error-augmented rejection: draw `(theta, eps)` from their priors,
/// simulate, and accept when the realized discrepancy equals `eps`
/// exactly. Accepted pairs are distributed as the normalized product of
/// the discrepancy law, the error prior, and the parameter prior.
pub fn abc_mu_reject(
    model: &dyn Model,
    eprior: &ErrorPrior,
    obs: &Observation,
    proposals: u64,
    rng: &RngStream,
) -> Result<AbcRun, SamplerError> {
    abc_mu_reject_with_workers(model, eprior, obs, proposals, rng, worker_count())
}

pub(crate) fn abc_mu_reject_with_workers(
    model: &dyn Model,
    eprior: &ErrorPrior,
    obs: &Observation,
    proposals: u64,
    rng: &RngStream,
    workers: usize,
) -> Result<AbcRun, SamplerError> {
    if proposals == 0 {
        return Err(SamplerError::NoProposals);
    }
    if model.observation_space() != ObservationSpace::DiscreteInteger {
        return Err(SamplerError::ContinuousObservationSpace);
    }
    let lattice = eprior.as_lattice()?;
    let chunks = run_chunked(proposals, workers, |_, range| {
        let mut acc = ChunkAccum {
            accepted: Vec::new(),
            acceptances: 0,
        };
        for i in range {
            let mut draw_rng = rng.substream(TASK_PROPOSAL, i);
            let theta = model.prior_sample(&mut draw_rng);
            let eps = lattice.sample(&mut draw_rng);
            let data = model.simulate(&mut draw_rng, &theta);
            let sim = model.summary(&data);
            let err = model
                .discrepancy(&sim, &obs.summary)
                .expect("model discrepancy on its own summaries");
            if err == ErrorValue::Int(eps) {
                acc.acceptances += 1;
                acc.accepted.push(AcceptedDraw {
                    param: theta,
                    error: err,
                    weight: 1.0,
                });
            }
        }
        acc
    });
    Ok(merge_chunks(chunks, proposals, rng.root_seed()))
}

/// Smooth-kernel variant: every proposal is retained with weight
/// `K_h(rho - eps)`, the kernel distance between the realized discrepancy
/// and the proposed error. As `h` shrinks on a discrete model the
/// normalized weights recover the exact-match indicator.
pub fn abc_mu_smooth(
    model: &dyn Model,
    eprior: &ErrorPrior,
    obs: &Observation,
    bandwidth: f64,
    kernel: Kernel,
    proposals: u64,
    rng: &RngStream,
) -> Result<AbcRun, SamplerError> {
    abc_mu_smooth_with_workers(
        model,
        eprior,
        obs,
        bandwidth,
        kernel,
        proposals,
        rng,
        worker_count(),
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn abc_mu_smooth_with_workers(
    model: &dyn Model,
    eprior: &ErrorPrior,
    obs: &Observation,
    bandwidth: f64,
    kernel: Kernel,
    proposals: u64,
    rng: &RngStream,
    workers: usize,
) -> Result<AbcRun, SamplerError> {
    if proposals == 0 {
        return Err(SamplerError::NoProposals);
    }
    if bandwidth <= 0.0 || !bandwidth.is_finite() {
        return Err(SamplerError::InvalidBandwidth(bandwidth));
    }
    if !eprior.is_proper() {
        return Err(SamplerError::Prior(PriorError::ImproperPrior));
    }
    let chunks = run_chunked(proposals, workers, |_, range| {
        let mut acc = ChunkAccum {
            accepted: Vec::new(),
            acceptances: 0,
        };
        for i in range {
            let mut draw_rng = rng.substream(TASK_PROPOSAL, i);
            let theta = model.prior_sample(&mut draw_rng);
            let eps = eprior.sample(&mut draw_rng).expect("proper prior");
            let data = model.simulate(&mut draw_rng, &theta);
            let sim = model.summary(&data);
            let rho = model
                .discrepancy(&sim, &obs.summary)
                .expect("model discrepancy on its own summaries");
            let weight = kernel.density(bandwidth, rho.as_f64() - eps.as_f64());
            acc.acceptances += 1;
            acc.accepted.push(AcceptedDraw {
                param: theta,
                error: eps,
                weight,
            });
        }
        acc
    });
    Ok(merge_chunks(chunks, proposals, rng.root_seed()))
}

/// Kernel density estimate of the discrepancy law at a fixed parameter,
/// built from `B` independent replicate simulations.
#[derive(Debug, Clone)]
pub struct XiHat {
    pub theta: Param,
    pub bandwidth: f64,
    pub kernel: Kernel,
    /// The `B` simulated discrepancies used as kernel centers.
    pub centers: Vec<f64>,
}

impl XiHat {
    pub fn replicates(&self) -> usize {
        self.centers.len()
    }

    /// Estimated density of the discrepancy at `eps`.
    pub fn density(&self, eps: f64) -> f64 {
        let sum: f64 = self
            .centers
            .iter()
            .map(|&c| self.kernel.density(self.bandwidth, eps - c))
            .sum();
        sum / self.centers.len() as f64
    }
}

/// Build the replicate-based discrepancy density estimate at `theta`.
pub fn xi_hat(
    model: &dyn Model,
    theta: &Param,
    obs: &Observation,
    replicates: u64,
    bandwidth: f64,
    kernel: Kernel,
    rng: &mut RngStream,
) -> Result<XiHat, SamplerError> {
    if replicates == 0 {
        return Err(SamplerError::NoReplicates);
    }
    if bandwidth <= 0.0 || !bandwidth.is_finite() {
        return Err(SamplerError::InvalidBandwidth(bandwidth));
    }
    let centers = (0..replicates)
        .map(|_| {
            let data = model.simulate(rng, theta);
            let sim = model.summary(&data);
            model
                .discrepancy(&sim, &obs.summary)
                .expect("model discrepancy on its own summaries")
                .as_f64()
        })
        .collect();
    Ok(XiHat {
        theta: theta.clone(),
        bandwidth,
        kernel,
        centers,
    })
}

/// Accounting for the pilot-estimated envelope constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotBoundReport {
    /// Envelope constant: the largest density estimate seen in the pilot.
    pub c: f64,
    pub fresh_evaluations: u64,
    /// Fresh density estimates that exceeded the envelope.
    pub violations: u64,
    pub violation_rate: f64,
    /// The pilot-phase density estimates `c` was taken over.
    pub pilot_values: Vec<f64>,
}

/// Rejection sampler with a pilot-estimated envelope.
///
/// The pilot phase draws `(theta, eps)` pairs from the priors, estimates
/// the discrepancy density at each with a fresh replicate KDE, and takes
/// the maximum as the envelope constant. The fresh phase then runs
/// accept/reject against that constant. Because the pilot maximum is a
/// sample statistic and not a bound, fresh estimates can exceed it; every
/// such exceedance is counted as a violation.
#[allow(clippy::too_many_arguments)]
pub fn pilot_bound_rejection(
    model: &dyn Model,
    eprior: &ErrorPrior,
    obs: &Observation,
    pilot: u64,
    fresh: u64,
    replicates: u64,
    bandwidth: f64,
    kernel: Kernel,
    rng: &RngStream,
) -> Result<(AbcRun, PilotBoundReport), SamplerError> {
    pilot_bound_rejection_with_workers(
        model,
        eprior,
        obs,
        pilot,
        fresh,
        replicates,
        bandwidth,
        kernel,
        rng,
        worker_count(),
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn pilot_bound_rejection_with_workers(
    model: &dyn Model,
    eprior: &ErrorPrior,
    obs: &Observation,
    pilot: u64,
    fresh: u64,
    replicates: u64,
    bandwidth: f64,
    kernel: Kernel,
    rng: &RngStream,
    workers: usize,
) -> Result<(AbcRun, PilotBoundReport), SamplerError> {
    if pilot == 0 || fresh == 0 {
        return Err(SamplerError::EmptyPhase);
    }
    if replicates == 0 {
        return Err(SamplerError::NoReplicates);
    }
    if bandwidth <= 0.0 || !bandwidth.is_finite() {
        return Err(SamplerError::InvalidBandwidth(bandwidth));
    }
    if !eprior.is_proper() {
        return Err(SamplerError::Prior(PriorError::ImproperPrior));
    }

    let evaluate = |task: u64, i: u64| -> (Param, ErrorValue, f64) {
        let mut draw_rng = rng.substream(task, i);
        let theta = model.prior_sample(&mut draw_rng);
        let eps = eprior.sample(&mut draw_rng).expect("proper prior");
        let estimate = xi_hat(
            model,
            &theta,
            obs,
            replicates,
            bandwidth,
            kernel,
            &mut draw_rng,
        )
        .expect("validated arguments");
        let value = estimate.density(eps.as_f64());
        (theta, eps, value)
    };

    let pilot_values: Vec<f64> = (0..pilot).map(|i| evaluate(TASK_PILOT, i).2).collect();
    let c = pilot_values.iter().cloned().fold(f64::MIN, f64::max);

    struct FreshChunk {
        accum: ChunkAccum,
        violations: u64,
    }
    let chunks = run_chunked(fresh, workers, |_, range| {
        let mut out = FreshChunk {
            accum: ChunkAccum {
                accepted: Vec::new(),
                acceptances: 0,
            },
            violations: 0,
        };
        for i in range {
            let (theta, eps, value) = evaluate(TASK_FRESH, i);
            if value > c {
                out.violations += 1;
            }
            // Accept with probability min(value / c, 1).
            let mut u_rng = rng.substream(TASK_FRESH, i).substream(0xACCE, 0);
            if u_rng.next_f64() * c <= value {
                out.accum.acceptances += 1;
                out.accum.accepted.push(AcceptedDraw {
                    param: theta,
                    error: eps,
                    weight: 1.0,
                });
            }
        }
        out
    });

    let mut violations = 0;
    let mut merged = Vec::new();
    for chunk in chunks {
        violations += chunk.violations;
        merged.push(chunk.accum);
    }
    let run = merge_chunks(merged, fresh, rng.root_seed());
    let report = PilotBoundReport {
        c,
        fresh_evaluations: fresh,
        violations,
        violation_rate: violations as f64 / fresh as f64,
        pilot_values,
    };
    Ok((run, report))
}
