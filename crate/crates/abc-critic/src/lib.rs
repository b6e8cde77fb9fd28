//! Likelihood-free inference with the tolerance treated as an inferable
//! error parameter.
//!
//! The crate provides rejection and error-augmented ABC samplers, smooth
//! kernel variants, closed-form oracle models that pin every Monte Carlo
//! estimator to analytic truth, and model-criticism statistics (tail-area
//! p-values, evidence from acceptance rates, Bayes factors, predictive
//! checks). Experiments are driven by plain key=value configs and emit
//! reproducible CSV; rerunning a config yields byte-identical output no
//! matter how many worker threads are used.

pub mod builtin;
pub mod criticism;
pub mod error_prior;
pub mod experiments;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod samplers;

pub use builtin::{
    binomial_error_posterior, location_error_posterior, location_joint_density,
    poisson_error_posterior, poisson_evidence, BinomialUniformModel, LocationModel,
    PoissonExpModel, QuadratureSpec,
};
pub use criticism::{
    bayes_factor, evidence_exact_match, posterior_predictive_pvalue, prior_dominance_tv,
    pvalue_tail, reparam_demo, CriticismReport, ErrorPosterior, EvidenceEstimate, MonotoneMap,
};
pub use error_prior::{prior_sample, ErrorPrior};
pub use model::{
    error_of, simulate_summary, ErrorValue, Model, Observation, ObservationSpace, Param,
    SummaryVec,
};
pub use rng::RngStream;
pub use samplers::{
    abc_mu_reject, abc_mu_smooth, abc_reject, pilot_bound_rejection, xi_hat, AbcRun, Kernel,
    PilotBoundReport, XiHat,
};
