//! Seed-pinned experiment runner.
//!
//! Experiments are described by flat `key = value` config files ('#'
//! starts a comment) so that any language can parse them, and emit a
//! `results.csv` plus a `manifest.txt` echoing every resolved setting.
//! Floats are printed with 17 significant digits, which round-trips f64
//! exactly; rerunning a config reproduces the CSV byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use crate::builtin::{
    poisson_error_posterior, poisson_evidence, LocationModel, PoissonExpModel,
};
use crate::criticism::{evidence_exact_match, posterior_predictive_pvalue, pvalue_tail, MonotoneMap, reparam_demo};
use crate::error_prior::{ErrorPrior, DEFAULT_TRUNCATION};
use crate::model::{Observation, Param};
use crate::rng::RngStream;
use crate::samplers::{abc_mu_reject, pilot_bound_rejection, Kernel, DEFAULT_BANDWIDTH};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl ExperimentError {
    fn config(line: impl Into<Option<usize>>, message: impl Into<String>) -> Self {
        ExperimentError::Config {
            line: line.into(),
            message: message.into(),
        }
    }

    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config { .. } => 2,
            ExperimentError::Io(_) | ExperimentError::Runtime(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Figure1,
    EvidenceTable,
    AbcmuPosterior,
    PilotBound,
    ReparamDemo,
    PredictiveCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Figure1,
        ExperimentKind::EvidenceTable,
        ExperimentKind::AbcmuPosterior,
        ExperimentKind::PilotBound,
        ExperimentKind::ReparamDemo,
        ExperimentKind::PredictiveCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Figure1 => "figure1",
            ExperimentKind::EvidenceTable => "evidence-table",
            ExperimentKind::AbcmuPosterior => "abcmu-posterior",
            ExperimentKind::PilotBound => "pilot-bound",
            ExperimentKind::ReparamDemo => "reparam-demo",
            ExperimentKind::PredictiveCheck => "predictive-check",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// One-line description for `abc-critic list`.
    pub fn describe(&self) -> &'static str {
        match self {
            ExperimentKind::Figure1 => {
                "analytic evidence vs tail-area p-value over a range of observed counts"
            }
            ExperimentKind::EvidenceTable => {
                "exact-match evidence estimates against the closed form, with pass flags"
            }
            ExperimentKind::AbcmuPosterior => {
                "error-augmented rejection run compared bin by bin to the analytic error posterior"
            }
            ExperimentKind::PilotBound => {
                "per-seed envelope violations of the pilot-estimated rejection bound"
            }
            ExperimentKind::ReparamDemo => {
                "coordinate-change sensitivity of the error target (double vs single Jacobian)"
            }
            ExperimentKind::PredictiveCheck => {
                "two-sided posterior-predictive tail probability of an observed count"
            }
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: String,
    pub x0: u64,
    pub x0_eval: u64,
    pub x0_lo: u64,
    pub x0_hi: u64,
    pub proposals: u64,
    pub replicates: u64,
    pub bandwidth: f64,
    pub truncation: i64,
    pub kernel: Kernel,
    pub trials: u64,
    pub tau: f64,
    pub prior_mean: f64,
    pub pilot: u64,
    pub fresh: u64,
    pub seeds: u64,
    pub eps_hi: i64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or_else(|| {
                ExperimentError::config(line, format!("expected `key = value`, got `{stripped}`"))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if entries.insert(key.clone(), (line, value)).is_some() {
                return Err(ExperimentError::config(
                    line,
                    format!("duplicate key `{key}`"),
                ));
            }
        }
        Ok(RawConfig { entries })
    }

    fn take_raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn take<T: std::str::FromStr>(
        &mut self,
        key: &str,
        default: T,
    ) -> Result<(T, Option<usize>), ExperimentError> {
        match self.take_raw(key) {
            None => Ok((default, None)),
            Some((line, value)) => value.parse::<T>().map(|v| (v, Some(line))).map_err(|_| {
                ExperimentError::config(line, format!("cannot parse `{value}` for key `{key}`"))
            }),
        }
    }

    fn finish(self) -> Result<(), ExperimentError> {
        if let Some((key, (line, _))) = self.entries.into_iter().next() {
            return Err(ExperimentError::config(line, format!("unknown key `{key}`")));
        }
        Ok(())
    }
}

/// Parse and validate a config file's contents.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ExperimentError> {
    let mut raw = RawConfig::parse(text)?;

    let (line, experiment_name) = raw
        .take_raw("experiment")
        .ok_or_else(|| ExperimentError::config(None, "missing required key `experiment`"))?;
    let experiment = ExperimentKind::parse(&experiment_name).ok_or_else(|| {
        ExperimentError::config(
            line,
            format!(
                "unknown experiment `{experiment_name}` (expected one of: {})",
                ExperimentKind::ALL.map(|k| k.name()).join(", ")
            ),
        )
    })?;

    let (seed_line, seed_value) = raw
        .take_raw("seed")
        .ok_or_else(|| ExperimentError::config(None, "missing required key `seed`"))?;
    let seed = seed_value.parse::<u64>().map_err(|_| {
        ExperimentError::config(seed_line, format!("cannot parse `{seed_value}` for key `seed`"))
    })?;

    let (model, _) = raw.take("model", "poisson-exp".to_string())?;
    let (x0, _) = raw.take("x0", 2u64)?;
    let (x0_eval, _) = raw.take("x0_eval", x0)?;
    let default_range = match experiment {
        ExperimentKind::EvidenceTable => (0u64, 6u64),
        _ => (0u64, 20u64),
    };
    let (x0_lo, _) = raw.take("x0_lo", default_range.0)?;
    let (x0_hi, hi_line) = raw.take("x0_hi", default_range.1)?;
    let (proposals, n_line) = raw.take("n", 1_000_000u64)?;
    let (replicates, b_line) = raw.take("b", 20u64)?;
    let (bandwidth, h_line) = raw.take("h", DEFAULT_BANDWIDTH)?;
    let (truncation, k_line) = raw.take("k", DEFAULT_TRUNCATION)?;
    let (kernel_name, kernel_line) = raw.take("kernel", "gaussian".to_string())?;
    let (trials, trials_line) = raw.take("trials", 5u64)?;
    let (tau, tau_line) = raw.take("tau", 1.0f64)?;
    let (prior_mean, _) = raw.take("prior_mean", 0.0f64)?;
    let (pilot, pilot_line) = raw.take("pilot", 10u64)?;
    let (fresh, fresh_line) = raw.take("fresh", 10_000u64)?;
    let (seeds, seeds_line) = raw.take("seeds", 100u64)?;
    let (eps_hi, _) = raw.take("eps_hi", 10i64)?;
    let (out, _) = raw.take("out", "abc-critic-out".to_string())?;
    raw.finish()?;

    let kernel = match kernel_name.as_str() {
        "gaussian" => Kernel::Gaussian,
        "epanechnikov" => Kernel::Epanechnikov,
        other => {
            return Err(ExperimentError::config(
                kernel_line,
                format!("unknown kernel `{other}`"),
            ))
        }
    };

    if x0_lo > x0_hi {
        return Err(ExperimentError::config(
            hi_line,
            format!("x0_lo {x0_lo} exceeds x0_hi {x0_hi}"),
        ));
    }
    if proposals == 0 {
        return Err(ExperimentError::config(n_line, "n must be at least 1"));
    }
    if replicates == 0 {
        return Err(ExperimentError::config(b_line, "b must be at least 1"));
    }
    if bandwidth <= 0.0 || !bandwidth.is_finite() {
        return Err(ExperimentError::config(h_line, "h must be positive"));
    }
    if truncation < 1 {
        return Err(ExperimentError::config(k_line, "k must be at least 1"));
    }
    if trials == 0 {
        return Err(ExperimentError::config(trials_line, "trials must be at least 1"));
    }
    if tau <= 0.0 || !tau.is_finite() {
        return Err(ExperimentError::config(tau_line, "tau must be positive"));
    }
    if pilot == 0 {
        return Err(ExperimentError::config(pilot_line, "pilot must be at least 1"));
    }
    if fresh == 0 {
        return Err(ExperimentError::config(fresh_line, "fresh must be at least 1"));
    }
    if seeds == 0 {
        return Err(ExperimentError::config(seeds_line, "seeds must be at least 1"));
    }

    let config = ExperimentConfig {
        experiment,
        model,
        x0,
        x0_eval,
        x0_lo,
        x0_hi,
        proposals,
        replicates,
        bandwidth,
        truncation,
        kernel,
        trials,
        tau,
        prior_mean,
        pilot,
        fresh,
        seeds,
        eps_hi,
        seed,
        out_dir: PathBuf::from(out),
    };
    validate_for_experiment(&config)?;
    Ok(config)
}

fn validate_for_experiment(cfg: &ExperimentConfig) -> Result<(), ExperimentError> {
    match cfg.experiment {
        ExperimentKind::Figure1 => {
            if cfg.model != "poisson-exp" {
                return Err(ExperimentError::config(
                    None,
                    format!("figure1 supports only the poisson-exp model, got `{}`", cfg.model),
                ));
            }
            if cfg.x0_hi > 40 {
                return Err(ExperimentError::config(
                    None,
                    format!("figure1 x0 range must stay within 0..=40, got hi {}", cfg.x0_hi),
                ));
            }
            if cfg.truncation <= cfg.x0_hi as i64 {
                return Err(ExperimentError::config(
                    None,
                    format!("truncation k = {} must exceed x0_hi = {}", cfg.truncation, cfg.x0_hi),
                ));
            }
        }
        ExperimentKind::EvidenceTable | ExperimentKind::PredictiveCheck => {
            if cfg.model != "poisson-exp" {
                return Err(ExperimentError::config(
                    None,
                    format!(
                        "{} supports only the poisson-exp model, got `{}`",
                        cfg.experiment.name(),
                        cfg.model
                    ),
                ));
            }
        }
        ExperimentKind::AbcmuPosterior | ExperimentKind::PilotBound => {
            if cfg.model != "poisson-exp" {
                return Err(ExperimentError::config(
                    None,
                    format!(
                        "{} supports only the poisson-exp model, got `{}`",
                        cfg.experiment.name(),
                        cfg.model
                    ),
                ));
            }
            if cfg.truncation <= cfg.x0 as i64 {
                return Err(ExperimentError::config(
                    None,
                    format!("truncation k = {} must exceed x0 = {}", cfg.truncation, cfg.x0),
                ));
            }
        }
        ExperimentKind::ReparamDemo => {
            if cfg.model != "location" && cfg.model != "poisson-exp" {
                return Err(ExperimentError::config(
                    None,
                    format!("reparam-demo runs on the location model, got `{}`", cfg.model),
                ));
            }
        }
    }
    Ok(())
}

/// Load a config file, e.g. for CLI flag overrides before running.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ExperimentError::config(None, format!("cannot read `{}`: {e}", path.display()))
    })?;
    parse_config(&text)
}

/// Format a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

struct Artifact {
    csv: String,
    extras: Vec<(String, String)>,
}

/// Rows of the observed-count sweep: exact evidence, tail-area p-value
/// and its truncation annotation, plus base-2 logs of both for plotting.
pub fn run_figure1(cfg: &ExperimentConfig) -> Result<PathBuf, ExperimentError> {
    if cfg.experiment != ExperimentKind::Figure1 {
        return Err(ExperimentError::config(
            None,
            format!("expected a figure1 config, got `{}`", cfg.experiment.name()),
        ));
    }
    run(cfg)
}

/// Parse and run the experiment named by a config file; returns the
/// artifact directory.
pub fn run_experiment(config_path: &Path) -> Result<PathBuf, ExperimentError> {
    let cfg = load_config(config_path)?;
    run(&cfg)
}

/// Run a resolved config: dispatch, then write `results.csv` and
/// `manifest.txt` into the output directory. Outputs are built in memory
/// first, so a failing run leaves no partial files behind.
pub fn run(cfg: &ExperimentConfig) -> Result<PathBuf, ExperimentError> {
    let started = Instant::now();
    let artifact = match cfg.experiment {
        ExperimentKind::Figure1 => figure1(cfg)?,
        ExperimentKind::EvidenceTable => evidence_table(cfg)?,
        ExperimentKind::AbcmuPosterior => abcmu_posterior(cfg)?,
        ExperimentKind::PilotBound => pilot_bound(cfg)?,
        ExperimentKind::ReparamDemo => reparam(cfg)?,
        ExperimentKind::PredictiveCheck => predictive_check(cfg)?,
    };

    std::fs::create_dir_all(&cfg.out_dir)?;
    let csv_path = cfg.out_dir.join("results.csv");
    std::fs::write(&csv_path, artifact.csv.as_bytes())?;
    let manifest = render_manifest(cfg, &artifact.extras, started);
    if let Err(e) = std::fs::write(cfg.out_dir.join("manifest.txt"), manifest.as_bytes()) {
        // Do not leave a results file without its manifest.
        let _ = std::fs::remove_file(&csv_path);
        return Err(e.into());
    }
    Ok(cfg.out_dir.clone())
}

fn render_manifest(cfg: &ExperimentConfig, extras: &[(String, String)], started: Instant) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "tool = abc-critic");
    let _ = writeln!(m, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "experiment = {}", cfg.experiment.name());
    let _ = writeln!(m, "model = {}", cfg.model);
    let _ = writeln!(m, "x0 = {}", cfg.x0);
    let _ = writeln!(m, "x0_eval = {}", cfg.x0_eval);
    let _ = writeln!(m, "x0_lo = {}", cfg.x0_lo);
    let _ = writeln!(m, "x0_hi = {}", cfg.x0_hi);
    let _ = writeln!(m, "n = {}", cfg.proposals);
    let _ = writeln!(m, "b = {}", cfg.replicates);
    let _ = writeln!(m, "h = {}", fmt_float(cfg.bandwidth));
    let _ = writeln!(m, "k = {}", cfg.truncation);
    let _ = writeln!(
        m,
        "kernel = {}",
        match cfg.kernel {
            Kernel::Gaussian => "gaussian",
            Kernel::Epanechnikov => "epanechnikov",
        }
    );
    let _ = writeln!(m, "trials = {}", cfg.trials);
    let _ = writeln!(m, "tau = {}", fmt_float(cfg.tau));
    let _ = writeln!(m, "prior_mean = {}", fmt_float(cfg.prior_mean));
    let _ = writeln!(m, "pilot = {}", cfg.pilot);
    let _ = writeln!(m, "fresh = {}", cfg.fresh);
    let _ = writeln!(m, "seeds = {}", cfg.seeds);
    let _ = writeln!(m, "eps_hi = {}", cfg.eps_hi);
    let _ = writeln!(m, "seed = {}", cfg.seed);
    let _ = writeln!(m, "out = {}", cfg.out_dir.display());
    for (key, value) in extras {
        let _ = writeln!(m, "{key} = {value}");
    }
    let wall = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let _ = writeln!(m, "runtime_ms = {}", started.elapsed().as_millis());
    let _ = writeln!(m, "wall_clock_unix = {wall}");
    m
}

fn figure1(cfg: &ExperimentConfig) -> Result<Artifact, ExperimentError> {
    let mut csv = String::from("x0,evidence,pvalue,pvalue_tail_bound,log2_evidence,log2_pvalue\n");
    for x0 in cfg.x0_lo..=cfg.x0_hi {
        let evidence = poisson_evidence(x0);
        let post = poisson_error_posterior(x0, cfg.truncation)
            .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
        let pvalue = pvalue_tail(&post).map_err(|e| ExperimentError::Runtime(e.to_string()))?;
        // log2 of 2^-(x0+1) is -(x0+1) by construction.
        let log2_evidence = -((x0 + 1) as f64);
        let _ = writeln!(
            csv,
            "{x0},{},{},{},{},{}",
            fmt_float(evidence),
            fmt_float(pvalue),
            fmt_float(post.tail_bound()),
            fmt_float(log2_evidence),
            fmt_float(pvalue.log2()),
        );
    }
    Ok(Artifact {
        csv,
        extras: Vec::new(),
    })
}

fn evidence_table(cfg: &ExperimentConfig) -> Result<Artifact, ExperimentError> {
    let model = PoissonExpModel;
    let root = RngStream::from_seed(cfg.seed);
    let mut csv =
        String::from("x0,exact_evidence,estimate,std_error,abs_error,three_se,status\n");
    let mut all_pass = true;
    for x0 in cfg.x0_lo..=cfg.x0_hi {
        let obs = Observation::from_data(&model, vec![x0 as f64]);
        // A distinct substream per row keeps rows independent.
        let rng = root.substream(0x0E51, x0);
        let est = evidence_exact_match(&model, &obs, cfg.proposals, &rng)
            .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
        let exact = poisson_evidence(x0);
        let abs_error = (est.value - exact).abs();
        let three_se = 3.0 * est.std_error;
        let pass = abs_error <= three_se;
        all_pass &= pass;
        let _ = writeln!(
            csv,
            "{x0},{},{},{},{},{},{}",
            fmt_float(exact),
            fmt_float(est.value),
            fmt_float(est.std_error),
            fmt_float(abs_error),
            fmt_float(three_se),
            if pass { "PASS" } else { "FAIL" },
        );
    }
    Ok(Artifact {
        csv,
        extras: vec![("all_pass".into(), all_pass.to_string())],
    })
}

fn abcmu_posterior(cfg: &ExperimentConfig) -> Result<Artifact, ExperimentError> {
    let model = PoissonExpModel;
    let obs = Observation::from_data(&model, vec![cfg.x0 as f64]);
    let prior = ErrorPrior::cauchy_integer(cfg.truncation)
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let rng = RngStream::from_seed(cfg.seed);
    let run = abc_mu_reject(&model, &prior, &obs, cfg.proposals, &rng)
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let marginal = run
        .eps_marginal_lattice()
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let analytic = poisson_error_posterior(cfg.x0, cfg.truncation)
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    if run.acceptances == 0 {
        return Err(ExperimentError::Runtime(
            "no proposals were accepted; increase n".into(),
        ));
    }
    let accepted = run.acceptances as f64;
    let mut csv =
        String::from("eps,analytic_pmf,empirical_freq,std_error,abs_error,three_se,status\n");
    for eps in -(cfg.x0 as i64)..=cfg.eps_hi {
        let expected = analytic.pmf(eps);
        let freq = marginal.get(&eps).copied().unwrap_or(0.0);
        let se = (expected * (1.0 - expected) / accepted).sqrt();
        let abs_error = (freq - expected).abs();
        let three_se = 3.0 * se;
        let _ = writeln!(
            csv,
            "{eps},{},{},{},{},{},{}",
            fmt_float(expected),
            fmt_float(freq),
            fmt_float(se),
            fmt_float(abs_error),
            fmt_float(three_se),
            if abs_error <= three_se { "PASS" } else { "FAIL" },
        );
    }
    Ok(Artifact {
        csv,
        extras: vec![
            ("acceptances".into(), run.acceptances.to_string()),
            ("acceptance_rate".into(), fmt_float(run.acceptance_rate())),
        ],
    })
}

fn pilot_bound(cfg: &ExperimentConfig) -> Result<Artifact, ExperimentError> {
    let model = PoissonExpModel;
    let obs = Observation::from_data(&model, vec![cfg.x0 as f64]);
    let prior = ErrorPrior::cauchy_integer(cfg.truncation)
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let mut csv =
        String::from("seed_index,seed,c_bound,fresh_evaluations,violations,violation_rate\n");
    let mut seeds_with_violation = 0u64;
    for index in 0..cfg.seeds {
        let seed = cfg.seed.wrapping_add(index);
        let rng = RngStream::from_seed(seed);
        let (_, report) = pilot_bound_rejection(
            &model,
            &prior,
            &obs,
            cfg.pilot,
            cfg.fresh,
            cfg.replicates,
            cfg.bandwidth,
            cfg.kernel,
            &rng,
        )
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
        if report.violations > 0 {
            seeds_with_violation += 1;
        }
        let _ = writeln!(
            csv,
            "{index},{seed},{},{},{},{}",
            fmt_float(report.c),
            report.fresh_evaluations,
            report.violations,
            fmt_float(report.violation_rate),
        );
    }
    let fraction = seeds_with_violation as f64 / cfg.seeds as f64;
    Ok(Artifact {
        csv,
        extras: vec![
            (
                "seeds_with_violation".into(),
                seeds_with_violation.to_string(),
            ),
            ("fraction_seeds_with_violation".into(), fmt_float(fraction)),
        ],
    })
}

fn reparam(cfg: &ExperimentConfig) -> Result<Artifact, ExperimentError> {
    let model = LocationModel::gaussian(cfg.prior_mean, cfg.tau)
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let prior = ErrorPrior::gaussian_real(0.0, 1.0)
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let x0 = cfg.x0 as f64;
    let mut csv = String::from("transform,tv_vs_pushforward,affine_reference_tv\n");
    for (name, map) in [
        ("identity", MonotoneMap::identity()),
        ("affine_2x_plus_1", MonotoneMap::affine(2.0, 1.0)),
        ("cubic_plus_linear", MonotoneMap::cubic()),
    ] {
        let (tv, affine_ref) = reparam_demo(&model, &prior, &map, x0)
            .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
        let _ = writeln!(csv, "{name},{},{}", fmt_float(tv), fmt_float(affine_ref));
    }
    Ok(Artifact {
        csv,
        extras: Vec::new(),
    })
}

fn predictive_check(cfg: &ExperimentConfig) -> Result<Artifact, ExperimentError> {
    let model = PoissonExpModel;
    let obs = Observation::from_data(&model, vec![cfg.x0 as f64]);
    let root = RngStream::from_seed(cfg.seed);
    let posterior = crate::samplers::abc_reject(&model, &obs, 0.0, cfg.proposals, &root)
        .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let thetas: Vec<Param> = posterior.accepted.into_iter().map(|d| d.param).collect();
    if thetas.is_empty() {
        return Err(ExperimentError::Runtime(
            "posterior sample is empty; increase n or lower x0".into(),
        ));
    }
    let eval_obs = Observation::from_data(&model, vec![cfg.x0_eval as f64]);
    let pvalue = posterior_predictive_pvalue(
        &model,
        &thetas,
        &eval_obs,
        &root.substream(0xEA71, 0),
    )
    .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let mut csv = String::from("x0,x0_eval,n_posterior_draws,predictive_pvalue\n");
    let _ = writeln!(
        csv,
        "{},{},{},{}",
        cfg.x0,
        cfg.x0_eval,
        thetas.len(),
        fmt_float(pvalue)
    );
    Ok(Artifact {
        csv,
        extras: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(extra: &str) -> String {
        format!("experiment = figure1\nseed = 42\n{extra}")
    }

    #[test]
    fn parses_comments_defaults_and_overrides() {
        let text = "\
# full-line comment
experiment = figure1   # trailing comment
seed = 7
x0_hi = 12
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Figure1);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.x0_lo, 0);
        assert_eq!(cfg.x0_hi, 12);
        assert_eq!(cfg.truncation, 200);
        assert_eq!(cfg.bandwidth, 0.5);
        assert_eq!(cfg.out_dir, PathBuf::from("abc-critic-out"));
    }

    #[test]
    fn unknown_key_is_line_anchored() {
        let err = parse_config(&base_config("bogus = 1\n")).unwrap_err();
        match err {
            ExperimentError::Config { line, message } => {
                assert_eq!(line, Some(3));
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_value_is_line_anchored() {
        let err = parse_config("experiment = figure1\nseed = not-a-number\n").unwrap_err();
        match err {
            ExperimentError::Config { line, .. } => assert_eq!(line, Some(2)),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            parse_config("experiment = figure1\nseed = not-a-number\n")
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn seed_is_required() {
        let err = parse_config("experiment = figure1\n").unwrap_err();
        match err {
            ExperimentError::Config { line, message } => {
                assert_eq!(line, None);
                assert!(message.contains("seed"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_is_rejected() {
        let err = parse_config("experiment figure1\n").unwrap_err();
        match err {
            ExperimentError::Config { line, .. } => assert_eq!(line, Some(1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn figure1_range_is_validated() {
        let err = parse_config(&base_config("x0_hi = 41\n")).unwrap_err();
        assert!(err.to_string().contains("0..=40"), "{err}");
        let err = parse_config(&base_config("x0_lo = 9\nx0_hi = 3\n")).unwrap_err();
        assert!(err.to_string().contains("exceeds"), "{err}");
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config("experiment = figure1\nseed = 1\nseed = 2\n").unwrap_err();
        match err {
            ExperimentError::Config { line, message } => {
                assert_eq!(line, Some(3));
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn float_format_round_trips() {
        for v in [
            0.5,
            1.0 / 3.0,
            2f64.powi(-21),
            0.797_903_351_774_145_4,
            -0.001,
            1e-300,
        ] {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn figure1_rows_match_the_closed_forms() {
        let dir = std::env::temp_dir().join(format!("abc-critic-test-{}", std::process::id()));
        let cfg = ExperimentConfig {
            out_dir: dir.clone(),
            ..parse_config(&base_config("x0_hi = 6\n")).unwrap()
        };
        run(&cfg).unwrap();
        let csv = std::fs::read_to_string(dir.join("results.csv")).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "x0,evidence,pvalue,pvalue_tail_bound,log2_evidence,log2_pvalue");
        assert_eq!(rows.len(), 8);

        let parse_row = |row: &str| -> Vec<f64> {
            row.split(',').map(|f| f.parse().unwrap()).collect()
        };
        let first = parse_row(rows[1]);
        assert_eq!(first[1], 0.5);
        assert_eq!(first[2], 1.0);
        let fourth = parse_row(rows[4]);
        assert_eq!(fourth[1], 0.0625);
        // Evidence halves exactly between consecutive rows.
        let mut prev = first[1];
        for row in &rows[2..] {
            let v = parse_row(row);
            assert_eq!(v[1] / prev, 0.5);
            prev = v[1];
        }
        assert!(dir.join("manifest.txt").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rerunning_a_config_is_byte_identical() {
        let dir_a = std::env::temp_dir().join(format!("abc-critic-rerun-a-{}", std::process::id()));
        let dir_b = std::env::temp_dir().join(format!("abc-critic-rerun-b-{}", std::process::id()));
        let base = parse_config(
            "experiment = abcmu-posterior\nseed = 42\nn = 30000\nx0 = 2\n",
        )
        .unwrap();
        let cfg_a = ExperimentConfig {
            out_dir: dir_a.clone(),
            ..base.clone()
        };
        let cfg_b = ExperimentConfig {
            out_dir: dir_b.clone(),
            ..base
        };
        run(&cfg_a).unwrap();
        run(&cfg_b).unwrap();
        let a = std::fs::read(dir_a.join("results.csv")).unwrap();
        let b = std::fs::read(dir_b.join("results.csv")).unwrap();
        assert_eq!(a, b);
        std::fs::remove_dir_all(&dir_a).unwrap();
        std::fs::remove_dir_all(&dir_b).unwrap();
    }

    #[test]
    fn evidence_table_small_run_passes_its_own_gate() {
        let dir = std::env::temp_dir().join(format!("abc-critic-evidence-{}", std::process::id()));
        let cfg = ExperimentConfig {
            out_dir: dir.clone(),
            ..parse_config(
                "experiment = evidence-table\nseed = 9\nn = 120000\nx0_lo = 0\nx0_hi = 3\n",
            )
            .unwrap()
        };
        run(&cfg).unwrap();
        let csv = std::fs::read_to_string(dir.join("results.csv")).unwrap();
        for row in csv.lines().skip(1) {
            assert!(row.ends_with("PASS"), "{row}");
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn predictive_check_emits_single_row() {
        let dir = std::env::temp_dir().join(format!("abc-critic-pred-{}", std::process::id()));
        let cfg = ExperimentConfig {
            out_dir: dir.clone(),
            ..parse_config("experiment = predictive-check\nseed = 5\nn = 50000\nx0 = 1\n").unwrap()
        };
        run(&cfg).unwrap();
        let csv = std::fs::read_to_string(dir.join("results.csv")).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 2);
        let fields: Vec<&str> = rows[1].split(',').collect();
        let p: f64 = fields[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
