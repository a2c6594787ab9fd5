//! Seeded, reproducible Monte Carlo experiments over the recovery
//! estimators: single-configuration trial batches, phase-transition sweeps
//! over a measurement-rate grid, and statistical verification suites.
//!
//! Reproducibility contract: trial `i` draws every random quantity from a
//! `ChaCha12` stream seeded by a splitmix-style mix of the master seed and
//! `i`, and parallel execution collects results in trial order — the same
//! configuration and seed therefore produce byte-identical CSV output
//! regardless of thread count. Sweeps reuse the same per-trial seeds at
//! every grid point (common random numbers), which sharpens crossing
//! estimates without biasing the per-point success rates.

pub mod stats;
mod verify;

pub use verify::{verify_all, verify_lemma_suite, verify_theorem8, CheckReport, VerifyReport};

use crate::bounds::family_metadata;
use crate::estimators::{
    detection_curves, distortion, nearest_subspace, normalized_scores, optimal_gaussian,
    thresholding, DetectionCurves, EstimatorError, SparsityPattern,
};
use crate::linalg::Matrix;
use crate::sampling::{
    dump_sample_set, gaussian_matrix, measure, rate_sharing_matrix, MatrixKind, NoiseMode,
    SamplingError, SamplingMatrix,
};
use crate::source::{draw_source_vector, DistributionModel, SourceError, SourceSpec};
use rand::seq::index::sample as index_sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use std::io::{BufWriter, Write as IoWrite};
use std::path::PathBuf;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Errors from experiment configuration and execution.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// A config line failed to parse.
    #[error("config line {line}: {reason}")]
    Parse { line: usize, reason: String },
    /// The assembled configuration violates an invariant.
    #[error("invalid config: {reason}")]
    Invalid { reason: String },
    /// An estimator failed inside a trial (budget overruns included).
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: EstimatorError,
    },
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which estimator a trial runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorChoice {
    /// Exhaustive least-squares subset selection.
    Ns,
    /// Top-k selection by correlation magnitude.
    Th,
    /// Posterior-score subset selection with Gaussian prior weight `γ`.
    Opt { gamma: f64 },
}

impl fmt::Display for EstimatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorChoice::Ns => write!(f, "ns"),
            EstimatorChoice::Th => write!(f, "th"),
            EstimatorChoice::Opt { gamma } => write!(f, "opt({gamma:e})"),
        }
    }
}

/// Which measurement-matrix ensemble a trial uses.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixChoice {
    /// Entries i.i.d. `N(0, 1/n)`.
    IidGaussian,
    /// Block-diagonal pair of i.i.d. blocks over a random column split:
    /// a fraction `λ` of columns sampled at rate `ρ₁`, the rest at `ρ₂`.
    /// The configured `rho` rescales both block rates proportionally, so a
    /// sweep moves the whole scheme along its nominal rate
    /// `λρ₁ + (1−λ)ρ₂`.
    RateSharing { lambda: f64, rho1: f64, rho2: f64 },
}

impl fmt::Display for MatrixChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixChoice::IidGaussian => write!(f, "iid_gaussian"),
            MatrixChoice::RateSharing { lambda, rho1, rho2 } => {
                write!(f, "rate_sharing({lambda:e},{rho1:e},{rho2:e})")
            }
        }
    }
}

/// One Monte Carlo experiment: the source, the sampling scheme, the
/// estimator, the success threshold, and the trial plan.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Signal length.
    pub n: usize,
    /// Sparse-source law (sparsity rate + value distribution + optional
    /// power rescale from `snr_db`).
    pub source: SourceSpec,
    /// SNR in dB when the power was imposed that way (echoed in CSV).
    pub snr_db: Option<f64>,
    /// Measurement rate `m/n`; `0` engages the single-measurement floor
    /// `m = 1`.
    pub rho: f64,
    /// Success threshold: a trial succeeds when distortion ≤ α.
    pub alpha: f64,
    pub estimator: EstimatorChoice,
    pub matrix: MatrixChoice,
    pub trials: usize,
    /// Master seed; per-trial streams are derived, never shared.
    pub seed: u64,
    /// Overrides the selection size (defaults to the drawn support size).
    /// Only meaningful for single-block (i.i.d.) experiments.
    pub k_override: Option<usize>,
    /// Drops the additive noise (an exact-recovery test hook).
    pub noiseless: bool,
}

/// Outcome of a single trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    /// The derived per-trial seed (recorded for replay).
    pub seed: u64,
    pub distortion: f64,
    /// `distortion ≤ α`.
    pub success: bool,
    /// Wall-clock time of the estimation stage (not serialized to CSV).
    pub runtime: Duration,
    /// Threshold-detection curves of this trial's scores, when requested.
    pub diagnostics: Option<DetectionCurves>,
}

/// Batch summary: the empirical error probability with its 95% Wilson
/// interval, plus the per-trial records.
#[derive(Debug, Clone)]
pub struct TrialSummary {
    pub results: Vec<TrialResult>,
    /// Empirical `P_e` = fraction of trials with distortion > α.
    pub error_rate: f64,
    /// Wilson 95% interval on `P_e`.
    pub wilson_95: (f64, f64),
    pub mean_distortion: f64,
}

/// Optional per-trial side effects.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Writes each trial's `(seed, y, A, x, support)` to
    /// `<dir>/trial_<index>.bin`.
    pub dump_dir: Option<PathBuf>,
    /// Attaches threshold-detection curves to every trial result.
    pub collect_diagnostics: bool,
}

/// Splitmix-style expansion of the master seed: statistically independent
/// streams per trial, documented in every CSV header.
pub(crate) fn trial_seed(master: u64, trial: usize) -> u64 {
    let mut z = master.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const SEED_DERIVATION_NOTE: &str =
    "# per-trial seed: splitmix64 finalizer of (master_seed + (trial+1)*0x9E3779B97F4A7C15)";

impl ExperimentConfig {
    /// Parses the flat `key = value` config format: one pair per line,
    /// `#` comments, blank lines ignored, unknown or inapplicable keys are
    /// errors, duplicates are errors.
    ///
    /// Keys: `n`, `omega`, `family` (`gaussian` with `mean`/`variance`,
    /// `two_point` with `value`, `uniform_magnitude` with `lo`/`hi`,
    /// `discrete` with `atoms` as `v:p,v:p,…`), `snr_db` (alias `power_db`;
    /// at most one), `rho`, `alpha`, `estimator` (`ns`, `th`, `opt(γ)`),
    /// `matrix` (`iid_gaussian` or `rate_sharing(λ,ρ1,ρ2)`), `trials`,
    /// `seed`, `k_override`, `noiseless`.
    pub fn from_key_values(text: &str) -> Result<ExperimentConfig, HarnessError> {
        let mut entries: HashMap<String, (usize, String)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(HarnessError::Parse {
                    line,
                    reason: format!("expected key=value, got {content:?}"),
                });
            };
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if value.is_empty() {
                return Err(HarnessError::Parse {
                    line,
                    reason: format!("empty value for key {key:?}"),
                });
            }
            if let Some((first_line, _)) = entries.insert(key.clone(), (line, value)) {
                return Err(HarnessError::Parse {
                    line,
                    reason: format!("duplicate key {key:?} (first set on line {first_line})"),
                });
            }
        }
        Self::from_entries(entries)
    }

    fn from_entries(
        mut entries: HashMap<String, (usize, String)>,
    ) -> Result<ExperimentConfig, HarnessError> {
        fn take(
            entries: &mut HashMap<String, (usize, String)>,
            key: &str,
        ) -> Option<(usize, String)> {
            entries.remove(key)
        }
        fn required(
            entries: &mut HashMap<String, (usize, String)>,
            key: &str,
        ) -> Result<(usize, String), HarnessError> {
            take(entries, key).ok_or_else(|| HarnessError::Invalid {
                reason: format!("missing required key {key:?}"),
            })
        }
        fn parse_f64((line, value): (usize, String), key: &str) -> Result<f64, HarnessError> {
            value.parse::<f64>().map_err(|e| HarnessError::Parse {
                line,
                reason: format!("key {key:?}: {e}"),
            })
        }
        fn parse_usize((line, value): (usize, String), key: &str) -> Result<usize, HarnessError> {
            value.parse::<usize>().map_err(|e| HarnessError::Parse {
                line,
                reason: format!("key {key:?}: {e}"),
            })
        }

        let n = parse_usize(required(&mut entries, "n")?, "n")?;
        let omega = parse_f64(required(&mut entries, "omega")?, "omega")?;

        let (family_line, family) = required(&mut entries, "family")?;
        let model = match family.as_str() {
            "gaussian" => {
                let mean = match take(&mut entries, "mean") {
                    Some(e) => parse_f64(e, "mean")?,
                    None => 0.0,
                };
                let variance = parse_f64(required(&mut entries, "variance")?, "variance")?;
                DistributionModel::gaussian(mean, variance)
            }
            "two_point" => {
                let value = parse_f64(required(&mut entries, "value")?, "value")?;
                DistributionModel::two_point(value)
            }
            "uniform_magnitude" => {
                let lo = parse_f64(required(&mut entries, "lo")?, "lo")?;
                let hi = parse_f64(required(&mut entries, "hi")?, "hi")?;
                DistributionModel::uniform_magnitude(lo, hi)
            }
            "discrete" => {
                let (atoms_line, atoms_text) = required(&mut entries, "atoms")?;
                let mut atoms = Vec::new();
                for piece in atoms_text.split(',') {
                    let Some((v, p)) = piece.split_once(':') else {
                        return Err(HarnessError::Parse {
                            line: atoms_line,
                            reason: format!("atom {piece:?} is not value:probability"),
                        });
                    };
                    let parse = |s: &str| {
                        s.trim().parse::<f64>().map_err(|e| HarnessError::Parse {
                            line: atoms_line,
                            reason: format!("atom {piece:?}: {e}"),
                        })
                    };
                    atoms.push((parse(v)?, parse(p)?));
                }
                DistributionModel::discrete(atoms)
            }
            other => {
                return Err(HarnessError::Parse {
                    line: family_line,
                    reason: format!(
                        "unknown family {other:?} (expected gaussian, two_point, uniform_magnitude, or discrete)"
                    ),
                })
            }
        }
        .map_err(HarnessError::Source)?;

        let mut source = SourceSpec::new(omega, model).map_err(HarnessError::Source)?;
        let snr_entry = take(&mut entries, "snr_db");
        let power_entry = take(&mut entries, "power_db");
        if snr_entry.is_some() && power_entry.is_some() {
            return Err(HarnessError::Invalid {
                reason: "snr_db and power_db are aliases; set at most one".into(),
            });
        }
        let snr_db = match snr_entry.or(power_entry) {
            Some(e) => {
                let db = parse_f64(e, "snr_db")?;
                source = source
                    .with_power_target(10f64.powf(db / 10.0))
                    .map_err(HarnessError::Source)?;
                Some(db)
            }
            None => None,
        };

        let matrix = match take(&mut entries, "matrix") {
            None => MatrixChoice::IidGaussian,
            Some((line, value)) => parse_matrix(&value).map_err(|reason| HarnessError::Parse {
                line,
                reason,
            })?,
        };

        let rho = match take(&mut entries, "rho") {
            Some(e) => parse_f64(e, "rho")?,
            None => match &matrix {
                MatrixChoice::RateSharing { lambda, rho1, rho2 } => {
                    lambda * rho1 + (1.0 - lambda) * rho2
                }
                MatrixChoice::IidGaussian => {
                    return Err(HarnessError::Invalid {
                        reason: "missing required key \"rho\"".into(),
                    })
                }
            },
        };

        let (est_line, est_text) = required(&mut entries, "estimator")?;
        let estimator = parse_estimator(&est_text).map_err(|reason| HarnessError::Parse {
            line: est_line,
            reason,
        })?;

        let alpha = parse_f64(required(&mut entries, "alpha")?, "alpha")?;
        let trials = parse_usize(required(&mut entries, "trials")?, "trials")?;
        let (seed_line, seed_text) = required(&mut entries, "seed")?;
        let seed = seed_text.parse::<u64>().map_err(|e| HarnessError::Parse {
            line: seed_line,
            reason: format!("key \"seed\": {e}"),
        })?;
        let k_override = match take(&mut entries, "k_override") {
            Some(e) => Some(parse_usize(e, "k_override")?),
            None => None,
        };
        let noiseless = match take(&mut entries, "noiseless") {
            None => false,
            Some((line, value)) => match value.as_str() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(HarnessError::Parse {
                        line,
                        reason: format!("key \"noiseless\": expected true or false, got {other:?}"),
                    })
                }
            },
        };

        if let Some((key, (line, _))) = entries.into_iter().min_by_key(|(_, (line, _))| *line) {
            return Err(HarnessError::Parse {
                line,
                reason: format!("unknown or inapplicable key {key:?}"),
            });
        }

        let cfg = ExperimentConfig {
            n,
            source,
            snr_db,
            rho,
            alpha,
            estimator,
            matrix,
            trials,
            seed,
            k_override,
            noiseless,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Enforces the configuration invariants shared by every entry point.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |reason: String| Err(HarnessError::Invalid { reason });
        if self.trials < 1 {
            return fail(format!("trials must be ≥ 1, got {}", self.trials));
        }
        if self.n < 1 {
            return fail("n must be ≥ 1".into());
        }
        if !(self.rho.is_finite() && self.rho >= 0.0) {
            return fail(format!("rho must be finite and ≥ 0, got {}", self.rho));
        }
        if self.rho > 0.0 && (self.n as f64) * self.rho < 1.0 {
            return fail(format!(
                "n·rho must be ≥ 1 (got {}); use rho = 0 for the single-measurement floor",
                self.n as f64 * self.rho
            ));
        }
        if !(self.alpha.is_finite() && (0.0..=1.0).contains(&self.alpha)) {
            return fail(format!("alpha must be in [0, 1], got {}", self.alpha));
        }
        if let EstimatorChoice::Opt { gamma } = self.estimator {
            if !(gamma > 0.0 && gamma < 1.0) {
                return fail(format!("opt prior weight γ must be in (0, 1), got {gamma}"));
            }
        }
        if let Some(k) = self.k_override {
            if k < 1 || k > self.n {
                return fail(format!("k_override must be in [1, n], got {k}"));
            }
        }
        if let MatrixChoice::RateSharing { lambda, rho1, rho2 } = &self.matrix {
            if !(*lambda > 0.0 && *lambda < 1.0) {
                return fail(format!("rate-sharing λ must be in (0, 1), got {lambda}"));
            }
            for (name, r) in [("ρ1", rho1), ("ρ2", rho2)] {
                if !(r.is_finite() && *r >= 0.0) {
                    return fail(format!("rate-sharing {name} must be finite and ≥ 0, got {r}"));
                }
            }
            if lambda * rho1 + (1.0 - lambda) * rho2 <= 0.0 {
                return fail("rate-sharing needs a positive nominal rate".into());
            }
            if self.rho == 0.0 {
                return fail("rho = 0 is not defined for rate-sharing matrices".into());
            }
            if self.k_override.is_some() {
                return fail("k_override applies only to iid_gaussian experiments".into());
            }
        }
        Ok(())
    }

    /// Single-line canonical echo of the configuration, used in CSV headers.
    pub fn canonical_echo(&self) -> String {
        format!(
            "n={} omega={:e} family={} snr_db={} rho={:e} alpha={:e} estimator={} matrix={} trials={} seed={} k_override={} noiseless={}",
            self.n,
            self.source.omega(),
            family_metadata(&self.source),
            self.snr_db
                .map_or_else(|| "none".to_string(), |v| format!("{v:e}")),
            self.rho,
            self.alpha,
            self.estimator,
            self.matrix,
            self.trials,
            self.seed,
            self.k_override
                .map_or_else(|| "none".to_string(), |k| k.to_string()),
            self.noiseless,
        )
    }

    /// Rows of the single-block measurement matrix (`m = 1` floor at ρ = 0).
    fn iid_rows(&self) -> usize {
        ((self.rho * self.n as f64).round() as usize).max(1)
    }

    /// The factor applied to both rate-sharing block rates so that the
    /// scheme's nominal rate equals the configured `rho`.
    fn rate_share_scale(&self) -> f64 {
        match &self.matrix {
            MatrixChoice::IidGaussian => 1.0,
            MatrixChoice::RateSharing { lambda, rho1, rho2 } => {
                self.rho / (lambda * rho1 + (1.0 - lambda) * rho2)
            }
        }
    }

    fn noise_mode(&self) -> NoiseMode {
        if self.noiseless {
            NoiseMode::Noiseless
        } else {
            NoiseMode::Standard
        }
    }
}

fn parse_estimator(text: &str) -> Result<EstimatorChoice, String> {
    match text {
        "ns" => Ok(EstimatorChoice::Ns),
        "th" => Ok(EstimatorChoice::Th),
        _ => {
            if let Some(inner) = text.strip_prefix("opt(").and_then(|s| s.strip_suffix(')')) {
                let gamma = inner
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| format!("estimator {text:?}: {e}"))?;
                Ok(EstimatorChoice::Opt { gamma })
            } else {
                Err(format!(
                    "unknown estimator {text:?} (expected ns, th, or opt(gamma))"
                ))
            }
        }
    }
}

fn parse_matrix(text: &str) -> Result<MatrixChoice, String> {
    if text == "iid_gaussian" {
        return Ok(MatrixChoice::IidGaussian);
    }
    if let Some(inner) = text
        .strip_prefix("rate_sharing(")
        .and_then(|s| s.strip_suffix(')'))
    {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err(format!(
                "matrix {text:?}: rate_sharing needs exactly (lambda,rho1,rho2)"
            ));
        }
        let mut vals = [0.0f64; 3];
        for (slot, part) in vals.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("matrix {text:?}: {e}"))?;
        }
        return Ok(MatrixChoice::RateSharing {
            lambda: vals[0],
            rho1: vals[1],
            rho2: vals[2],
        });
    }
    Err(format!(
        "unknown matrix {text:?} (expected iid_gaussian or rate_sharing(lambda,rho1,rho2))"
    ))
}

/// Runs the configured trial batch with default options.
///
/// Deterministic given the config (including its seed): see the module-level
/// reproducibility contract. The first failing trial aborts the batch, with
/// its index attached to the error.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<TrialSummary, HarnessError> {
    run_trials_with(cfg, &RunOptions::default())
}

/// [`run_trials`] with per-trial side effects (sample dumps, detection
/// diagnostics).
///
/// Thresholding trials on unstructured ensembles without side effects run
/// through an exact streaming scorer that never materializes the `m × n`
/// matrix (the off-support correlations are drawn from their conditional law
/// `N(0, ‖y‖²/n)` given the samples); the sampled ensemble is identical in
/// distribution but consumes the random stream differently, so per-trial
/// outputs are comparable across option sets only statistically, not
/// bit-for-bit.
pub fn run_trials_with(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
) -> Result<TrialSummary, HarnessError> {
    cfg.validate()?;
    if let Some(dir) = &opts.dump_dir {
        std::fs::create_dir_all(dir)?;
    }
    let fast = matches!(cfg.estimator, EstimatorChoice::Th)
        && opts.dump_dir.is_none()
        && !opts.collect_diagnostics;
    let outcomes: Vec<Result<TrialResult, HarnessError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            if fast {
                fast_th_trial(cfg, trial)
            } else {
                full_trial(cfg, opts, trial)
            }
        })
        .collect();
    let mut results = Vec::with_capacity(cfg.trials);
    for outcome in outcomes {
        results.push(outcome?);
    }
    Ok(summarize(results))
}

fn summarize(results: Vec<TrialResult>) -> TrialSummary {
    let trials = results.len();
    let failures = results.iter().filter(|r| !r.success).count();
    let error_rate = failures as f64 / trials as f64;
    let wilson_95 = stats::wilson_interval(failures, trials);
    let mean_distortion = results.iter().map(|r| r.distortion).sum::<f64>() / trials as f64;
    TrialSummary {
        results,
        error_rate,
        wilson_95,
        mean_distortion,
    }
}

/// One trial through explicit matrix assembly (every estimator, optional
/// dumps and diagnostics).
fn full_trial(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    trial: usize,
) -> Result<TrialResult, HarnessError> {
    let seed = trial_seed(cfg.seed, trial);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let drawn = draw_source_vector(cfg.n, &cfg.source, &mut rng)?;
    let a = match &cfg.matrix {
        MatrixChoice::IidGaussian => gaussian_matrix(cfg.iid_rows(), cfg.n, &mut rng),
        MatrixChoice::RateSharing { lambda, rho1, rho2 } => {
            let scale = cfg.rate_share_scale();
            rate_sharing_matrix(*lambda, rho1 * scale, rho2 * scale, cfg.n, &mut rng)?
        }
    };
    let y = measure(&a, &drawn.x, cfg.noise_mode(), &mut rng);
    let k_sel = cfg.k_override.unwrap_or(drawn.pattern.len());
    let started = Instant::now();
    let estimate = run_estimator(cfg, &y, &a, k_sel, &mut rng)
        .map_err(|source| HarnessError::Trial { trial, source })?;
    let runtime = started.elapsed();
    let dist = distortion(&drawn.pattern, &estimate)
        .map_err(|source| HarnessError::Trial { trial, source })?;
    let diagnostics = if opts.collect_diagnostics {
        let x_norm_sq: f64 = drawn.x.iter().map(|v| v * v).sum();
        let scores = normalized_scores(&y, &a, x_norm_sq);
        Some(detection_curves(&scores, &drawn.pattern, &diagnostic_t_grid()))
    } else {
        None
    };
    if let Some(dir) = &opts.dump_dir {
        let path = dir.join(format!("trial_{trial:05}.bin"));
        let mut writer = BufWriter::new(std::fs::File::create(path)?);
        dump_sample_set(
            &mut writer,
            seed,
            &y,
            &a,
            &drawn.x,
            drawn.pattern.indices(),
        )?;
        writer.flush()?;
    }
    Ok(TrialResult {
        trial,
        seed,
        distortion: dist,
        success: dist <= cfg.alpha,
        runtime,
        diagnostics,
    })
}

fn diagnostic_t_grid() -> Vec<f64> {
    (0..=120).map(|i| 6.0 * i as f64 / 120.0).collect()
}

/// Estimator dispatch on an assembled matrix. Rate-sharing matrices are
/// estimated block by block — each block is an i.i.d. sub-problem with its
/// own selection size `round(Ω·n_block)` — and the estimates are unioned.
fn run_estimator(
    cfg: &ExperimentConfig,
    y: &[f64],
    a: &SamplingMatrix,
    k_sel: usize,
    rng: &mut ChaCha12Rng,
) -> Result<SparsityPattern, EstimatorError> {
    if let MatrixKind::RateSharing {
        block1_rows,
        block1_columns,
        ..
    } = a.kind()
    {
        let (m1, cols1) = (*block1_rows, block1_columns.clone());
        let cols2: Vec<usize> = {
            let mut mask = vec![true; a.cols()];
            for &c in &cols1 {
                mask[c] = false;
            }
            (0..a.cols()).filter(|&c| mask[c]).collect()
        };
        let omega = cfg.source.omega();
        let mut union: Vec<usize> = Vec::new();
        for (cols, rows) in [(cols1, 0..m1), (cols2, m1..a.rows())] {
            let n_block = cols.len();
            let m_block = rows.len();
            let k_block = ((omega * n_block as f64).round() as usize).clamp(1, n_block);
            if m_block == 0 {
                // No measurements for this block: all correlations vanish,
                // so top-k selection degenerates to a uniform draw.
                let chosen = index_sample(rng, n_block, k_block);
                union.extend(chosen.into_iter().map(|j| cols[j]));
                continue;
            }
            let row0 = rows.start;
            let entries = Matrix::from_fn(m_block, n_block, |i, j| {
                a.entries().get(row0 + i, cols[j])
            });
            let sub = SamplingMatrix::from_entries(entries);
            let y_block = &y[row0..rows.end];
            let est = single_block_estimator(cfg, y_block, &sub, k_block, rng)?;
            union.extend(est.indices().iter().map(|&j| cols[j]));
        }
        union.sort_unstable();
        return SparsityPattern::from_sorted(union, a.cols());
    }
    single_block_estimator(cfg, y, a, k_sel, rng)
}

fn single_block_estimator(
    cfg: &ExperimentConfig,
    y: &[f64],
    a: &SamplingMatrix,
    k: usize,
    rng: &mut ChaCha12Rng,
) -> Result<SparsityPattern, EstimatorError> {
    match cfg.estimator {
        EstimatorChoice::Ns => nearest_subspace(y, a, k, rng).map(|r| r.pattern),
        EstimatorChoice::Th => thresholding(y, a, k, rng).map(|r| r.pattern),
        EstimatorChoice::Opt { gamma } => {
            optimal_gaussian(y, a, k, gamma, cfg.alpha, rng).map(|r| r.pattern)
        }
    }
}

/// Exact streaming thresholding scorer for one i.i.d. block.
///
/// Draws the support columns row by row — forming the samples, their norm,
/// and the on-support correlations in a single pass — then draws the
/// off-support correlation magnitudes from their exact conditional law
/// `|N(0, ‖y‖²/n)|` given the samples. Returns how many true-support indices
/// the top-`k_sel` selection keeps. Memory is `O(k + n)` instead of the
/// `O(m·n)` of matrix assembly.
fn fast_th_block(
    x_support: &[f64],
    n_block: usize,
    m_block: usize,
    k_sel: usize,
    noiseless: bool,
    rng: &mut ChaCha12Rng,
) -> usize {
    let k_on = x_support.len();
    debug_assert!(k_sel <= n_block && k_on <= n_block);
    if m_block == 0 {
        // No measurements: uniform selection.
        return index_sample(rng, n_block, k_sel)
            .into_iter()
            .filter(|&j| j < k_on)
            .count();
    }
    let sd = (1.0 / n_block as f64).sqrt();
    let mut z_on = vec![0.0f64; k_on];
    let mut row = vec![0.0f64; k_on];
    let mut y_norm_sq = 0.0f64;
    for _ in 0..m_block {
        for r in row.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *r = sd * g;
        }
        let mut yi: f64 = row.iter().zip(x_support).map(|(a, x)| a * x).sum();
        if !noiseless {
            let w: f64 = rng.sample(StandardNormal);
            yi += w;
        }
        y_norm_sq += yi * yi;
        for (z, &aij) in z_on.iter_mut().zip(&row) {
            *z += aij * yi;
        }
    }
    let sd_off = (y_norm_sq / n_block as f64).sqrt();
    let mut on: Vec<f64> = z_on.iter().map(|z| z.abs()).collect();
    on.sort_by(|a, b| b.total_cmp(a));
    let mut off: Vec<f64> = (0..n_block - k_on)
        .map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            (sd_off * g).abs()
        })
        .collect();
    off.sort_by(|a, b| b.total_cmp(a));
    let (mut i, mut j, mut overlap) = (0usize, 0usize, 0usize);
    for _ in 0..k_sel {
        if i < on.len() && (j >= off.len() || on[i] >= off[j]) {
            overlap += 1;
            i += 1;
        } else {
            j += 1;
        }
    }
    overlap
}

/// Thresholding trial via the streaming scorer (single-block and
/// rate-sharing ensembles).
fn fast_th_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialResult, HarnessError> {
    let seed = trial_seed(cfg.seed, trial);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let drawn = draw_source_vector(cfg.n, &cfg.source, &mut rng)?;
    let k_true = drawn.pattern.len();
    let support = drawn.pattern.indices();
    let started = Instant::now();
    let (overlap, k_est_total) = match &cfg.matrix {
        MatrixChoice::IidGaussian => {
            let k_sel = cfg.k_override.unwrap_or(k_true);
            let xs: Vec<f64> = support.iter().map(|&i| drawn.x[i]).collect();
            let overlap = fast_th_block(
                &xs,
                cfg.n,
                cfg.iid_rows(),
                k_sel,
                cfg.noiseless,
                &mut rng,
            );
            (overlap, k_sel)
        }
        MatrixChoice::RateSharing { lambda, rho1, rho2 } => {
            // Mirrors the assembled ensemble: ⌈λn⌉ columns in block 1 under
            // a uniform permutation, block rows ⌈ρ_j·scale·n_j⌉.
            let n = cfg.n;
            let n1 = (lambda * n as f64).ceil() as usize;
            let n2 = n - n1.min(n);
            if n1 == 0 || n2 == 0 {
                return Err(HarnessError::Sampling(SamplingError::DegenerateSplit {
                    n,
                    lambda: *lambda,
                }));
            }
            let scale = cfg.rate_share_scale();
            let m1 = (rho1 * scale * n1 as f64).ceil() as usize;
            let m2 = (rho2 * scale * n2 as f64).ceil() as usize;
            let mut in_block1 = vec![false; n];
            for c in index_sample(&mut rng, n, n1) {
                in_block1[c] = true;
            }
            let (mut xs1, mut xs2) = (Vec::new(), Vec::new());
            for &i in support {
                if in_block1[i] {
                    xs1.push(drawn.x[i]);
                } else {
                    xs2.push(drawn.x[i]);
                }
            }
            let omega = cfg.source.omega();
            let k1 = ((omega * n1 as f64).round() as usize).clamp(1, n1);
            let k2 = ((omega * n2 as f64).round() as usize).clamp(1, n2);
            let o1 = fast_th_block(&xs1, n1, m1, k1, cfg.noiseless, &mut rng);
            let o2 = fast_th_block(&xs2, n2, m2, k2, cfg.noiseless, &mut rng);
            (o1 + o2, k1 + k2)
        }
    };
    let runtime = started.elapsed();
    let dist = 1.0 - overlap as f64 / k_true.max(k_est_total) as f64;
    Ok(TrialResult {
        trial,
        seed,
        distortion: dist,
        success: dist <= cfg.alpha,
        runtime,
        diagnostics: None,
    })
}

/// One grid point of a phase-transition sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub rho: f64,
    pub successes: usize,
    pub trials: usize,
    pub success_rate: f64,
    /// Wilson 95% interval on the success rate.
    pub wilson_95: (f64, f64),
}

/// A completed sweep with its logistic 50%-crossing estimate.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// `ρ` where the fitted success curve passes 1/2 (fit in `ln ρ`);
    /// `None` when the fit degenerates.
    pub crossing: Option<f64>,
}

/// Runs the configured experiment at every rate of a strictly increasing
/// grid and fits the 50% crossing of the success curve (logistic regression
/// in `ln ρ`).
///
/// All grid points reuse the same per-trial seeds (common random numbers),
/// so the success rate is nondecreasing in ρ up to reduced Monte Carlo
/// noise, and output is byte-reproducible.
pub fn phase_transition_sweep(
    cfg: &ExperimentConfig,
    rho_grid: &[f64],
) -> Result<SweepResult, HarnessError> {
    if rho_grid.is_empty() {
        return Err(HarnessError::Invalid {
            reason: "sweep needs a nonempty rho grid".into(),
        });
    }
    if !rho_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(HarnessError::Invalid {
            reason: "sweep rho grid must be strictly increasing".into(),
        });
    }
    if rho_grid[0] <= 0.0 {
        return Err(HarnessError::Invalid {
            reason: "sweep rho grid must be positive".into(),
        });
    }
    let mut points = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let mut point_cfg = cfg.clone();
        point_cfg.rho = rho;
        let summary = run_trials(&point_cfg)?;
        let successes = summary.results.iter().filter(|r| r.success).count();
        points.push(SweepPoint {
            rho,
            successes,
            trials: summary.results.len(),
            success_rate: successes as f64 / summary.results.len() as f64,
            wilson_95: stats::wilson_interval(successes, summary.results.len()),
        });
    }
    let fit_points: Vec<(f64, usize, usize)> = points
        .iter()
        .map(|p| (p.rho.ln(), p.successes, p.trials))
        .collect();
    let crossing = stats::logistic_half_crossing(&fit_points).map(f64::exp);
    Ok(SweepResult { points, crossing })
}

/// Serializes a trial batch: `#`-prefixed header (config echo, seed
/// derivation, summary), then `trial,seed,distortion,success` rows.
pub fn render_results_csv(cfg: &ExperimentConfig, summary: &TrialSummary) -> String {
    let mut out = String::from("# simulate results\n");
    out.push_str(&format!("# config: {}\n", cfg.canonical_echo()));
    out.push_str(SEED_DERIVATION_NOTE);
    out.push('\n');
    out.push_str(&format!(
        "# summary: error_rate={:.16e} wilson95_lo={:.16e} wilson95_hi={:.16e} mean_distortion={:.16e}\n",
        summary.error_rate, summary.wilson_95.0, summary.wilson_95.1, summary.mean_distortion
    ));
    out.push_str("trial,seed,distortion,success\n");
    for r in &summary.results {
        out.push_str(&format!(
            "{},{},{:.16e},{}\n",
            r.trial, r.seed, r.distortion, r.success
        ));
    }
    out
}

/// Serializes a sweep: `#`-prefixed header (config echo, seed derivation,
/// crossing estimate), then
/// `rho,successes,trials,success_rate,wilson_lo,wilson_hi` rows.
pub fn render_sweep_csv(cfg: &ExperimentConfig, sweep: &SweepResult) -> String {
    let mut out = String::from("# phase-transition sweep\n");
    out.push_str(&format!(
        "# config: {} (rho column overrides the configured rho)\n",
        cfg.canonical_echo()
    ));
    out.push_str(SEED_DERIVATION_NOTE);
    out.push_str("; common random numbers across grid points\n");
    match sweep.crossing {
        Some(rho) => out.push_str(&format!(
            "# logistic 50% crossing (fit in ln rho): {rho:.16e}\n"
        )),
        None => out.push_str("# logistic 50% crossing (fit in ln rho): none\n"),
    }
    out.push_str("rho,successes,trials,success_rate,wilson_lo,wilson_hi\n");
    for p in &sweep.points {
        out.push_str(&format!(
            "{:.16e},{},{},{:.16e},{:.16e},{:.16e}\n",
            p.rho, p.successes, p.trials, p.success_rate, p.wilson_95.0, p.wilson_95.1
        ));
    }
    out
}
