//! Approximate sparsity-pattern recovery from noisy linear measurements.
//!
//! A length-`n` signal `x` with `k ≈ Ω·n` nonzero entries drawn from a law
//! `F` is observed through `m = ρ·n` noisy random projections
//! `y = A·x + w`. The question is not whether `x` can be reconstructed but
//! whether its *support* can — and, when a fraction `α` of misidentified
//! indices is tolerable, how small the sampling rate `ρ` may be. Recovery is
//! scored by the set distortion `d(s, ŝ) = 1 − |s ∩ ŝ| / max(|s|, |ŝ|)` and
//! declared successful when `d ≤ α`.
//!
//! The crate has three layers:
//!
//! * **Analysis** ([`bounds`], [`source`], [`math`]): every sampling-rate
//!   bound as an evaluatable curve `ρ(α)` — the subset-search and correlation
//!   bounds, their closed forms and loose variants, bounded-family versions,
//!   scaling laws, and the rate-sharing convexification — built on the
//!   special functions and source functionals they quote.
//! * **Algorithms** ([`estimators`], [`sampling`], [`linalg`]): the
//!   nearest-subspace, thresholding, and optimal Gaussian-prior estimators,
//!   exhaustive at desk scale, with the measurement-matrix generators they
//!   operate on.
//! * **Experiments** ([`harness`]): seeded, parallel Monte Carlo trials,
//!   phase-transition sweeps, and statistical verification suites that
//!   confront the analysis with the algorithms.
//!
//! Reproducibility is a contract: every experiment derives per-trial seeds
//! from a master seed by a splitmix-style expansion, and results are reduced
//! in trial order, so a config file plus a seed determines output bytes
//! exactly, independent of thread count.

pub mod bounds;
pub mod estimators;
pub mod harness;
pub mod linalg;
pub mod math;
pub mod quadrature;
pub mod sampling;
pub mod source;

pub use bounds::{
    alpha_grid, bounded_source_bounds, convexify, family_metadata, ns_upper_bound, render_csv,
    scaling_curve, th_gaussian_closed_form, th_loose_bound, th_upper_bound, BoundCurve,
    BoundedSourceParams, BoundsError, CurveLabel, ScalingKind, ScalingParams,
};
pub use estimators::{
    detection_curves, distortion, nearest_subspace, optimal_gaussian, residual_norm_sq,
    thresholding, DetectionCurves, EstimateResult, EstimatorError, SparsityPattern,
};
pub use harness::{
    phase_transition_sweep, render_results_csv, render_sweep_csv, run_trials, run_trials_with,
    verify_all, verify_lemma_suite, verify_theorem8, CheckReport, EstimatorChoice,
    ExperimentConfig, HarnessError, MatrixChoice, RunOptions, SweepPoint, SweepResult,
    TrialResult, TrialSummary, VerifyReport,
};
pub use math::{MathError, Probability};
pub use sampling::{
    dump_sample_set, gaussian_matrix, measure, rate_sharing_matrix, read_sample_set, MatrixKind,
    NoiseMode, SamplingError, SamplingMatrix,
};
pub use source::{
    draw_source_vector, entropy_power_ratio, truncate, truncated_gaussian_power,
    DistributionModel, GeneratedVector, SourceError, SourceSpec, TruncatedDistribution,
};
