//! Acceptance battery: eleven end-to-end checks covering the analytic
//! bounds, the estimators, and the Monte Carlo harness at desk scale. Each
//! criterion prints exactly one `[PASS]`/`[FAIL]` line with its measured
//! statistics and elapsed time; the process exits nonzero if any line fails.
//!
//! All tolerances are pinned as constants below; all randomness is seeded.

use std::process::ExitCode;
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use suprec::bounds::{
    alpha_grid, bounded_source_bounds, convexify, ns_upper_bound, th_gaussian_closed_form,
    th_loose_bound, th_upper_bound, BoundCurve, BoundedSourceParams, CurveLabel,
};
use suprec::estimators::{distortion, thresholding, SparsityPattern};
use suprec::harness::{
    phase_transition_sweep, run_trials, verify_lemma_suite, verify_theorem8, EstimatorChoice,
    ExperimentConfig, MatrixChoice, VerifyReport,
};
use suprec::math::{q_tail_inverse, Probability};
use suprec::quadrature::adaptive_simpson;
use suprec::sampling::gaussian_matrix;
use suprec::source::{truncated_gaussian_power, DistributionModel, SourceSpec};

/// Criterion 1: root finder vs closed form, relative.
const CLOSED_FORM_REL_TOL: f64 = 1e-6;
/// Criterion 2: truncated power vs independent quadrature, relative.
const TRUNCATED_POWER_REL_TOL: f64 = 1e-8;
/// Criterion 2: small-β limit `P(Ω,F_β)/β² → πΩ/6`, relative band.
const SMALL_BETA_REL_BAND: f64 = 0.01;
/// Criterion 5: success-rate brackets around the transition.
const TRANSITION_HIGH: f64 = 0.95;
const TRANSITION_LOW: f64 = 0.05;
/// Criterion 9: convexity slack on second differences, envelope-vs-min slack.
const CONVEXITY_SLACK: f64 = 1e-9;
/// Criterion 9: rate-sharing combined-distortion slack and success floor.
const COMBINED_DISTORTION_SLACK: f64 = 0.02;
const RATE_SHARE_SUCCESS_FLOOR: f64 = 0.95;
/// Criterion 10: allowed relative shift between the two fitted crossings.
const CROSSING_SHIFT_BAND: f64 = 0.05;
/// Criterion 11: float guard for the (rationally exact) triangle inequality.
const TRIANGLE_FLOAT_GUARD: f64 = 1e-15;

/// Thresholding upper-bound rate for the two-point source with c² = 200 at
/// Ω = 0.05, α = 0.1 (cross-checked against the root finder in criterion 1's
/// machinery; the transition in criterion 5 is bracketed at ±20% of this).
const RHO_TH_UB_TWO_POINT: f64 = 0.911_974_775_664_279_54;

/// Criterion 9 rate-sharing operating points: 1.5× the thresholding
/// upper-bound rates for the same two-point source at α = 0.15 and α = 0.35,
/// comfortably inside each block's achievable region.
const RATE_SHARE_RHO_1: f64 = 1.125_138_588_666_687_4;
const RATE_SHARE_RHO_2: f64 = 0.620_446_332_349_092_30;
const RATE_SHARE_ALPHA_1: f64 = 0.15;
const RATE_SHARE_ALPHA_2: f64 = 0.35;

fn main() -> ExitCode {
    println!("acceptance battery: 11 criteria, fixed seeds, pinned tolerances");
    let mut all = true;

    all &= record(1, 10.0, criterion_1_closed_form_agreement());
    all &= record(2, 5.0, criterion_2_truncated_power());

    // Criteria 3, 4, and 8 gate on named checks of the lemma verification
    // suite; one shared run produces all of them (its full elapsed time is
    // charged to each criterion).
    let t0 = Instant::now();
    let lemmas = verify_lemma_suite();
    let lemma_secs = t0.elapsed().as_secs_f64();
    all &= record_at(lemma_secs, 3, 120.0, suite_criterion(&lemmas, &["lemma1_residual_chi_square"]));
    all &= record_at(lemma_secs, 4, 300.0, suite_criterion(&lemmas, &["lemma3_offsupport_tail_limit", "lemma4_onsupport_miss_limit"]));

    all &= record(5, 600.0, criterion_5_th_transition());
    all &= record(6, 30.0, criterion_6_bounded_curve_shape());

    let t0 = Instant::now();
    let limits = verify_theorem8();
    let theorem8_secs = t0.elapsed().as_secs_f64();
    all &= record_at(theorem8_secs, 7, 300.0, criterion_7_optimal_limits(&limits));

    all &= record_at(lemma_secs, 8, 30.0, suite_criterion(
        &lemmas,
        &["lemma7_chi_square_tail_domination", "lemma8_gap_function_floor", "lemma9_endpoint_maximand"],
    ));
    all &= record(9, 900.0, criterion_9_convexity_and_rate_sharing());
    all &= record(10, 600.0, criterion_10_selection_size_insensitivity());
    all &= record(11, 120.0, criterion_11_metric_and_oracles());

    if all {
        println!("acceptance: 11/11 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: at least one criterion failed (see [FAIL] lines above)");
        ExitCode::FAILURE
    }
}

fn record(index: usize, budget_secs: f64, work: impl FnOnce() -> (bool, String)) -> bool {
    let t0 = Instant::now();
    let (passed, details) = work();
    record_at(t0.elapsed().as_secs_f64(), index, budget_secs, (passed, details))
}

fn record_at(elapsed: f64, index: usize, budget_secs: f64, outcome: (bool, String)) -> bool {
    let (stat_ok, details) = outcome;
    let in_budget = elapsed < budget_secs;
    let passed = stat_ok && in_budget;
    let verdict = if passed { "PASS" } else { "FAIL" };
    let budget_note = if in_budget {
        String::new()
    } else {
        format!(" — over the {budget_secs:.0}s budget")
    };
    println!("[{verdict}] ({index:>2}/11) {details} [{elapsed:.1}s{budget_note}]");
    passed
}

/// Extracts named checks from a verification-suite report; the criterion
/// passes iff every named check passed.
fn suite_criterion(report: &VerifyReport, names: &[&str]) -> (bool, String) {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in names {
        match report.checks.iter().find(|c| c.name == *name) {
            Some(check) => {
                passed &= check.passed;
                parts.push(format!("{} ({})", check.details, if check.passed { "ok" } else { "VIOLATED" }));
            }
            None => {
                passed = false;
                parts.push(format!("missing suite check {name}"));
            }
        }
    }
    (passed, parts.join("; "))
}

// ---------------------------------------------------------------------------
// Criterion 1: the thresholding rate root finder agrees with the Gaussian
// closed form to 1e-6 relative on a 125-point (Ω, σ², α) grid.
// ---------------------------------------------------------------------------
fn criterion_1_closed_form_agreement() -> impl FnOnce() -> (bool, String) {
    || {
        let omegas = [0.05, 0.1, 0.2, 0.3, 0.4];
        let variances = [0.5, 1.0, 2.0, 10.0, 200.0];
        let alphas = [0.05, 0.1, 0.2, 0.3, 0.5];
        let mut max_rel = 0.0f64;
        let mut cells = 0usize;
        for &omega in &omegas {
            for &variance in &variances {
                let spec = SourceSpec::new(
                    omega,
                    DistributionModel::gaussian(0.0, variance).expect("positive variance"),
                )
                .expect("omega in range");
                for &alpha in &alphas {
                    let root = match th_upper_bound(&spec, alpha) {
                        Ok(v) => v,
                        Err(e) => return (false, format!("root finder failed: {e}")),
                    };
                    let closed = match th_gaussian_closed_form(omega, omega * variance, alpha) {
                        Ok(v) => v,
                        Err(e) => return (false, format!("closed form failed: {e}")),
                    };
                    let rel = if root == closed {
                        0.0
                    } else {
                        (root - closed).abs() / closed.abs().max(f64::MIN_POSITIVE)
                    };
                    max_rel = max_rel.max(rel);
                    cells += 1;
                }
            }
        }
        (
            max_rel <= CLOSED_FORM_REL_TOL,
            format!(
                "thresholding rate: root finder vs closed form, max rel gap {max_rel:.2e} \
                 over {cells} (Ω, σ², α) cells (need ≤ {CLOSED_FORM_REL_TOL:.0e})"
            ),
        )
    }
}

// ---------------------------------------------------------------------------
// Criterion 2: the truncated-power closed form matches an independent
// adaptive-quadrature evaluation to 1e-8 relative on β ∈ {0.01, …, 1}, and
// P(Ω, F_β)/β² is within 1% of πΩ/6 at β = 10⁻³.
// ---------------------------------------------------------------------------
fn criterion_2_truncated_power() -> impl FnOnce() -> (bool, String) {
    || {
        let omega = 0.1;
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut max_rel = 0.0f64;
        for i in 1..=100usize {
            let beta = i as f64 / 100.0;
            let closed = match truncated_gaussian_power(omega, 1.0, beta) {
                Ok(v) => v,
                Err(e) => return (false, format!("closed form failed at β={beta}: {e}")),
            };
            // Independent route: t_β from the quantile, then ∫ x²φ over the
            // kept magnitudes (the closed form goes through the χ² CDF).
            let t = if beta == 1.0 {
                12.0
            } else {
                let level = Probability::new((1.0 - beta) / 2.0).expect("level in (0, 1/2)");
                match q_tail_inverse(level) {
                    Ok(v) => v,
                    Err(e) => return (false, format!("quantile failed at β={beta}: {e}")),
                }
            };
            let raw = 2.0 * adaptive_simpson(|x| x * x * phi(x), 0.0, t, 1e-14);
            let quad = omega * raw / beta;
            let rel = (closed - quad).abs() / quad;
            max_rel = max_rel.max(rel);
        }
        let beta = 1e-3;
        let small = match truncated_gaussian_power(omega, 1.0, beta) {
            Ok(v) => v,
            Err(e) => return (false, format!("closed form failed at β=1e-3: {e}")),
        };
        let ratio = small / (beta * beta);
        let limit = std::f64::consts::PI * omega / 6.0;
        let band = (ratio - limit).abs() / limit;
        (
            max_rel <= TRUNCATED_POWER_REL_TOL && band <= SMALL_BETA_REL_BAND,
            format!(
                "truncated power: max rel gap vs quadrature {max_rel:.2e} on 100 β's \
                 (need ≤ {TRUNCATED_POWER_REL_TOL:.0e}); P/β² = {ratio:.6e} vs πΩ/6 = {limit:.6e}, \
                 off by {:.3}% (need ≤ {:.0}%)",
                100.0 * band,
                100.0 * SMALL_BETA_REL_BAND
            ),
        )
    }
}

// ---------------------------------------------------------------------------
// Criterion 5: the thresholding phase transition at n = 5000, Ω = 0.05,
// α = 0.1, 10 dB (two-point source) brackets the analytic rate: success
// ≥ 95% at 1.2× the bound and ≤ 5% at 0.8×, 200 trials each.
// ---------------------------------------------------------------------------
fn criterion_5_th_transition() -> impl FnOnce() -> (bool, String) {
    || {
        let mut rates = [0.0f64; 2];
        for (slot, scale) in rates.iter_mut().zip([1.2f64, 0.8]) {
            let cfg = match two_point_config(5000, 0.05, 200.0, scale * RHO_TH_UB_TWO_POINT, 0.1, 200, 0xAC05) {
                Ok(c) => c,
                Err(e) => return (false, e),
            };
            let summary = match run_trials(&cfg) {
                Ok(s) => s,
                Err(e) => return (false, format!("trial batch failed: {e}")),
            };
            *slot = 1.0 - summary.error_rate;
        }
        (
            rates[0] >= TRANSITION_HIGH && rates[1] <= TRANSITION_LOW,
            format!(
                "thresholding transition bracket: success {:.3} at 1.2×rate (need ≥ {TRANSITION_HIGH}) \
                 and {:.3} at 0.8×rate (need ≤ {TRANSITION_LOW}), 200 trials each at n = 5000",
                rates[0], rates[1]
            ),
        )
    }
}

fn two_point_config(
    n: usize,
    omega: f64,
    c_sq: f64,
    rho: f64,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<ExperimentConfig, String> {
    let model = DistributionModel::two_point(c_sq.sqrt()).map_err(|e| e.to_string())?;
    let source = SourceSpec::new(omega, model).map_err(|e| e.to_string())?;
    Ok(ExperimentConfig {
        n,
        source,
        snr_db: Some(10.0 * (omega * c_sq).log10()),
        rho,
        alpha,
        estimator: EstimatorChoice::Th,
        matrix: MatrixChoice::IidGaussian,
        trials,
        seed,
        k_override: None,
        noiseless: false,
    })
}

// ---------------------------------------------------------------------------
// Criterion 6: bounded-family curve shape at Ω = 10⁻⁴, η = 0.2, α = 0.1 —
// thresholding is cheaper at 0 dB, subset selection at 40 dB, and their
// difference changes sign exactly once on a 60-point SNR grid.
// ---------------------------------------------------------------------------
fn criterion_6_bounded_curve_shape() -> impl FnOnce() -> (bool, String) {
    || {
        let (omega, eta, alpha) = (1e-4, 0.2, 0.1);
        let eval = |snr_db: f64| -> Result<(f64, f64), String> {
            let gamma = 10f64.powf(snr_db / 10.0) / omega;
            let params = BoundedSourceParams::new(eta, gamma).map_err(|e| e.to_string())?;
            bounded_source_bounds(omega, &params, alpha).map_err(|e| e.to_string())
        };
        let (ns_low, th_low) = match eval(0.0) {
            Ok(v) => v,
            Err(e) => return (false, e),
        };
        let (ns_high, th_high) = match eval(40.0) {
            Ok(v) => v,
            Err(e) => return (false, e),
        };
        let mut sign_changes = 0usize;
        let mut prev_sign = 0i8;
        for i in 0..60 {
            let snr_db = -5.0 + 50.0 * i as f64 / 59.0;
            let (ns, th) = match eval(snr_db) {
                Ok(v) => v,
                Err(e) => return (false, e),
            };
            let sign = if th < ns { -1 } else { 1 };
            if prev_sign != 0 && sign != prev_sign {
                sign_changes += 1;
            }
            prev_sign = sign;
        }
        (
            th_low < ns_low && ns_high < th_high && sign_changes == 1,
            format!(
                "bounded-family shape: at 0 dB th = {th_low:.4} < ns = {ns_low:.4}; \
                 at 40 dB ns = {ns_high:.2e} < th = {th_high:.4}; \
                 {sign_changes} sign change(s) on the 60-point −5..45 dB grid (need exactly 1)"
            ),
        )
    }
}

// ---------------------------------------------------------------------------
// Criterion 7: limit identities of the optimal Gaussian-prior estimator on
// 200 instances at (n, m, k) = (12, 8, 3), α ∈ {0, 1/3, 2/3}. The γ → 0
// identity (vs thresholding on column-normalized matrices) holds at every α.
// The γ → 1 identity (vs nearest subspace) holds only at α = 0: for α > 0
// the α-ball posterior mass genuinely reorders candidates, so those two
// sub-checks fail and are reported honestly rather than waived.
// ---------------------------------------------------------------------------
fn criterion_7_optimal_limits(report: &VerifyReport) -> (bool, String) {
    let mut passed = true;
    let mut parts = Vec::new();
    for check in &report.checks {
        passed &= check.passed;
        parts.push(format!(
            "{}: {} ({})",
            check.name,
            check.details,
            if check.passed { "ok" } else { "VIOLATED" }
        ));
    }
    (passed, format!("optimal-estimator limits — {}", parts.join("; ")))
}

// ---------------------------------------------------------------------------
// Criterion 9: envelope properties (convex, below the pointwise minimum,
// zero at α = 1 − Ω) plus the rate-sharing Monte Carlo check: two achievable
// operating points combined at λ = 0.5 hit the mixed distortion within 0.02
// in at least 95% of trials at n = 5000.
// ---------------------------------------------------------------------------
fn criterion_9_convexity_and_rate_sharing() -> impl FnOnce() -> (bool, String) {
    || {
        let omega = 0.1;
        let spec = SourceSpec::new(omega, DistributionModel::gaussian(0.0, 100.0).expect("positive variance"))
            .expect("omega in range");
        let grid = alpha_grid(omega);
        let mut curves = Vec::new();
        type Bound = fn(&SourceSpec, f64) -> Result<f64, suprec::bounds::BoundsError>;
        for (label, f) in [
            (CurveLabel::NsUb, ns_upper_bound as Bound),
            (CurveLabel::ThUb, th_upper_bound as Bound),
            (CurveLabel::ThLoose, th_loose_bound as Bound),
        ] {
            let mut points = Vec::with_capacity(grid.len());
            for &alpha in &grid {
                match f(&spec, alpha) {
                    Ok(v) => points.push((alpha, v)),
                    Err(e) => return (false, format!("bound evaluation failed: {e}")),
                }
            }
            curves.push(BoundCurve {
                points,
                label,
                omega,
                snr_db: 10.0,
                family: "gaussian".into(),
            });
        }
        let envelope = match convexify(&curves, omega) {
            Ok(c) => c,
            Err(e) => return (false, format!("envelope failed: {e}")),
        };

        // Convexity: second differences on a uniform resampling.
        let (lo, hi) = (envelope.points[0].0, envelope.points[envelope.points.len() - 1].0);
        let samples = 400usize;
        let ys: Vec<f64> = (0..samples)
            .map(|i| {
                let a = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
                envelope.value_at(a).expect("inside the envelope span")
            })
            .collect();
        let min_second_diff = ys
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(f64::INFINITY, f64::min);

        // Dominated by the pointwise minimum of the inputs.
        let mut max_excess = f64::NEG_INFINITY;
        for &alpha in &grid {
            let min_input = curves
                .iter()
                .filter_map(|c| c.value_at(alpha))
                .fold(f64::INFINITY, f64::min);
            if let Some(env) = envelope.value_at(alpha) {
                max_excess = max_excess.max(env - min_input);
            }
        }

        // Free point at the distortion ceiling.
        let at_ceiling = envelope.value_at(1.0 - omega).unwrap_or(f64::NAN);

        // Rate sharing at λ = 1/2 between two comfortably achievable
        // operating points of the two-point thresholding system.
        let lambda = 0.5;
        let target = lambda * RATE_SHARE_ALPHA_1 + (1.0 - lambda) * RATE_SHARE_ALPHA_2
            + COMBINED_DISTORTION_SLACK;
        let mut cfg = match two_point_config(
            5000,
            0.05,
            200.0,
            lambda * RATE_SHARE_RHO_1 + (1.0 - lambda) * RATE_SHARE_RHO_2,
            target,
            100,
            0xAC09,
        ) {
            Ok(c) => c,
            Err(e) => return (false, e),
        };
        cfg.matrix = MatrixChoice::RateSharing {
            lambda,
            rho1: RATE_SHARE_RHO_1,
            rho2: RATE_SHARE_RHO_2,
        };
        let summary = match run_trials(&cfg) {
            Ok(s) => s,
            Err(e) => return (false, format!("rate-sharing batch failed: {e}")),
        };
        let success_rate = 1.0 - summary.error_rate;

        let ok = min_second_diff >= -CONVEXITY_SLACK
            && max_excess <= CONVEXITY_SLACK
            && at_ceiling.abs() <= 1e-12
            && success_rate >= RATE_SHARE_SUCCESS_FLOOR;
        (
            ok,
            format!(
                "envelope: min second difference {min_second_diff:.1e} (need ≥ −{CONVEXITY_SLACK:.0e}), \
                 max excess over pointwise min {max_excess:.1e}, value {at_ceiling:.1e} at α = 1−Ω; \
                 rate sharing: combined distortion ≤ {target} in {:.0}% of 100 trials (need ≥ {:.0}%)",
                100.0 * success_rate,
                100.0 * RATE_SHARE_SUCCESS_FLOOR
            ),
        )
    }
}

// ---------------------------------------------------------------------------
// Criterion 10: inflating the selection size by ⌈n^0.4⌉ moves the fitted
// 50% crossing by less than 5% at n = 5000 (two-point source, Ω = 0.4,
// α = 0.3, 10 dB).
// ---------------------------------------------------------------------------
fn criterion_10_selection_size_insensitivity() -> impl FnOnce() -> (bool, String) {
    || {
        let n = 5000usize;
        let k_true = (0.4 * n as f64).round() as usize;
        let bump = (n as f64).powf(0.4).ceil() as usize;
        let grid: Vec<f64> = (0..6).map(|i| 1.33 + 0.05 * i as f64).collect();
        let mut crossings = [0.0f64; 2];
        for (slot, k_override) in crossings.iter_mut().zip([None, Some(k_true + bump)]) {
            let mut cfg = match two_point_config(n, 0.4, 25.0, grid[0], 0.3, 80, 0xAC10) {
                Ok(c) => c,
                Err(e) => return (false, e),
            };
            cfg.k_override = k_override;
            let sweep = match phase_transition_sweep(&cfg, &grid) {
                Ok(s) => s,
                Err(e) => return (false, format!("sweep failed: {e}")),
            };
            match sweep.crossing {
                Some(rho) => *slot = rho,
                None => {
                    let rates: Vec<String> = sweep
                        .points
                        .iter()
                        .map(|p| format!("{:.2}", p.success_rate))
                        .collect();
                    return (
                        false,
                        format!(
                            "no 50% crossing fit for k_override = {k_override:?} (rates {})",
                            rates.join(", ")
                        ),
                    );
                }
            }
        }
        let shift = (crossings[1] - crossings[0]).abs() / crossings[0];
        (
            shift < CROSSING_SHIFT_BAND,
            format!(
                "selection-size insensitivity: crossing {:.4} with true k = {k_true}, \
                 {:.4} with k = {} (+⌈n^0.4⌉ = {bump}), shift {:.2}% (need < {:.0}%)",
                crossings[0],
                crossings[1],
                k_true + bump,
                100.0 * shift,
                100.0 * CROSSING_SHIFT_BAND
            ),
        )
    }
}

// ---------------------------------------------------------------------------
// Criterion 11: the distortion triangle inequality holds exactly (verified
// in integer arithmetic) over 10⁵ random triples; thresholding equals the
// exhaustive correlation-energy maximizer on 500 small instances; the
// ambiguity-set counting identity holds by enumeration at n ≤ 16.
// ---------------------------------------------------------------------------
fn criterion_11_metric_and_oracles() -> impl FnOnce() -> (bool, String) {
    || {
        // Triangle inequality, exact: d(s₁,s₃) ≤ d(s₁,s₂) + d(s₂,s₃) with
        // d = 1 − o/b compared by u64 cross-multiplication.
        let mut rng = ChaCha12Rng::seed_from_u64(0xAC11);
        let n = 40usize;
        let mut exact_violations = 0usize;
        let mut max_float_gap = 0.0f64;
        for _ in 0..100_000 {
            let pats: Vec<SparsityPattern> = (0..3)
                .map(|_| {
                    let k = rng.gen_range(1..n);
                    let mut idx = rand::seq::index::sample(&mut rng, n, k).into_vec();
                    idx.sort_unstable();
                    SparsityPattern::from_sorted(idx, n).expect("sampled patterns are valid")
                })
                .collect();
            let overlap = |a: &SparsityPattern, b: &SparsityPattern| -> (u64, u64) {
                let o = a.indices().iter().filter(|i| b.indices().contains(i)).count() as u64;
                (o, a.indices().len().max(b.indices().len()) as u64)
            };
            let (o12, b12) = overlap(&pats[0], &pats[1]);
            let (o23, b23) = overlap(&pats[1], &pats[2]);
            let (o13, b13) = overlap(&pats[0], &pats[2]);
            // (b13−o13)/b13 ≤ (b12−o12)/b12 + (b23−o23)/b23, cleared of
            // denominators (all ≤ 40, so products stay far below u64 range).
            let lhs = (b13 - o13) * b12 * b23;
            let rhs = ((b12 - o12) * b23 + (b23 - o23) * b12) * b13;
            if lhs > rhs {
                exact_violations += 1;
            }
            let d12 = distortion(&pats[0], &pats[1]).expect("same n");
            let float_gap = d12 - (b12 - o12) as f64 / b12 as f64;
            max_float_gap = max_float_gap.max(float_gap.abs());
        }

        // Thresholding vs the exhaustive ‖Aₛᵀy‖ maximizer.
        let mut mismatches = 0usize;
        let (m, n_small, k) = (6usize, 10usize, 3usize);
        for _ in 0..500 {
            let a = gaussian_matrix(m, n_small, &mut rng);
            let y: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            let z = a.entries().transpose_mul_vec(&y);
            let best = (0..n_small)
                .combinations(k)
                .max_by(|s, t| {
                    let energy = |s: &Vec<usize>| s.iter().map(|&i| z[i] * z[i]).sum::<f64>();
                    energy(s).total_cmp(&energy(t))
                })
                .expect("nonempty enumeration");
            let est = thresholding(&y, &a, k, &mut rng).expect("valid instance");
            if est.pattern.indices() != best.as_slice() {
                mismatches += 1;
            }
        }

        // Ambiguity-set counting by enumeration.
        let mut count_mismatches = 0usize;
        let mut cells = 0usize;
        for (nn, kk) in [(10usize, 3usize), (12, 4), (16, 5)] {
            let mut counts = vec![0u64; kk + 1];
            for subset in (0..nn).combinations(kk) {
                let overlap = subset.iter().filter(|&&i| i < kk).count();
                counts[kk - overlap] += 1;
            }
            for (l, &count) in counts.iter().enumerate() {
                let expected = suprec::math::binomial_f64(kk as u64, l as u64)
                    * suprec::math::binomial_f64((nn - kk) as u64, l as u64);
                if count as f64 != expected {
                    count_mismatches += 1;
                }
                cells += 1;
            }
        }

        let ok = exact_violations == 0
            && max_float_gap <= TRIANGLE_FLOAT_GUARD
            && mismatches == 0
            && count_mismatches == 0;
        (
            ok,
            format!(
                "metric and oracles: {exact_violations}/100000 exact triangle violations \
                 (float drift ≤ {max_float_gap:.1e}); {mismatches}/500 thresholding vs exhaustive \
                 maximizer mismatches; {count_mismatches}/{cells} ambiguity-count cells off"
            ),
        )
    }
}
