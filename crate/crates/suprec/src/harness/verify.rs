//! Statistical verification suites: seeded desk-scale experiments that check
//! the analytic ingredients the rate bounds are built from — exact
//! finite-sample laws, uniform-convergence limits, counting identities,
//! deterministic inequalities — and the estimator-equivalence limits of the
//! optimal Gaussian estimator at extreme prior weights.
//!
//! Every check runs on its own fixed seed, collects a pass/fail verdict with
//! the measured statistic, and never aborts the suite: failures are reported,
//! not thrown.

use crate::estimators::{
    ambiguous_pattern_count, block_combination_weight, detection_curves, distortion,
    for_each_k_subset, nearest_subspace, normalized_scores, optimal_gaussian, residual_norm_sq,
    thresholding, SparsityPattern,
};
use crate::harness::stats::ks_test_statistic;
use crate::harness::trial_seed;
use crate::math::{
    chi_square_cdf, chi_square_tail_bounds, g_detect, gap_function, h_nats, ln_binomial,
    maxtheta_bound_check, q_tail,
};
use crate::sampling::{gaussian_matrix, measure, rate_sharing_matrix, MatrixKind, NoiseMode};
use crate::source::{draw_source_vector, truncate, DistributionModel, SourceSpec};
use rand::seq::index::sample as index_sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// One verification check: verdict plus the measured statistic.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

/// A suite of checks with a rendered summary.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One `[PASS]`/`[FAIL]` line per check.
    pub fn render(&self) -> String {
        let mut out = format!("suite {} ({} checks)\n", self.suite, self.checks.len());
        for c in &self.checks {
            let tag = if c.passed { "[PASS]" } else { "[FAIL]" };
            out.push_str(&format!("{tag} {}: {}\n", c.name, c.details));
        }
        out
    }
}

fn run_check(
    name: &'static str,
    f: impl FnOnce() -> Result<(bool, String), String>,
) -> CheckReport {
    match f() {
        Ok((passed, details)) => CheckReport {
            name,
            passed,
            details,
        },
        Err(err) => CheckReport {
            name,
            passed: false,
            details: format!("check aborted: {err}"),
        },
    }
}

fn due<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Runs the appendix-lemma battery. Individual failures are collected in the
/// report, never raised.
pub fn verify_lemma_suite() -> VerifyReport {
    let mut checks = vec![
        run_check("lemma1_residual_chi_square", lemma1_residual_chi_square),
        run_check("lemma2_truncated_power_floor", lemma2_truncated_power_floor),
    ];
    match lemma3_4_detection_limits() {
        Ok(gaps) => {
            checks.push(CheckReport {
                name: "lemma3_offsupport_tail_limit",
                passed: gaps.mean_curve_minus < 0.05,
                details: format!(
                    "sup|mean D⁻ − 2Q| = {:.4} over 50 trials (need < 0.05); per-trial sup mean = {:.4}",
                    gaps.mean_curve_minus, gaps.per_trial_minus
                ),
            });
            checks.push(CheckReport {
                name: "lemma4_onsupport_miss_limit",
                passed: gaps.mean_curve_plus < 0.05,
                details: format!(
                    "sup|mean D⁺ − ∫G dF| = {:.4} over 50 trials (need < 0.05); per-trial sup mean = {:.4} (KS noise floor ≈ 0.87/√k = {:.3} at k = 200)",
                    gaps.mean_curve_plus,
                    gaps.per_trial_plus,
                    0.8687 / 200f64.sqrt()
                ),
            });
        }
        Err(err) => {
            for name in ["lemma3_offsupport_tail_limit", "lemma4_onsupport_miss_limit"] {
                checks.push(CheckReport {
                    name,
                    passed: false,
                    details: format!("check aborted: {err}"),
                });
            }
        }
    }
    checks.extend([
        run_check("lemma5_perturbation_continuity", lemma5_perturbation_continuity),
        run_check("lemma6_binomial_entropy_rate", lemma6_binomial_entropy_rate),
        run_check("lemma7_chi_square_tail_domination", lemma7_tail_domination),
        run_check("lemma8_gap_function_floor", lemma8_gap_floor),
        run_check("lemma9_endpoint_maximand", lemma9_endpoint_maximand),
        run_check("ambiguity_counting_identity", ambiguity_counting_identity),
        run_check("block_combination_inequality", block_combination_inequality),
        run_check("rate_sharing_split_ratio", rate_sharing_split_ratio),
    ]);
    VerifyReport {
        suite: "lemmas",
        checks,
    }
}

/// Exact finite-sample law: for a FIXED candidate subset `s` and fresh
/// `(A, w)` each trial, `residual/(1 + ‖x_{s*∖s}‖²/n) ~ χ²_{m−|s|}`.
fn lemma1_residual_chi_square() -> Result<(bool, String), String> {
    let (n, m, k) = (400usize, 200usize, 20usize);
    let trials = 2000usize;
    let master = 0x4C31u64;
    // Fixed signal: support {10..30}, Gaussian values; fixed candidate
    // {0..20} overlapping the support in 10 indices.
    let mut rng = ChaCha12Rng::seed_from_u64(master);
    let model = DistributionModel::gaussian(0.0, 4.0).map_err(due)?;
    let mut x = vec![0.0f64; n];
    for i in 10..30 {
        x[i] = model.sample(&mut rng);
    }
    let candidate = SparsityPattern::new((0..k).collect(), n).map_err(due)?;
    let missed_energy: f64 = (20..30).map(|i| x[i] * x[i]).sum();
    let scale = 1.0 + missed_energy / n as f64;
    let mut samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha12Rng::seed_from_u64(trial_seed(master, t));
            let a = gaussian_matrix(m, n, &mut rng);
            let y = measure(&a, &x, NoiseMode::Standard, &mut rng);
            let (res, _) = residual_norm_sq(&y, &a, &candidate);
            res / scale
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let dof = (m - k) as u32;
    let (stat, p) = ks_test_statistic(&samples, |v| {
        chi_square_cdf(dof, v.max(0.0)).map(|q| q.get()).unwrap_or(0.0)
    });
    Ok((
        p > 0.01,
        format!("KS D = {stat:.4}, p = {p:.4} vs χ²_{dof} over {trials} trials (need p > 0.01)"),
    ))
}

/// Uniform truncated-power floor: the empirical power of the
/// smallest-magnitude β-fraction of a drawn vector stays above
/// `(1−ε)·P(βΩ, F_β)` across the whole β grid at n = 10⁵.
fn lemma2_truncated_power_floor() -> Result<(bool, String), String> {
    let n = 100_000usize;
    let eps = 0.1;
    let spec =
        SourceSpec::new(0.1, DistributionModel::gaussian(0.0, 1.0).map_err(due)?).map_err(due)?;
    let model = spec.resolved_model();
    let betas = [0.02, 0.05, 0.1, 0.25, 0.5, 1.0];
    let mut worst: f64 = f64::INFINITY;
    for draw in 0..3u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(0x4C32 + draw);
        let drawn = draw_source_vector(n, &spec, &mut rng).map_err(due)?;
        let mut mags: Vec<f64> = drawn.nonzeros_sorted.iter().map(|v| v.abs()).collect();
        mags.sort_by(f64::total_cmp);
        let k = mags.len();
        for &beta in &betas {
            let count = ((beta * k as f64).ceil() as usize).clamp(1, k);
            let empirical: f64 =
                mags[..count].iter().map(|v| v * v).sum::<f64>() / n as f64;
            let analytic =
                beta * spec.omega() * truncate(&model, beta).map_err(due)?.second_moment();
            worst = worst.min(empirical / analytic);
        }
    }
    Ok((
        worst >= 1.0 - eps,
        format!("min empirical/analytic truncated power = {worst:.4} (need ≥ {:.2})", 1.0 - eps),
    ))
}

/// Detection-curve limits at n = 4000, ρ = 0.6, Ω = 0.05, Gaussian source at
/// 10 dB: returns the (mean over 50 trials) sup-gaps of `D⁻` to `2Q(t)` and
/// of `D⁺` to `∫G(ρx²/(1+P), t) dF(x)`.
/// Detection-limit gap statistics at `n = 4000`.
///
/// The gate statistic is the sup deviation of the **trial-averaged** curves
/// from their limits: the on-support side has only `k = 200` samples per
/// trial, so the per-trial sup carries an irreducible empirical-process
/// (Kolmogorov–Smirnov) floor of about `0.87/√k ≈ 0.06` that no correct
/// implementation can beat; averaging the curves first suppresses that noise
/// and isolates the systematic gap the limit statement is about. Both
/// statistics are reported.
struct DetectionGaps {
    mean_curve_minus: f64,
    mean_curve_plus: f64,
    per_trial_minus: f64,
    per_trial_plus: f64,
}

fn lemma3_4_detection_limits() -> Result<DetectionGaps, String> {
    let (n, m) = (4000usize, 2400usize);
    let rho = m as f64 / n as f64;
    let spec =
        SourceSpec::new(0.05, DistributionModel::gaussian(0.0, 200.0).map_err(due)?).map_err(due)?;
    let model = spec.resolved_model();
    let p = spec.power();
    let t_grid: Vec<f64> = (0..=100).map(|i| 5.0 * i as f64 / 100.0).collect();
    let ref_minus: Vec<f64> = t_grid.iter().map(|&t| 2.0 * q_tail(t).get()).collect();
    let ref_plus: Vec<f64> = t_grid
        .iter()
        .map(|&t| {
            model.expect(|x| {
                g_detect(rho * x * x / (1.0 + p), t)
                    .expect("nonnegative detector arguments")
                    .get()
            })
        })
        .collect();
    let trials = 50usize;
    let master = 0x4C33u64;
    let mut sum_minus = vec![0.0f64; t_grid.len()];
    let mut sum_plus = vec![0.0f64; t_grid.len()];
    let mut per_trial_minus = 0.0f64;
    let mut per_trial_plus = 0.0f64;
    for t in 0..trials {
        let mut rng = ChaCha12Rng::seed_from_u64(trial_seed(master, t));
        let drawn = draw_source_vector(n, &spec, &mut rng).map_err(due)?;
        let a = gaussian_matrix(m, n, &mut rng);
        let y = measure(&a, &drawn.x, NoiseMode::Standard, &mut rng);
        let x_norm_sq: f64 = drawn.x.iter().map(|v| v * v).sum();
        let scores = normalized_scores(&y, &a, x_norm_sq);
        let curves = detection_curves(&scores, &drawn.pattern, &t_grid);
        per_trial_minus += sup_abs_gap(&curves.d_minus, &ref_minus);
        per_trial_plus += sup_abs_gap(&curves.d_plus, &ref_plus);
        for (acc, v) in sum_minus.iter_mut().zip(&curves.d_minus) {
            *acc += v;
        }
        for (acc, v) in sum_plus.iter_mut().zip(&curves.d_plus) {
            *acc += v;
        }
    }
    let scale = 1.0 / trials as f64;
    for v in sum_minus.iter_mut().chain(sum_plus.iter_mut()) {
        *v *= scale;
    }
    Ok(DetectionGaps {
        mean_curve_minus: sup_abs_gap(&sum_minus, &ref_minus),
        mean_curve_plus: sup_abs_gap(&sum_plus, &ref_plus),
        per_trial_minus: per_trial_minus * scale,
        per_trial_plus: per_trial_plus * scale,
    })
}

fn sup_abs_gap(curve: &[f64], reference: &[f64]) -> f64 {
    curve
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
}

/// Perturbation continuity: adding a fixed `z` to the samples moves any
/// estimator's failure probability by at most `‖z‖` — spot-checked with
/// common random numbers on a desk-scale thresholding experiment.
fn lemma5_perturbation_continuity() -> Result<(bool, String), String> {
    let (n, m, k) = (20usize, 6usize, 5usize);
    let alpha = 0.2;
    let trials = 400usize;
    let master = 0x4C35u64;
    let z_norm = 0.25f64;
    let z = vec![z_norm / (m as f64).sqrt(); m];
    let spec =
        SourceSpec::new(0.25, DistributionModel::gaussian(0.0, 4.0).map_err(due)?).map_err(due)?;
    let mut fail_base = 0usize;
    let mut fail_pert = 0usize;
    for t in 0..trials {
        let mut rng = ChaCha12Rng::seed_from_u64(trial_seed(master, t));
        let drawn = draw_source_vector(n, &spec, &mut rng).map_err(due)?;
        let a = gaussian_matrix(m, n, &mut rng);
        let y = measure(&a, &drawn.x, NoiseMode::Standard, &mut rng);
        let y_pert: Vec<f64> = y.iter().zip(&z).map(|(v, dz)| v + dz).collect();
        let mut rng_a = ChaCha12Rng::seed_from_u64(trial_seed(master ^ 0xA, t));
        let mut rng_b = rng_a.clone();
        let est_base = thresholding(&y, &a, k, &mut rng_a).map_err(due)?;
        let est_pert = thresholding(&y_pert, &a, k, &mut rng_b).map_err(due)?;
        if distortion(&drawn.pattern, &est_base.pattern).map_err(due)? > alpha {
            fail_base += 1;
        }
        if distortion(&drawn.pattern, &est_pert.pattern).map_err(due)? > alpha {
            fail_pert += 1;
        }
    }
    let p_base = fail_base as f64 / trials as f64;
    let p_pert = fail_pert as f64 / trials as f64;
    let diff = (p_base - p_pert).abs();
    Ok((
        diff <= z_norm,
        format!(
            "|P_fail({p_pert:.4}) − P_fail({p_base:.4})| = {diff:.4} ≤ ‖z‖ = {z_norm} over {trials} paired trials"
        ),
    ))
}

/// Entropy rate of the binomial coefficient: `|(1/n)·ln C(n, Ωn) − H(Ω)|`
/// is already below 2% at n = 10⁴ (the gap is `O(ln n / n)`).
fn lemma6_binomial_entropy_rate() -> Result<(bool, String), String> {
    let (n, k) = (10_000u64, 2_000u64);
    let rate = ln_binomial(n, k) / n as f64;
    let gap = (rate - h_nats(0.2)).abs();
    Ok((
        gap < 0.02,
        format!("|(1/n)ln C(10⁴, 2·10³) − H(0.2)| = {gap:.3e} (need < 0.02)"),
    ))
}

/// Analytic chi-square deviation bounds dominate the exact tails on the full
/// grid `d ∈ {1..200} × ε ∈ (0, 3]`.
fn lemma7_tail_domination() -> Result<(bool, String), String> {
    let mut violations = 0usize;
    let mut total = 0usize;
    for d in 1..=200u32 {
        for i in 1..=60 {
            let eps = 0.05 * i as f64;
            let (upper, lower) = chi_square_tail_bounds(d, eps).map_err(due)?;
            let df = f64::from(d);
            let exact_upper = 1.0 - chi_square_cdf(d, (1.0 + eps) * df).map_err(due)?.get();
            let exact_lower = chi_square_cdf(d, df / (1.0 + eps)).map_err(due)?.get();
            total += 2;
            if exact_upper > upper.get() * (1.0 + 1e-12) {
                violations += 1;
            }
            if exact_lower > lower.get() * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    Ok((
        violations == 0,
        format!("{violations}/{total} tail-bound violations on d ∈ 1..200, ε ∈ (0, 3]"),
    ))
}

/// Deterministic floor of the concentration gap:
/// `ℒ(1+x) ≥ ¼·ln(1 + x²/8)` on `x ∈ [0, 100]` at 10⁴ points.
fn lemma8_gap_floor() -> Result<(bool, String), String> {
    let pts = 10_000usize;
    let mut worst = f64::INFINITY;
    for i in 0..pts {
        let x = 100.0 * (i as f64 + 0.5) / pts as f64;
        let lhs = gap_function(1.0 + x).map_err(due)?;
        let rhs = 0.25 * (x * x / 8.0).ln_1p();
        worst = worst.min(lhs - rhs);
    }
    Ok((
        worst >= -1e-12,
        format!("min ℒ(1+x) − ¼ln(1+x²/8) = {worst:.3e} over 10⁴ points (need ≥ 0)"),
    ))
}

/// Endpoint rule for the scaling maximand `θ(x) = −x ln x / ln(1+γx^b)`:
/// the interior supremum stays within 4× of the endpoint values, over 100
/// randomized `(γ, b, α)` draws.
fn lemma9_endpoint_maximand() -> Result<(bool, String), String> {
    let mut rng = ChaCha12Rng::seed_from_u64(0x4C39);
    let mut failures = 0usize;
    for _ in 0..100 {
        let gamma = (rng.gen::<f64>() * (100.0f64.ln() - 0.01f64.ln()) + 0.01f64.ln()).exp();
        let b = 1.0 + 5.0 * rng.gen::<f64>();
        let alpha = (rng.gen::<f64>() * (0.125f64.ln() - 1e-4f64.ln()) + 1e-4f64.ln()).exp();
        if !maxtheta_bound_check(gamma, b, alpha).map_err(due)? {
            failures += 1;
        }
    }
    Ok((
        failures == 0,
        format!("{failures}/100 randomized (γ, b, α) draws violated the endpoint rule"),
    ))
}

/// Counting identity: the number of k-subsets at distortion exactly `l/k`
/// from a fixed k-subset equals `C(k,l)·C(n−k,l)` — full enumeration at
/// n = 16.
fn ambiguity_counting_identity() -> Result<(bool, String), String> {
    let n = 16usize;
    let mut mismatches = 0usize;
    let mut total = 0usize;
    for k in [2usize, 5, 8] {
        // Distortion from the fixed subset {0..k}: (k − overlap)/k.
        let mut counts = vec![0u64; k + 1];
        for_each_k_subset(n, k, |subset| {
            let overlap = subset.iter().filter(|&&i| i < k).count();
            counts[k - overlap] += 1;
        });
        for (l, &count) in counts.iter().enumerate() {
            total += 1;
            let expected = ambiguous_pattern_count(n, k, l);
            if (count as f64 - expected).abs() > 0.5 {
                mismatches += 1;
            }
        }
    }
    Ok((
        mismatches == 0,
        format!("{mismatches}/{total} (k, l) cells disagree with C(k,l)·C(n−k,l) at n = 16"),
    ))
}

/// Block-combination inequality `d(s₁⊎s₂, ŝ₁∪ŝ₂) ≤ Λd₁ + (1−Λ)d₂` over
/// 5000 random disjoint-block instances at n = 20.
fn block_combination_inequality() -> Result<(bool, String), String> {
    let n = 20usize;
    let split = 12usize;
    let mut rng = ChaCha12Rng::seed_from_u64(0x4C3A);
    let mut violations = 0usize;
    for _ in 0..5000 {
        let k1 = rng.gen_range(1..=6usize);
        let l1 = rng.gen_range(1..=6usize);
        let k2 = rng.gen_range(1..=5usize);
        let l2 = rng.gen_range(1..=5usize);
        let s1: Vec<usize> = index_sample(&mut rng, split, k1).into_vec();
        let h1: Vec<usize> = index_sample(&mut rng, split, l1).into_vec();
        let s2: Vec<usize> = index_sample(&mut rng, n - split, k2)
            .into_iter()
            .map(|i| i + split)
            .collect();
        let h2: Vec<usize> = index_sample(&mut rng, n - split, l2)
            .into_iter()
            .map(|i| i + split)
            .collect();
        let pat = |v: Vec<usize>| SparsityPattern::new(v, n).map_err(due);
        let s = pat(s1.iter().chain(&s2).copied().collect())?;
        let s_hat = pat(h1.iter().chain(&h2).copied().collect())?;
        let d = distortion(&s, &s_hat).map_err(due)?;
        let d1 = distortion(&pat(s1.clone())?, &pat(h1.clone())?).map_err(due)?;
        let d2 = distortion(&pat(s2.clone())?, &pat(h2.clone())?).map_err(due)?;
        let lambda = block_combination_weight(k1, l1, k2, l2);
        if d > lambda * d1 + (1.0 - lambda) * d2 + 1e-12 {
            violations += 1;
        }
    }
    Ok((
        violations == 0,
        format!("{violations}/5000 random disjoint-block instances violate the combination bound"),
    ))
}

/// Rate-sharing split weight: the realized per-block weight Λ of a drawn
/// support under the uniform column permutation is within 0.01 of λ at
/// n = 10⁵.
fn rate_sharing_split_ratio() -> Result<(bool, String), String> {
    let n = 100_000usize;
    let lambda = 0.35;
    let omega = 0.2;
    let mut rng = ChaCha12Rng::seed_from_u64(0x4C3B);
    let a = rate_sharing_matrix(lambda, 2e-4, 2e-4, n, &mut rng).map_err(due)?;
    let MatrixKind::RateSharing {
        block1_columns, ..
    } = a.kind()
    else {
        return Err("rate-sharing matrix lost its block structure".into());
    };
    let spec =
        SourceSpec::new(omega, DistributionModel::gaussian(0.0, 1.0).map_err(due)?).map_err(due)?;
    let drawn = draw_source_vector(n, &spec, &mut rng).map_err(due)?;
    // Merge-walk intersection of two sorted index lists.
    let (mut i, mut j, mut k1) = (0usize, 0usize, 0usize);
    let support = drawn.pattern.indices();
    while i < support.len() && j < block1_columns.len() {
        match support[i].cmp(&block1_columns[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                k1 += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let k = support.len();
    let n1 = block1_columns.len();
    let sel1 = ((omega * n1 as f64).round() as usize).max(1);
    let sel2 = ((omega * (n - n1) as f64).round() as usize).max(1);
    let b1 = k1.max(sel1) as f64;
    let b2 = (k - k1).max(sel2) as f64;
    let weight = b1 / (b1 + b2);
    let gap = (weight - lambda).abs();
    Ok((
        gap < 0.01,
        format!("|Λ − λ| = {gap:.4} at n = 10⁵ (Λ = {weight:.4}, λ = {lambda}; need < 0.01)"),
    ))
}

/// Per-instance outcome of one estimator-identity comparison.
struct IdentityTally {
    premise_held: usize,
    violations: usize,
}

/// Prior-weight limits of the optimal Gaussian estimator over ≥200 random
/// instances at (n, m, k) = (12, 8, 3):
///
/// * γ → 1: compared against the nearest-subspace output wherever the NS
///   minimizer is unique;
/// * γ → 0 with equal-magnitude (normalized) columns: compared against the
///   thresholding output wherever the TH maximizer is unique;
///
/// each at every α ∈ {0, 1/3, 2/3}. Violating instances are counted and
/// reported per (limit, α) pair.
pub fn verify_theorem8() -> VerifyReport {
    let (n, m, k) = (12usize, 8usize, 3usize);
    let instances = 200usize;
    let alphas = [0.0, 1.0 / 3.0, 2.0 / 3.0];
    let master = 0x7438u64;
    let spec = SourceSpec::new(0.25, DistributionModel::gaussian(0.0, 4.0).unwrap()).unwrap();

    // (ns_premise, [ns_viol; 3], th_premise, [th_viol; 3]) per instance.
    type InstanceOutcome = Result<(bool, [bool; 3], bool, [bool; 3]), String>;
    let outcomes: Vec<InstanceOutcome> = (0..instances)
        .into_par_iter()
        .map(|t| -> InstanceOutcome {
            let mut rng = ChaCha12Rng::seed_from_u64(trial_seed(master, t));
            let drawn = draw_source_vector(n, &spec, &mut rng).map_err(due)?;
            let a = gaussian_matrix(m, n, &mut rng);
            let y = measure(&a, &drawn.x, NoiseMode::Standard, &mut rng);

            let ns = nearest_subspace(&y, &a, k, &mut rng).map_err(due)?;
            let ns_unique = !ns.tie_broken;
            let mut ns_viol = [false; 3];
            if ns_unique {
                for (i, &alpha) in alphas.iter().enumerate() {
                    let opt =
                        optimal_gaussian(&y, &a, k, 1.0 - 1e-6, alpha, &mut rng).map_err(due)?;
                    ns_viol[i] = opt.pattern != ns.pattern;
                }
            }

            let a_norm = a.column_normalized();
            let th = thresholding(&y, &a_norm, k, &mut rng).map_err(due)?;
            let th_unique = !th.tie_broken;
            let mut th_viol = [false; 3];
            if th_unique {
                for (i, &alpha) in alphas.iter().enumerate() {
                    let opt =
                        optimal_gaussian(&y, &a_norm, k, 1e-6, alpha, &mut rng).map_err(due)?;
                    th_viol[i] = opt.pattern != th.pattern;
                }
            }
            Ok((ns_unique, ns_viol, th_unique, th_viol))
        })
        .collect();

    let mut ns_tallies: Vec<IdentityTally> = (0..3)
        .map(|_| IdentityTally {
            premise_held: 0,
            violations: 0,
        })
        .collect();
    let mut th_tallies: Vec<IdentityTally> = (0..3)
        .map(|_| IdentityTally {
            premise_held: 0,
            violations: 0,
        })
        .collect();
    let mut aborted: Option<String> = None;
    for outcome in outcomes {
        match outcome {
            Ok((ns_unique, ns_viol, th_unique, th_viol)) => {
                for i in 0..3 {
                    if ns_unique {
                        ns_tallies[i].premise_held += 1;
                        ns_tallies[i].violations += usize::from(ns_viol[i]);
                    }
                    if th_unique {
                        th_tallies[i].premise_held += 1;
                        th_tallies[i].violations += usize::from(th_viol[i]);
                    }
                }
            }
            Err(e) => aborted = Some(e),
        }
    }

    let names_ns = [
        "theorem8_ns_identity_alpha_0",
        "theorem8_ns_identity_alpha_1_3",
        "theorem8_ns_identity_alpha_2_3",
    ];
    let names_th = [
        "theorem8_th_identity_alpha_0",
        "theorem8_th_identity_alpha_1_3",
        "theorem8_th_identity_alpha_2_3",
    ];
    let mut checks = Vec::with_capacity(6);
    for (names, tallies, label) in [
        (names_ns, &ns_tallies, "γ → 1 vs nearest subspace"),
        (names_th, &th_tallies, "γ → 0 vs thresholding (normalized columns)"),
    ] {
        for (name, tally) in names.iter().zip(tallies.iter()) {
            let (passed, details) = if let Some(e) = &aborted {
                (false, format!("instance aborted: {e}"))
            } else {
                (
                    tally.violations == 0,
                    format!(
                        "{label}: {} violations on {} premise-holding instances of {instances}",
                        tally.violations, tally.premise_held
                    ),
                )
            };
            checks.push(CheckReport {
                name,
                passed,
                details,
            });
        }
    }
    VerifyReport {
        suite: "theorem8",
        checks,
    }
}

/// Combined lemma + estimator-identity report.
pub fn verify_all() -> VerifyReport {
    let mut checks = verify_lemma_suite().checks;
    checks.extend(verify_theorem8().checks);
    VerifyReport {
        suite: "all",
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_fast_checks_pass() {
        // The purely deterministic checks must pass outright.
        for (name, f) in [
            (
                "lemma6",
                lemma6_binomial_entropy_rate as fn() -> Result<(bool, String), String>,
            ),
            ("lemma7", lemma7_tail_domination),
            ("lemma8", lemma8_gap_floor),
            ("lemma9", lemma9_endpoint_maximand),
            ("counting", ambiguity_counting_identity),
            ("blocks", block_combination_inequality),
        ] {
            let (passed, details) = f().unwrap();
            assert!(passed, "{name} failed: {details}");
        }
    }

    #[test]
    fn split_ratio_check_passes() {
        let (passed, details) = rate_sharing_split_ratio().unwrap();
        assert!(passed, "{details}");
    }

    #[test]
    fn report_rendering() {
        let report = VerifyReport {
            suite: "demo",
            checks: vec![
                CheckReport {
                    name: "ok_check",
                    passed: true,
                    details: "fine".into(),
                },
                CheckReport {
                    name: "bad_check",
                    passed: false,
                    details: "broken".into(),
                },
            ],
        };
        assert!(!report.all_passed());
        let text = report.render();
        assert!(text.contains("[PASS] ok_check: fine"));
        assert!(text.contains("[FAIL] bad_check: broken"));
    }
}
