//! Statistical utilities for the Monte Carlo harness: goodness-of-fit
//! testing, binomial confidence intervals, and the logistic fit that locates
//! a phase transition's 50% crossing.

/// One-sample Kolmogorov–Smirnov test against a fully specified continuous
/// CDF.
///
/// Returns `(D, p)`: the statistic `D = sup_x |F_n(x) − F(x)|` and the
/// asymptotic tail probability of the Kolmogorov distribution evaluated at
/// the finite-sample-corrected argument `(√n + 0.12 + 0.11/√n)·D`, which
/// keeps the p-value accurate down to a few dozen samples.
///
/// # Panics
///
/// `samples` must be nonempty and sorted ascending.
pub fn ks_test_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    assert!(!samples.is_empty(), "KS test needs at least one sample");
    debug_assert!(
        samples.windows(2).all(|w| w[0] <= w[1]),
        "KS samples must be sorted ascending"
    );
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let below = (f - i as f64 / n).abs();
        let above = (f - (i as f64 + 1.0) / n).abs();
        d = d.max(below).max(above);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    (d, kolmogorov_tail(lambda))
}

/// Kolmogorov distribution tail `Pr{K > λ} = 2·Σ_{j≥1} (−1)^{j−1} e^{−2j²λ²}`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100u32 {
        let jf = f64::from(j);
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Wilson score interval at 95% two-sided confidence for a binomial
/// proportion with `successes` out of `trials`.
///
/// # Panics
///
/// Requires `trials ≥ 1` and `successes ≤ trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    assert!(trials >= 1, "Wilson interval needs at least one trial");
    assert!(successes <= trials, "more successes than trials");
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundary counts the interval endpoint is exactly the boundary;
    // the algebra above only reaches it up to rounding.
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Maximum-likelihood logistic fit `Pr{success} = σ(a + b·(x − x̄))` to
/// binomial observations `(x, successes, trials)`, returning the abscissa of
/// the 50% crossing, `x̄ − a/b`.
///
/// A tiny ridge penalty keeps the optimum finite under complete separation.
/// Returns `None` when the fit degenerates (non-finite parameters, or a
/// non-increasing fitted curve `b ≤ 0`, under which a 50% crossing is
/// meaningless for a transition that should sharpen upward).
pub fn logistic_half_crossing(points: &[(f64, usize, usize)]) -> Option<f64> {
    let total: usize = points.iter().map(|&(_, _, t)| t).sum();
    if total == 0 {
        return None;
    }
    let x_bar = points
        .iter()
        .map(|&(x, _, t)| x * t as f64)
        .sum::<f64>()
        / total as f64;
    const RIDGE: f64 = 1e-6;
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (mut g0, mut g1) = (-RIDGE * a, -RIDGE * b);
        let (mut h00, mut h01, mut h11) = (RIDGE, 0.0, RIDGE);
        for &(x, s, t) in points {
            if t == 0 {
                continue;
            }
            let xc = x - x_bar;
            let p = 1.0 / (1.0 + (-(a + b * xc)).exp());
            let resid = s as f64 - t as f64 * p;
            g0 += resid;
            g1 += resid * xc;
            let w = t as f64 * p * (1.0 - p);
            h00 += w;
            h01 += w * xc;
            h11 += w * xc * xc;
        }
        let det = h00 * h11 - h01 * h01;
        if !det.is_finite() || det.abs() < 1e-300 {
            return None;
        }
        let da = (g0 * h11 - g1 * h01) / det;
        let db = (h00 * g1 - h01 * g0) / det;
        a += da;
        b += db;
        if !(a.is_finite() && b.is_finite()) {
            return None;
        }
        if da.abs().max(db.abs()) < 1e-12 {
            break;
        }
    }
    if !(b > 0.0) || !a.is_finite() {
        return None;
    }
    Some(x_bar - a / b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn ks_statistic_hand_value() {
        // Three samples against Uniform[0,1]: D computed by hand.
        let samples = [0.1, 0.4, 0.8];
        let (d, p) = ks_test_statistic(&samples, |x| x.clamp(0.0, 1.0));
        // Gaps: |0.1−0|, |0.1−1/3|, |0.4−1/3|, |0.4−2/3|, |0.8−2/3|, |0.8−1|.
        assert!((d - (0.4 - 1.0 / 3.0f64).max(1.0 / 3.0 - 0.1).max(2.0 / 3.0 - 0.4)).abs() < 1e-15);
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn ks_accepts_true_law_rejects_shifted() {
        let mut rng = ChaCha12Rng::seed_from_u64(101);
        let mut samples: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
        samples.sort_by(f64::total_cmp);
        let (_, p_true) = ks_test_statistic(&samples, |x| x.clamp(0.0, 1.0));
        assert!(p_true > 0.01, "true law rejected: p = {p_true}");
        let (_, p_wrong) = ks_test_statistic(&samples, |x| (x * x).clamp(0.0, 1.0));
        assert!(p_wrong < 1e-6, "wrong law accepted: p = {p_wrong}");
    }

    #[test]
    fn ks_p_value_calibration() {
        // Under H0 the p-value is approximately Uniform[0,1]: its mean over
        // repeated experiments should be near 1/2.
        let mut rng = ChaCha12Rng::seed_from_u64(103);
        let reps = 400;
        let mean_p: f64 = (0..reps)
            .map(|_| {
                let mut s: Vec<f64> = (0..100).map(|_| rng.gen::<f64>()).collect();
                s.sort_by(f64::total_cmp);
                ks_test_statistic(&s, |x| x.clamp(0.0, 1.0)).1
            })
            .sum::<f64>()
            / reps as f64;
        assert!(
            (mean_p - 0.5).abs() < 0.06,
            "p-values off-calibration: mean {mean_p}"
        );
    }

    #[test]
    fn wilson_interval_properties() {
        let (lo, hi) = wilson_interval(8, 10);
        assert!(lo < 0.8 && 0.8 < hi);
        assert!(lo > 0.4 && hi < 0.98);
        let (lo0, hi0) = wilson_interval(0, 50);
        assert_eq!(lo0, 0.0);
        assert!(hi0 > 0.0 && hi0 < 0.12);
        let (lo1, hi1) = wilson_interval(50, 50);
        assert_eq!(hi1, 1.0);
        assert!(lo1 > 0.88);
        // Monotone in the success count.
        let mut prev = (0.0, 0.0);
        for s in 0..=20 {
            let iv = wilson_interval(s, 20);
            assert!(iv.0 >= prev.0 && iv.1 >= prev.1);
            prev = iv;
        }
    }

    #[test]
    fn logistic_recovers_synthetic_crossing() {
        // p(x) = σ(4(x − 1.5)): crossing at exactly 1.5.
        let mut rng = ChaCha12Rng::seed_from_u64(105);
        let points: Vec<(f64, usize, usize)> = (0..15)
            .map(|i| {
                let x = 0.5 + 2.0 * i as f64 / 14.0;
                let p = 1.0 / (1.0 + (-4.0 * (x - 1.5)).exp());
                let t = 400;
                let s = (0..t).filter(|_| rng.gen::<f64>() < p).count();
                (x, s, t)
            })
            .collect();
        let crossing = logistic_half_crossing(&points).expect("fit succeeds");
        assert!(
            (crossing - 1.5).abs() < 0.05,
            "crossing {crossing} should be near 1.5"
        );
    }

    #[test]
    fn logistic_handles_separation_and_degeneracy() {
        // Complete separation: ridge keeps the optimum finite and the
        // crossing lands between the two clusters.
        let points = [(0.0, 0, 50), (0.2, 0, 50), (0.8, 50, 50), (1.0, 50, 50)];
        let crossing = logistic_half_crossing(&points).expect("separated fit succeeds");
        assert!((0.2..=0.8).contains(&crossing), "crossing {crossing}");
        // Decreasing data: no upward transition to report.
        let decreasing = [(0.0, 50, 50), (1.0, 0, 50)];
        assert_eq!(logistic_half_crossing(&decreasing), None);
        assert_eq!(logistic_half_crossing(&[]), None);
        assert_eq!(logistic_half_crossing(&[(1.0, 0, 0)]), None);
    }
}
