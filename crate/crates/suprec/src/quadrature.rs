//! Numerical integration: a cached Gauss–Hermite rule for expectations under
//! Gaussian laws, and adaptive Simpson for everything with a finite interval.
//!
//! Gauss–Hermite with `N = 128` nodes integrates polynomials of degree up to
//! `2N − 1 = 255` exactly against `e^{−x²}`, far beyond what any expectation
//! in this crate requires; the practical accuracy limit for the smooth
//! integrands used here is f64 round-off. Nodes and weights are computed once
//! on first use (Newton refinement of asymptotic root estimates, Christoffel
//! weights from the orthonormal recurrence) and cached for the process
//! lifetime, so callers can treat [`gaussian_expectation`] as a cheap scalar
//! routine.

use std::sync::OnceLock;

/// Number of Gauss–Hermite nodes. Even, so the rule is symmetric about 0 with
/// no node at the origin.
const GH_POINTS: usize = 128;

/// A Gauss–Hermite quadrature rule: nodes `uᵢ` and weights `wᵢ` such that
/// `∫ f(x) e^{−x²} dx ≈ Σ wᵢ f(uᵢ)`.
#[derive(Debug)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static GH_RULE: OnceLock<GaussHermite> = OnceLock::new();

impl GaussHermite {
    /// The shared 128-point rule.
    pub fn shared() -> &'static GaussHermite {
        GH_RULE.get_or_init(|| GaussHermite::with_points(GH_POINTS))
    }

    /// Builds an `n`-point rule. Nodes are found by Newton iteration on the
    /// orthonormal Hermite polynomial `h̃_n` (recurrence
    /// `h̃_{k+1}(x) = x√(2/(k+1))·h̃_k(x) − √(k/(k+1))·h̃_{k−1}(x)`,
    /// `h̃₀ = π^{−1/4}`), starting from the classical asymptotic estimates for
    /// the largest roots and marching inward. Weights are the Christoffel
    /// numbers `wᵢ = 1 / Σ_{k<n} h̃_k(uᵢ)²`.
    fn with_points(n: usize) -> Self {
        assert!(n >= 2 && n % 2 == 0, "rule size must be even and ≥ 2");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n / 2;
        // Positive roots in decreasing order.
        let mut pos = vec![0.0f64; half];
        for i in 0..half {
            let mut z = match i {
                0 => {
                    let c = (2.0 * n as f64 + 1.0).sqrt();
                    c - 1.85575 * c.powf(-1.0 / 3.0)
                }
                1 => pos[0] - 1.14 * (n as f64).powf(0.426) / pos[0],
                2 => 1.86 * pos[1] - 0.86 * pos[0],
                3 => 1.91 * pos[2] - 0.91 * pos[1],
                _ => 2.0 * pos[i - 1] - pos[i - 2],
            };
            // Newton: h̃_n'(x) = √(2n)·h̃_{n−1}(x).
            for _ in 0..64 {
                let (hn, hn_prev) = eval_orthonormal_hermite(n, z);
                let deriv = (2.0 * n as f64).sqrt() * hn_prev;
                let step = hn / deriv;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            pos[i] = z;
        }
        for i in 0..half {
            let z = pos[i];
            let w = 1.0 / christoffel_sum(n, z);
            // Store symmetric pairs; index from the outside in.
            nodes[i] = -z;
            weights[i] = w;
            nodes[n - 1 - i] = z;
            weights[n - 1 - i] = w;
        }
        GaussHermite { nodes, weights }
    }

    /// Quadrature nodes in increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights matching [`nodes`](Self::nodes).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f(x) e^{−x²} dx` over the whole line.
    pub fn integrate_weighted(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

/// Evaluates `(h̃_n(x), h̃_{n−1}(x))` by the orthonormal three-term recurrence.
fn eval_orthonormal_hermite(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `Σ_{k<n} h̃_k(x)²`, the reciprocal Christoffel function.
fn christoffel_sum(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut sum = cur * cur;
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        sum += cur * cur;
    }
    sum
}

/// `E[f(X)]` for `X ~ N(mean, variance)` by the shared Gauss–Hermite rule:
/// substituting `x = mean + √(2·variance)·u` gives
/// `E[f(X)] = π^{−1/2} Σ wᵢ f(mean + √(2·variance)·uᵢ)`.
///
/// `variance = 0` degenerates to `f(mean)` exactly.
///
/// # Examples
///
/// ```
/// use suprec::quadrature::gaussian_expectation;
/// let second_moment = gaussian_expectation(1.0, 4.0, |x| x * x);
/// assert!((second_moment - 5.0).abs() < 1e-12);
/// ```
pub fn gaussian_expectation(mean: f64, variance: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    debug_assert!(variance >= 0.0, "variance must be nonnegative");
    if variance == 0.0 {
        return f(mean);
    }
    let scale = (2.0 * variance).sqrt();
    GaussHermite::shared().integrate_weighted(|u| f(mean + scale * u))
        / std::f64::consts::PI.sqrt()
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`, with Richardson extrapolation `S₂ + (S₂ − S₁)/15` on accepted
/// panels. Recursion is capped at depth 50 (panel width `(b−a)·2⁻⁵⁰`), past
/// which the current panel estimate is accepted — integrable endpoint
/// singularities thus converge instead of hanging.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson_panel(a, b, fa, fm, fb);
    simpson_recurse(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[inline]
fn simpson_panel(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson_panel(a, m, fa, flm, fm);
    let right = simpson_panel(m, b, fm, frm, fb);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
        return refined + (refined - whole) / 15.0;
    }
    simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
