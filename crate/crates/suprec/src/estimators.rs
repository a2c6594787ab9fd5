//! The support-distortion metric and the three sparsity-pattern estimators.
//!
//! All three estimators return a support of prescribed size `k` and randomize
//! uniformly over exact score ties, reporting when they did:
//!
//! * **Nearest subspace** (`NS`): exhaustive search for the k-subset whose
//!   column span leaves the smallest projection residual — the
//!   maximum-likelihood rule for an unknown deterministic signal.
//! * **Thresholding** (`TH`): the `k` largest correlations `|⟨A_i, y⟩|` — a
//!   single-pass rule that never compares subsets jointly.
//! * **Optimal Gaussian** (`OPT`): for a Gaussian signal prior, `y` is
//!   centered Gaussian with covariance `Σ_s = γ·A_s·A_sᵀ + (1−γ)·I` given the
//!   support `s`; the estimator maximizes the posterior mass of the
//!   α-ball around each candidate, `Σ_{d(s,s′)≤α} exp ψ(s′)` with
//!   `ψ(s) = −½(yᵀΣ_s⁻¹y + ln|Σ_s|)`.
//!
//! The exhaustive searches are deliberately desk-scale: a hard budget of
//! `C(n,k) ≤ 10⁷` subsets is enforced rather than approximated around.
//!
//! Numerical conventions documented once here: NS residuals within relative
//! `1e-12` of the minimum count as tied; TH ties require exact equality of
//! boundary magnitudes; OPT ball scores within `1e-12·max(1,|best|)` in the
//! log domain are re-compared term by term (largest `ψ` first), because a
//! log-sum-exp cannot resolve summands more than ~36 nats below its maximum,
//! while the term-wise order is exact.

use crate::linalg::Cholesky;
use crate::math::{binomial_f64, log_sum_exp};
use crate::sampling::SamplingMatrix;
use rand::Rng;
use thiserror::Error;

/// Exhaustive-search budget: subset enumerations beyond this size are
/// rejected rather than attempted.
pub const SUBSET_BUDGET: f64 = 1e7;

/// Relative tolerance under which two NS residuals count as tied.
const NS_TIE_REL_TOL: f64 = 1e-12;

/// Absolute log-domain tolerance (scaled by `max(1, |best|)`) under which two
/// OPT ball scores count as tied.
const OPT_TIE_TOL: f64 = 1e-12;

/// Errors from estimator construction and execution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    /// A subset enumeration would exceed [`SUBSET_BUDGET`].
    #[error(
        "C({n}, {k}) ≈ {subsets:.3e} exceeds the exhaustive-search budget {budget:.0e}; \
         use thresholding at this scale"
    )]
    BudgetExceeded {
        n: usize,
        k: usize,
        subsets: f64,
        budget: f64,
    },
    /// A pattern violated its structural invariants.
    #[error("invalid sparsity pattern: {reason}")]
    InvalidPattern { reason: String },
    /// Operand shapes or parameter domains are incompatible.
    #[error("{context}")]
    Incompatible { context: String },
}

/// A support set: strictly increasing indices in `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsityPattern {
    indices: Vec<usize>,
    n: usize,
}

impl SparsityPattern {
    /// Validates strict ordering and range.
    pub fn from_sorted(indices: Vec<usize>, n: usize) -> Result<Self, EstimatorError> {
        for pair in indices.windows(2) {
            if pair[0] >= pair[1] {
                return Err(EstimatorError::InvalidPattern {
                    reason: format!("indices not strictly increasing at {} ≥ {}", pair[0], pair[1]),
                });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(EstimatorError::InvalidPattern {
                    reason: format!("index {last} outside [0, {n})"),
                });
            }
        }
        Ok(SparsityPattern { indices, n })
    }

    /// Sorts, then validates uniqueness and range.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self, EstimatorError> {
        indices.sort_unstable();
        Self::from_sorted(indices, n)
    }

    /// The support of a dense vector.
    pub fn support_of(x: &[f64]) -> SparsityPattern {
        let indices = x
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        SparsityPattern {
            indices,
            n: x.len(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Ambient dimension `n`.
    pub fn ambient_len(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `|self ∩ other|` by a sorted merge walk.
    pub fn intersection_size(&self, other: &SparsityPattern) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Sorted union of the two index sets.
    pub fn union(&self, other: &SparsityPattern) -> SparsityPattern {
        let mut indices: Vec<usize> = self
            .indices
            .iter()
            .chain(&other.indices)
            .copied()
            .collect();
        indices.sort_unstable();
        indices.dedup();
        SparsityPattern {
            indices,
            n: self.n.max(other.n),
        }
    }
}

/// Support distortion `d(s, ŝ) = 1 − |s ∩ ŝ| / max(|s|, |ŝ|)`: the larger of
/// the missed-detection and false-alarm fractions. A metric on the nonempty
/// subsets of `[0, n)`.
///
/// # Errors
///
/// The patterns must share the ambient dimension and must not both be empty.
///
/// # Examples
///
/// ```
/// use suprec::estimators::{distortion, SparsityPattern};
/// let s = SparsityPattern::from_sorted(vec![1, 2, 3, 4], 10).unwrap();
/// let s_hat = SparsityPattern::from_sorted(vec![1, 2, 3, 5], 10).unwrap();
/// assert_eq!(distortion(&s, &s_hat).unwrap(), 0.25);
/// ```
pub fn distortion(s: &SparsityPattern, s_hat: &SparsityPattern) -> Result<f64, EstimatorError> {
    if s.ambient_len() != s_hat.ambient_len() {
        return Err(EstimatorError::Incompatible {
            context: format!(
                "distortion over mismatched ambient dimensions {} and {}",
                s.ambient_len(),
                s_hat.ambient_len()
            ),
        });
    }
    let denom = s.len().max(s_hat.len());
    if denom == 0 {
        return Err(EstimatorError::Incompatible {
            context: "distortion of two empty patterns is undefined".into(),
        });
    }
    Ok(1.0 - s.intersection_size(s_hat) as f64 / denom as f64)
}

/// Number of k-subsets at distortion exactly `l/k` from a fixed k-subset in
/// ambient dimension `n`: `C(k, l)·C(n−k, l)` (drop `l` true indices, add `l`
/// spurious ones).
pub fn ambiguous_pattern_count(n: usize, k: usize, l: usize) -> f64 {
    binomial_f64(k as u64, l as u64) * binomial_f64((n - k) as u64, l as u64)
}

/// The weight `Λ` in the block-combination inequality
/// `d(s₁⊎s₂, ŝ₁∪ŝ₂) ≤ Λ·d(s₁,ŝ₁) + (1−Λ)·d(s₂,ŝ₂)`:
/// `Λ = max(|s₁|,|ŝ₁|) / (max(|s₁|,|ŝ₁|) + max(|s₂|,|ŝ₂|))`.
pub fn block_combination_weight(
    s1_len: usize,
    s1_hat_len: usize,
    s2_len: usize,
    s2_hat_len: usize,
) -> f64 {
    let m1 = s1_len.max(s1_hat_len) as f64;
    let m2 = s2_len.max(s2_hat_len) as f64;
    m1 / (m1 + m2)
}

/// Outcome of an estimator run.
#[derive(Debug, Clone)]
pub struct EstimateResult {
    /// The selected support, always of the requested cardinality.
    pub pattern: SparsityPattern,
    /// The winning objective value (squared residual for NS, correlation
    /// energy `‖A_ŝᵀy‖²` for TH, log ball mass for OPT).
    pub score: f64,
    /// Whether the selection required a uniform random tie-break.
    pub tie_broken: bool,
    /// How many candidates shared the winning score (1 when no tie).
    pub num_tied: usize,
}

/// Squared projection residual `‖y − Π_{span(A_s)} y‖²` for the columns
/// selected by `pattern`, together with a full-rank flag. A numerically
/// rank-deficient submatrix is projected onto the column space it actually
/// spans and flagged `false`.
///
/// # Panics
///
/// Requires `|s| ≤ m` and `y.len() = m`.
pub fn residual_norm_sq(y: &[f64], a: &SamplingMatrix, pattern: &SparsityPattern) -> (f64, bool) {
    assert!(
        pattern.len() <= a.rows(),
        "residual of more columns than rows"
    );
    let basis = a.entries().gather_columns(pattern.indices());
    let (res, rank) = crate::linalg::projection_residual_sq(&basis, y);
    (res, rank == pattern.len())
}

/// Calls `f` on every k-subset of `[0, n)` in lexicographic order.
pub(crate) fn for_each_k_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance: rightmost position that can still move.
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn check_budget(n: usize, k: usize) -> Result<(), EstimatorError> {
    let subsets = binomial_f64(n as u64, k as u64);
    if subsets > SUBSET_BUDGET {
        return Err(EstimatorError::BudgetExceeded {
            n,
            k,
            subsets,
            budget: SUBSET_BUDGET,
        });
    }
    Ok(())
}

/// Uniform choice among tied candidates; returns the index chosen.
fn break_ties(count: usize, rng: &mut impl Rng) -> usize {
    if count == 1 {
        0
    } else {
        rng.gen_range(0..count)
    }
}

/// Nearest-subspace estimator: the k-subset minimizing the projection
/// residual `‖y − Π_{span(A_s)} y‖`, found by exhaustive enumeration.
/// Residuals within relative `1e-12` of the minimum are tied and resolved
/// uniformly at random.
///
/// # Errors
///
/// Requires `1 ≤ k ≤ min(m, n)` (the residual needs at least one degree of
/// freedom left) and `C(n,k)` within [`SUBSET_BUDGET`].
pub fn nearest_subspace(
    y: &[f64],
    a: &SamplingMatrix,
    k: usize,
    rng: &mut impl Rng,
) -> Result<EstimateResult, EstimatorError> {
    let (m, n) = (a.rows(), a.cols());
    if !(k <= m && k <= n) {
        return Err(EstimatorError::Incompatible {
            context: format!("nearest subspace needs k ≤ min(m, n), got k={k}, m={m}, n={n}"),
        });
    }
    check_budget(n, k)?;
    let mut best = f64::INFINITY;
    let mut ties: Vec<(Vec<usize>, f64)> = Vec::new();
    for_each_k_subset(n, k, |subset| {
        let basis = a.entries().gather_columns(subset);
        let (res, _) = crate::linalg::projection_residual_sq(&basis, y);
        if res < best {
            best = res;
            ties.retain(|&(_, r)| r <= best * (1.0 + NS_TIE_REL_TOL));
        }
        if res <= best * (1.0 + NS_TIE_REL_TOL) {
            ties.push((subset.to_vec(), res));
        }
    });
    let num_tied = ties.len();
    let chosen = break_ties(num_tied, rng);
    let (indices, score) = ties.swap_remove(chosen);
    Ok(EstimateResult {
        pattern: SparsityPattern::from_sorted(indices, n).expect("enumeration is sorted"),
        score,
        tie_broken: num_tied > 1,
        num_tied,
    })
}

/// Thresholding estimator: the `k` indices with the largest correlation
/// magnitudes `|⟨A_i, y⟩|`. Indices sharing the boundary magnitude exactly
/// are resolved uniformly at random.
///
/// # Errors
///
/// Requires `k ≤ n`.
pub fn thresholding(
    y: &[f64],
    a: &SamplingMatrix,
    k: usize,
    rng: &mut impl Rng,
) -> Result<EstimateResult, EstimatorError> {
    let n = a.cols();
    if k > n {
        return Err(EstimatorError::Incompatible {
            context: format!("thresholding needs k ≤ n, got k={k}, n={n}"),
        });
    }
    let z = a.entries().transpose_mul_vec(y);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| z[j].abs().total_cmp(&z[i].abs()).then(i.cmp(&j)));
    let mut indices: Vec<usize>;
    let mut tie_broken = false;
    let mut num_tied = 1;
    if k == 0 {
        indices = Vec::new();
    } else {
        let boundary_mag = z[order[k - 1]].abs();
        let mut above: Vec<usize> = Vec::with_capacity(k);
        let mut boundary: Vec<usize> = Vec::new();
        for &i in &order {
            let mag = z[i].abs();
            if mag > boundary_mag {
                above.push(i);
            } else if mag == boundary_mag {
                boundary.push(i);
            } else {
                break;
            }
        }
        let need = k - above.len();
        if boundary.len() > need {
            tie_broken = true;
            num_tied = boundary.len();
            let picked = rand::seq::index::sample(rng, boundary.len(), need);
            indices = above;
            indices.extend(picked.iter().map(|p| boundary[p]));
        } else {
            indices = above;
            indices.extend(boundary);
        }
    }
    let score: f64 = indices.iter().map(|&i| z[i] * z[i]).sum();
    Ok(EstimateResult {
        pattern: SparsityPattern::new(indices, n).expect("selected indices are distinct"),
        score,
        tie_broken,
        num_tied,
    })
}

/// Normalized correlation scores
/// `Z_i = √(n / (m·(1 + ‖x‖²/n)))·⟨A_i, y⟩`.
///
/// Under the i.i.d. `N(0, 1/n)` matrix law the off-support scores are
/// asymptotically standard normal, which is the calibration the detection
/// curves rely on.
pub fn normalized_scores(y: &[f64], a: &SamplingMatrix, x_norm_sq: f64) -> Vec<f64> {
    let (m, n) = (a.rows() as f64, a.cols() as f64);
    let factor = (n / (m * (1.0 + x_norm_sq / n))).sqrt();
    a.entries()
        .transpose_mul_vec(y)
        .into_iter()
        .map(|v| factor * v)
        .collect()
}

/// Empirical detection curves of a score vector against a threshold grid.
#[derive(Debug, Clone)]
pub struct DetectionCurves {
    /// Ascending threshold grid.
    pub t_grid: Vec<f64>,
    /// `D⁻(t)`: fraction of off-support scores with `|Z| > t` (nonincreasing).
    pub d_minus: Vec<f64>,
    /// `D⁺(t)`: fraction of on-support scores with `|Z| < t` (nondecreasing).
    pub d_plus: Vec<f64>,
    /// `inf_t max{((n−k)/k)·D⁻(t), D⁺(t)}`, evaluated exactly over all
    /// breakpoints of the empirical curves (not just the grid): the best
    /// distortion any magnitude threshold can achieve on this instance.
    pub success_value: f64,
}

/// Computes the miss/false-alarm trade-off of magnitude thresholding on one
/// score vector.
///
/// # Panics
///
/// The grid must be sorted ascending; the pattern must be nonempty and not
/// full (both sides of the support must exist).
pub fn detection_curves(
    scores: &[f64],
    pattern: &SparsityPattern,
    t_grid: &[f64],
) -> DetectionCurves {
    assert!(
        t_grid.windows(2).all(|w| w[0] <= w[1]),
        "threshold grid must be ascending"
    );
    let n = scores.len();
    let k = pattern.len();
    assert!(k > 0 && k < n, "need scores on and off the support");
    let mut on: Vec<f64> = pattern.indices().iter().map(|&i| scores[i].abs()).collect();
    let mut off: Vec<f64> = Vec::with_capacity(n - k);
    let mut next = pattern.indices().iter().peekable();
    for (i, &z) in scores.iter().enumerate() {
        if next.peek() == Some(&&i) {
            next.next();
        } else {
            off.push(z.abs());
        }
    }
    on.sort_by(f64::total_cmp);
    off.sort_by(f64::total_cmp);
    let frac_off_above = |t: f64| {
        let pos = off.partition_point(|&v| v <= t);
        (off.len() - pos) as f64 / off.len() as f64
    };
    let frac_on_below = |t: f64| on.partition_point(|&v| v < t) as f64 / on.len() as f64;
    let d_minus: Vec<f64> = t_grid.iter().map(|&t| frac_off_above(t)).collect();
    let d_plus: Vec<f64> = t_grid.iter().map(|&t| frac_on_below(t)).collect();
    // Exact infimum: the objective is piecewise constant with breakpoints at
    // the score magnitudes; it can also dip exactly AT a magnitude, where
    // both strict inequalities exclude the point.
    let ratio = (n - k) as f64 / k as f64;
    let objective = |t: f64| (ratio * frac_off_above(t)).max(frac_on_below(t));
    let mut candidates: Vec<f64> = on.iter().chain(off.iter()).copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut best = objective(0.0);
    for (i, &v) in candidates.iter().enumerate() {
        best = best.min(objective(v));
        let above = if i + 1 < candidates.len() {
            0.5 * (v + candidates[i + 1])
        } else {
            v + 1.0
        };
        best = best.min(objective(above));
    }
    DetectionCurves {
        t_grid: t_grid.to_vec(),
        d_minus,
        d_plus,
        success_value: best,
    }
}

/// Flat bitmask array: subset `i` occupies words `[i·w, (i+1)·w)`.
struct SubsetMasks {
    words: Vec<u64>,
    words_per_subset: usize,
}

impl SubsetMasks {
    fn new(n: usize) -> Self {
        SubsetMasks {
            words: Vec::new(),
            words_per_subset: n.div_ceil(64),
        }
    }

    fn push(&mut self, subset: &[usize]) {
        let start = self.words.len();
        self.words.resize(start + self.words_per_subset, 0);
        for &i in subset {
            self.words[start + i / 64] |= 1u64 << (i % 64);
        }
    }

    fn len(&self) -> usize {
        self.words.len() / self.words_per_subset
    }

    fn intersection(&self, i: usize, j: usize) -> u32 {
        let w = self.words_per_subset;
        (0..w)
            .map(|b| (self.words[i * w + b] & self.words[j * w + b]).count_ones())
            .sum()
    }
}

/// Optimal estimator under a Gaussian signal prior: maximizes the posterior
/// mass of the α-ball, `Σ_{s′: d(s,s′) ≤ α} exp ψ(s′)` with
/// `ψ(s) = −½(yᵀΣ_s⁻¹y + ln|Σ_s|)` and `Σ_s = γ·A_s·A_sᵀ + (1−γ)·I`.
///
/// `γ ∈ (0, 1)` is the prior's signal-versus-noise weight: `γ → 1` trusts the
/// subspace geometry (the regime where NS is recovered at `α = 0`), `γ → 0`
/// flattens the prior toward pure correlation (the regime where TH is
/// recovered when columns share one magnitude).
///
/// Each `ψ` is computed once (one Cholesky per subset); ball sums use
/// log-sum-exp. Candidates tied within `1e-12·max(1, |best|)` in the log
/// domain are re-compared by their sorted ball terms, largest first — the
/// exact order of two sums whose difference falls below log-sum-exp
/// resolution — and only then randomized.
///
/// # Errors
///
/// Requires `k ≤ n`, `γ ∈ (0,1)` exclusive, `α ∈ [0,1]`, `C(n,k)` within
/// [`SUBSET_BUDGET`], and (for `α > 0`, whose ball scan is quadratic in the
/// subset count) `C(n,k) ≤ 65 536`.
pub fn optimal_gaussian(
    y: &[f64],
    a: &SamplingMatrix,
    k: usize,
    gamma: f64,
    alpha: f64,
    rng: &mut impl Rng,
) -> Result<EstimateResult, EstimatorError> {
    let n = a.cols();
    if k > n {
        return Err(EstimatorError::Incompatible {
            context: format!("optimal estimator needs k ≤ n, got k={k}, n={n}"),
        });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(EstimatorError::Incompatible {
            context: format!("gamma must lie strictly inside (0,1), got {gamma}"),
        });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(EstimatorError::Incompatible {
            context: format!("alpha must lie in [0,1], got {alpha}"),
        });
    }
    check_budget(n, k)?;
    let subsets_estimate = binomial_f64(n as u64, k as u64);
    if alpha > 0.0 && subsets_estimate > 65_536.0 {
        return Err(EstimatorError::BudgetExceeded {
            n,
            k,
            subsets: subsets_estimate,
            budget: 65_536.0,
        });
    }

    // Pass 1: ψ once per subset.
    let mut psi: Vec<f64> = Vec::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut masks = SubsetMasks::new(n);
    let mut chol_failure = None;
    for_each_k_subset(n, k, |subset| {
        if chol_failure.is_some() {
            return;
        }
        let cols = a.entries().gather_columns(subset);
        let sigma = cols.scaled_gram_aat(gamma, 1.0 - gamma);
        match Cholesky::new(&sigma) {
            Ok(chol) => {
                psi.push(-0.5 * (chol.quadratic_form(y) + chol.ln_det()));
                subsets.push(subset.to_vec());
                masks.push(subset);
            }
            Err(err) => chol_failure = Some(err),
        }
    });
    if let Some(err) = chol_failure {
        return Err(EstimatorError::Incompatible {
            context: format!("covariance factorization failed: {err} (γ too close to 1?)"),
        });
    }
    let t = psi.len();
    debug_assert_eq!(t, masks.len());

    // Pass 2: ball mass per subset. The α = 0 ball is the singleton.
    let ball_terms = |i: usize| -> Vec<f64> {
        if alpha == 0.0 || k == 0 {
            return vec![psi[i]];
        }
        // d(s, s') = 1 − |s ∩ s'|/k ≤ α  ⟺  |s ∩ s'| ≥ k·(1−α).
        let min_inter = (k as f64 * (1.0 - alpha) - 1e-12).ceil() as u32;
        // Intersection-count table vs. streaming popcounts is a memory/time
        // trade; at these sizes recomputing the popcount per pair is cheap
        // and allocation-free.
        (0..t)
            .filter(|&j| masks.intersection(i, j) >= min_inter)
            .map(|j| psi[j])
            .collect()
    };
    let scores: Vec<f64> = (0..t).map(|i| log_sum_exp(&ball_terms(i))).collect();
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = OPT_TIE_TOL * best.abs().max(1.0);
    let mut tied: Vec<usize> = (0..t).filter(|&i| scores[i] >= best - tol).collect();

    // Term-wise refinement of log-domain ties: compare sorted ball terms
    // lexicographically, largest first.
    if tied.len() > 1 {
        let mut term_lists: Vec<(usize, Vec<f64>)> = tied
            .iter()
            .map(|&i| {
                let mut terms = ball_terms(i);
                terms.sort_by(|a, b| b.total_cmp(a));
                (i, terms)
            })
            .collect();
        let dominant = |a: &[f64], b: &[f64]| -> std::cmp::Ordering {
            for (x, y) in a.iter().zip(b.iter()) {
                match x.total_cmp(y) {
                    std::cmp::Ordering::Equal => continue,
                    other => return other,
                }
            }
            a.len().cmp(&b.len())
        };
        term_lists.sort_by(|a, b| dominant(&b.1, &a.1));
        let top = term_lists[0].1.clone();
        tied = term_lists
            .into_iter()
            .take_while(|(_, terms)| dominant(terms, &top) == std::cmp::Ordering::Equal)
            .map(|(i, _)| i)
            .collect();
    }

    let num_tied = tied.len();
    let winner = tied[break_ties(num_tied, rng)];
    Ok(EstimateResult {
        pattern: SparsityPattern::from_sorted(subsets[winner].clone(), n)
            .expect("enumeration is sorted"),
        score: scores[winner],
        tie_broken: num_tied > 1,
        num_tied,
    })
}
