//! Sampling-rate–distortion bounds: for a target distortion α, the
//! measurement-rate ρ = m/n beyond which each estimator succeeds with
//! probability approaching one.
//!
//! Four bounds cover the i.i.d.-Gaussian-matrix setting — a nearest-subspace
//! rate from a union bound over candidate supports, a thresholding rate
//! defined implicitly by a detection integral equation, its Gaussian closed
//! form, and a looser closed form valid for every source — plus the
//! bounded-magnitude family variants, asymptotic scaling shapes for extreme
//! (α, SNR) regimes, and the convex envelope achievable by rate sharing
//! between two operating points.
//!
//! Numerical conventions: entropies are in nats; the SNR of a truncated
//! source at fraction β is `P(βΩ, F_β) = βΩ·E[X² | smallest β of |X|]`; the
//! β-maximization runs a 512-point log grid (dense near α) refined by
//! golden-section, because the objective can be multimodal in β; the
//! thresholding integral equation is solved by bisection (its left side is
//! strictly decreasing in ρ) to an integral residual of 1e-9.

use crate::math::{g_detect, gap_function, h_nats, q_tail_inverse, rate_term, MathError, Probability};
use crate::quadrature::adaptive_simpson;
use crate::source::{truncate, DistributionModel, SourceError, SourceSpec};
use std::fmt;
use thiserror::Error;

/// Golden-ratio step for the one-dimensional maximizations.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Grid size for the β-maximization before golden-section refinement.
const BETA_GRID: usize = 512;

/// Required residual `|∫G dF − α|` at the returned thresholding rate.
const INTEGRAL_TOL: f64 = 1e-9;

/// Errors from bound evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("{what} = {value} is outside its valid domain")]
    Domain { what: &'static str, value: f64 },
    #[error("{context}")]
    Unsupported { context: String },
    #[error("root finding failed: {context}")]
    NoConvergence { context: String },
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Source(#[from] SourceError),
}

/// Asymptotic scaling shapes, named after their emission-label tokens
/// `scaling_prop1` … `scaling_prop6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingKind {
    /// High-SNR nearest-subspace shape: `Ω + C·max_{β∈{α,1}} βΩ·ln(1/(βΩ)) / ln(1+β^{4L+2}P²)`.
    Prop1,
    /// Small-α thresholding shape: `C·((1+P)/P)·Ω·ln(1/(αΩ)) / α^{2L}`.
    Prop2,
    /// Small-α converse shape: `C·α·Ω·ln(1/(αΩ)) / ln(1+α^{2L+1}P)`.
    Prop3,
    /// Small-α sandwich growth: `C·α^{−2L}·ln(1/α)`.
    Prop4,
    /// Low-SNR optimal shape: `Ω + C/ln(1+P)`.
    Prop5,
    /// Low-SNR i.i.d.-matrix shape `Ω + C·Ω·ln(1/Ω)/ln(1+P)`, admissible only
    /// where the entropy-power ratio exceeds `exp(1 − R(Ω,α)/Ω)`.
    Prop6,
}

impl fmt::Display for ScalingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = match self {
            ScalingKind::Prop1 => 1,
            ScalingKind::Prop2 => 2,
            ScalingKind::Prop3 => 3,
            ScalingKind::Prop4 => 4,
            ScalingKind::Prop5 => 5,
            ScalingKind::Prop6 => 6,
        };
        write!(f, "scaling_prop{idx}")
    }
}

/// Which bound a curve samples; `Display` yields the CSV label token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveLabel {
    NsUb,
    ThUb,
    ThGaussian,
    ThLoose,
    NsBounded,
    ThBounded,
    Convexified,
    Scaling(ScalingKind),
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveLabel::NsUb => write!(f, "ns_ub"),
            CurveLabel::ThUb => write!(f, "th_ub"),
            CurveLabel::ThGaussian => write!(f, "th_gaussian"),
            CurveLabel::ThLoose => write!(f, "th_loose"),
            CurveLabel::NsBounded => write!(f, "ns_bounded"),
            CurveLabel::ThBounded => write!(f, "th_bounded"),
            CurveLabel::Convexified => write!(f, "convexified"),
            CurveLabel::Scaling(kind) => write!(f, "{kind}"),
        }
    }
}

/// One sampled bound: `(α, ρ)` points with α strictly increasing, plus the
/// metadata that reproduces the evaluation (including the quadrature rule,
/// carried in `family`).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub points: Vec<(f64, f64)>,
    pub label: CurveLabel,
    pub omega: f64,
    pub snr_db: f64,
    pub family: String,
}

impl BoundCurve {
    /// Linear interpolation on the sampled points; `None` outside their span.
    pub fn value_at(&self, alpha: f64) -> Option<f64> {
        let pts = &self.points;
        let (first, last) = (pts.first()?, pts.last()?);
        if alpha < first.0 || alpha > last.0 {
            return None;
        }
        let i = pts.partition_point(|p| p.0 < alpha);
        if i < pts.len() && pts[i].0 == alpha {
            return Some(pts[i].1);
        }
        let (a0, r0) = pts[i - 1];
        let (a1, r1) = pts[i];
        Some(r0 + (r1 - r0) * (alpha - a0) / (a1 - a0))
    }
}

/// The standard emission grid: 200 log-spaced distortions on `[10⁻³, 1−Ω]`.
///
/// # Panics
///
/// Requires `Ω ∈ (0, 1/2)`.
pub fn alpha_grid(omega: f64) -> Vec<f64> {
    assert!(omega > 0.0 && omega < 0.5, "sparsity rate Ω must be in (0, 1/2)");
    let (lo, hi) = (1e-3, 1.0 - omega);
    let n = 200;
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// CSV emission: header `alpha,rho,label,omega,snr_db,family`, one row per
/// curve point, floats at 17 significant digits.
pub fn render_csv(curves: &[BoundCurve]) -> String {
    let mut out = String::from("alpha,rho,label,omega,snr_db,family\n");
    for curve in curves {
        for &(alpha, rho) in &curve.points {
            out.push_str(&format!(
                "{alpha:.16e},{rho:.16e},{},{:.16e},{:.16e},{}\n",
                curve.label, curve.omega, curve.snr_db, curve.family
            ));
        }
    }
    out
}

/// Metadata token describing the resolved source law and the quadrature its
/// expectations use — semicolon-separated so the CSV stays one column.
pub fn family_metadata(spec: &SourceSpec) -> String {
    use crate::source::DistributionModel as M;
    match spec.resolved_model() {
        M::Gaussian { mean, variance } => {
            format!("gaussian(mean={mean:e};var={variance:e};banded_simpson)")
        }
        M::TwoPoint { value } => format!("two_point(c={value:e};exact_sum)"),
        M::UniformMagnitude { lo, hi } => {
            format!("uniform_magnitude(lo={lo:e};hi={hi:e};adaptive_simpson)")
        }
        M::Discrete { atoms } => format!("discrete(atoms={};exact_sum)", atoms.len()),
    }
}

fn check_omega(omega: f64) -> Result<(), BoundsError> {
    if !(omega > 0.0 && omega < 0.5) {
        return Err(BoundsError::Domain {
            what: "sparsity rate Ω (needs (0, 1/2))",
            value: omega,
        });
    }
    Ok(())
}

/// Shared β-maximization: `Ω + max_{β∈[α,1]} [ΩH(β) + (1−Ω)H(Ωβ/(1−Ω))] / ℒ(1 + P_β)`
/// for a caller-supplied truncated SNR `P_β`. Returns `+∞` when the
/// denominator degenerates (zero truncated power).
fn ns_search(
    omega: f64,
    alpha: f64,
    p_of_beta: &mut dyn FnMut(f64) -> Result<f64, BoundsError>,
) -> Result<f64, BoundsError> {
    check_omega(omega)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(BoundsError::Domain {
            what: "distortion α (needs (0, 1])",
            value: alpha,
        });
    }
    // The crossover-probability entropy argument Ωβ/(1−Ω) must stay ≤ 1/2
    // over the whole range β ∈ [α, 1], i.e. Ω ≤ 1/3.
    if omega / (1.0 - omega) > 0.5 + 1e-12 {
        return Err(BoundsError::Domain {
            what: "Ω (the bound needs Ωβ/(1−Ω) ≤ 1/2 up to β = 1, i.e. Ω ≤ 1/3)",
            value: omega,
        });
    }
    let mut objective = |beta: f64| -> Result<f64, BoundsError> {
        let p_beta = p_of_beta(beta)?;
        let den = gap_function(1.0 + p_beta)?;
        if !(den > 0.0) {
            return Ok(f64::INFINITY);
        }
        let num = omega * h_nats(beta) + (1.0 - omega) * h_nats(omega * beta / (1.0 - omega));
        Ok(num / den)
    };
    if alpha >= 1.0 - 1e-15 {
        return Ok(omega + objective(1.0)?);
    }
    // Log-spaced grid from α to 1 (dense near α, where the objective often
    // peaks sharply), then golden-section inside the best bracket.
    let betas: Vec<f64> = (0..BETA_GRID)
        .map(|i| alpha * (1.0 / alpha).powf(i as f64 / (BETA_GRID - 1) as f64))
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (i, &beta) in betas.iter().enumerate() {
        let val = objective(beta)?;
        if val > best {
            best = val;
            best_idx = i;
        }
    }
    if best.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut lo = betas[best_idx.saturating_sub(1)];
    let mut hi = betas[(best_idx + 1).min(BETA_GRID - 1)];
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    for _ in 0..120 {
        if hi - lo < 1e-13 {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = objective(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = objective(d)?;
        }
    }
    Ok(omega + best.max(fc).max(fd))
}

/// Nearest-subspace rate bound:
/// `ρ(α) = Ω + max_{β∈[α,1]} [ΩH(β) + (1−Ω)H(Ωβ/(1−Ω))] / ℒ(1 + P(βΩ, F_β))`
/// where `ℒ(x) = ½(ln x − (x−1)/x)` and `F_β` keeps the smallest β-fraction
/// of the magnitude law.
///
/// Returns `+∞` when the truncated SNR vanishes somewhere in range.
///
/// # Errors
///
/// Requires `α ∈ (0, 1]` and `Ω ≤ 1/3` (so the entropy argument `Ωβ/(1−Ω)`
/// stays within `[0, 1/2]` over the full β range).
pub fn ns_upper_bound(spec: &SourceSpec, alpha: f64) -> Result<f64, BoundsError> {
    let omega = spec.omega();
    let model = spec.resolved_model();
    ns_search(omega, alpha, &mut |beta| {
        let trunc = truncate(&model, beta)?;
        Ok(beta * omega * trunc.second_moment())
    })
}

fn q_inv(p: f64) -> Result<f64, BoundsError> {
    Ok(q_tail_inverse(Probability::new(p)?)?)
}

/// The detection integral `E_F[G(ρX²/(1+P), t)]`, strictly decreasing in ρ.
fn detection_integral(spec: &SourceSpec, rho: f64, t_star: f64) -> f64 {
    let model = spec.resolved_model();
    let p = spec.power();
    let c = rho / (1.0 + p);
    let g = |x: f64| {
        g_detect(c * x * x, t_star)
            .expect("μ² ≥ 0 and finite t are within the detector domain")
            .get()
    };
    if let DistributionModel::Gaussian { mean, variance } = &model {
        // The miss probability G(c·x², t*) drops from ≈1 to ≈0 inside
        // |x| ≤ (t* + 8)/√c and is at most Q(8) ≈ 6e-16 beyond. At high SNR
        // that band is far narrower than σ, and a fixed Hermite rule spaced
        // for σ steps right over it — so integrate the weighted band
        // adaptively instead.
        let (m, sd) = (*mean, variance.sqrt());
        if c <= 0.0 {
            return g(0.0);
        }
        let x_hi = (t_star + 8.0) / c.sqrt();
        let lo = (-x_hi).max(m - 10.0 * sd);
        let hi = x_hi.min(m + 10.0 * sd);
        if lo >= hi {
            return 0.0;
        }
        let norm = sd * (2.0 * std::f64::consts::PI).sqrt();
        return adaptive_simpson(
            |x| {
                let z = (x - m) / sd;
                g(x) * (-0.5 * z * z).exp() / norm
            },
            lo,
            hi,
            1e-12,
        );
    }
    model.expect(g)
}

/// Thresholding rate bound: the root ρ of
/// `∫ G(ρx²/(1+P(Ω,F)), t*) dF(x) = α` with `t* = Q⁻¹(αΩ/(2(1−Ω)))`,
/// and exactly `0` for `α ≥ 1−Ω`. The left side is continuous and strictly
/// decreasing in ρ, so the root is found by bisection (bracketed by the
/// loose closed form, doubled if degenerate) to an integral residual of
/// 1e-9.
///
/// # Errors
///
/// Requires `α ∈ (0, 1)`; reports failure to bracket or converge.
pub fn th_upper_bound(spec: &SourceSpec, alpha: f64) -> Result<f64, BoundsError> {
    let omega = spec.omega();
    check_omega(omega)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundsError::Domain {
            what: "distortion α (needs (0, 1))",
            value: alpha,
        });
    }
    if alpha >= 1.0 - omega {
        return Ok(0.0);
    }
    let t_star = q_inv(alpha * omega / (2.0 * (1.0 - omega)))?;
    // No solution: already at or below target with zero measurements.
    if detection_integral(spec, 0.0, t_star) <= alpha {
        return Ok(0.0);
    }
    let loose = th_loose_bound(spec, alpha)?;
    let mut hi = if loose.is_finite() && loose > 0.0 { loose } else { 1.0 };
    let mut doubling = 0;
    while detection_integral(spec, hi, t_star) > alpha {
        hi *= 2.0;
        doubling += 1;
        if doubling > 60 {
            return Err(BoundsError::NoConvergence {
                context: format!("no upper bracket for the detection equation below ρ = {hi:e}"),
            });
        }
    }
    let mut lo = 0.0;
    let mut mid = 0.5 * hi;
    for _ in 0..300 {
        mid = 0.5 * (lo + hi);
        let e = detection_integral(spec, mid, t_star);
        if e > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if (e - alpha).abs() <= 0.1 * INTEGRAL_TOL || hi - lo <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    let residual = (detection_integral(spec, mid, t_star) - alpha).abs();
    if residual > INTEGRAL_TOL {
        return Err(BoundsError::NoConvergence {
            context: format!("integral residual {residual:e} above {INTEGRAL_TOL:e} at ρ = {mid:e}"),
        });
    }
    Ok(mid)
}

/// Closed form of the thresholding rate for a centered Gaussian source:
/// `ρ(α) = Ω·((1+P)/P)·[(Q⁻¹(αΩ/(2(1−Ω))) / Q⁻¹((1−α)/2))² − 1]`,
/// and `0` for `α ≥ 1−Ω`.
///
/// The denominator quantile comes from inverting the Gaussian case of the
/// detection equation, `1 − 2Q(t*/√(1 + ρσ²/(1+P))) = α`, whose root
/// satisfies `t*/√(·) = Q⁻¹((1−α)/2)`; this is what makes the closed form
/// agree with the root finder to full precision (and makes ρ → 0 as
/// α → 1−Ω, where the two quantiles coincide).
///
/// # Errors
///
/// Requires `P > 0`, `Ω ∈ (0, 1/2)`, `α ∈ (0, 1)`.
pub fn th_gaussian_closed_form(omega: f64, p: f64, alpha: f64) -> Result<f64, BoundsError> {
    check_omega(omega)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(BoundsError::Domain {
            what: "SNR P (needs positive finite)",
            value: p,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundsError::Domain {
            what: "distortion α (needs (0, 1))",
            value: alpha,
        });
    }
    if alpha >= 1.0 - omega {
        return Ok(0.0);
    }
    let t = q_inv(alpha * omega / (2.0 * (1.0 - omega)))?;
    let u = q_inv((1.0 - alpha) / 2.0)?;
    Ok(omega * (1.0 + p) / p * ((t / u).powi(2) - 1.0))
}

/// Loose closed-form thresholding rate, valid for every source law:
/// `ρ(α) = Ω·(1+P(Ω,F)) / P(Ω,F_{α/2}) · [Q⁻¹(α/2) + Q⁻¹(αΩ/(2(1−Ω)))]²`,
/// and `0` for `α ≥ 1−Ω`. Returns `+∞` when the truncated power
/// `P(Ω,F_{α/2})` vanishes.
///
/// # Errors
///
/// Requires `α ∈ (0, 1)`.
pub fn th_loose_bound(spec: &SourceSpec, alpha: f64) -> Result<f64, BoundsError> {
    let omega = spec.omega();
    check_omega(omega)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundsError::Domain {
            what: "distortion α (needs (0, 1))",
            value: alpha,
        });
    }
    if alpha >= 1.0 - omega {
        return Ok(0.0);
    }
    let model = spec.resolved_model();
    let p = spec.power();
    let p_half = omega * truncate(&model, alpha / 2.0)?.second_moment();
    if !(p_half > 0.0) {
        return Ok(f64::INFINITY);
    }
    let q_sum = q_inv(alpha / 2.0)? + q_inv(alpha * omega / (2.0 * (1.0 - omega)))?;
    Ok(omega * (1.0 + p) / p_half * q_sum * q_sum)
}

/// Parameters of the bounded-magnitude source family: every member has power
/// `γ` and magnitudes at least `√(ηγ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedSourceParams {
    eta: f64,
    gamma: f64,
}

impl BoundedSourceParams {
    /// # Errors
    ///
    /// Requires `η ∈ (0, 1]` and `γ > 0` (the magnitude floor `√(ηγ)` cannot
    /// exceed the power `γ`).
    pub fn new(eta: f64, gamma: f64) -> Result<Self, BoundsError> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(BoundsError::Domain {
                what: "magnitude-floor fraction η (needs (0, 1])",
                value: eta,
            });
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(BoundsError::Domain {
                what: "family power γ (needs positive finite)",
                value: gamma,
            });
        }
        Ok(BoundedSourceParams { eta, gamma })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Worst-case rates over the bounded-magnitude family, as a
/// `(nearest-subspace, thresholding)` pair:
///
/// * NS: `Ω + max_{β∈[α,1]} [ΩH(β)+(1−Ω)H(Ωβ/(1−Ω))] / ℒ(1 + βΩηγ)` — the
///   magnitude floor lower-bounds every truncated SNR by `βΩηγ`.
/// * TH: `Ω·(1+Ωγ)/(ηγΩ)·[Q⁻¹(α/2) + Q⁻¹(αΩ/(2(1−Ω)))]²`, `0` for `α ≥ 1−Ω`.
///
/// # Errors
///
/// As the per-source bounds; `α ∈ (0, 1]`.
pub fn bounded_source_bounds(
    omega: f64,
    params: &BoundedSourceParams,
    alpha: f64,
) -> Result<(f64, f64), BoundsError> {
    let (eta, gamma) = (params.eta, params.gamma);
    let ns = ns_search(omega, alpha, &mut |beta| Ok(beta * omega * eta * gamma))?;
    let th = if alpha >= 1.0 - omega {
        0.0
    } else {
        let q_sum = q_inv(alpha / 2.0)? + q_inv(alpha * omega / (2.0 * (1.0 - omega)))?;
        omega * (1.0 + omega * gamma) / (eta * gamma * omega) * q_sum * q_sum
    };
    Ok((ns, th))
}

/// Lower convex envelope of the pointwise minimum of the input curves,
/// augmented with the anchor `(1−Ω, 0)` — the trade-off achievable by rate
/// sharing between any two operating points.
///
/// The inputs are merged onto the union of their α-grids (linear
/// interpolation within each curve's span); the output's points are the
/// envelope vertices, strictly increasing in α and exactly convex.
///
/// # Errors
///
/// Requires at least one curve; all curves must share `Ω` and the SNR.
pub fn convexify(curves: &[BoundCurve], omega: f64) -> Result<BoundCurve, BoundsError> {
    check_omega(omega)?;
    let Some(first) = curves.first() else {
        return Err(BoundsError::Unsupported {
            context: "convexify needs at least one input curve".into(),
        });
    };
    for curve in curves {
        if (curve.omega - omega).abs() > 1e-9 || (curve.snr_db - first.snr_db).abs() > 1e-9 {
            return Err(BoundsError::Unsupported {
                context: format!(
                    "curves must share (Ω, SNR): found (Ω={}, snr_db={}) against (Ω={omega}, snr_db={})",
                    curve.omega, curve.snr_db, first.snr_db
                ),
            });
        }
    }
    let mut alphas: Vec<f64> = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.0))
        .chain(std::iter::once(1.0 - omega))
        .collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(alphas.len());
    for &alpha in &alphas {
        let mut min = f64::INFINITY;
        for curve in curves {
            if let Some(v) = curve.value_at(alpha) {
                min = min.min(v);
            }
        }
        if alpha == 1.0 - omega {
            min = min.min(0.0);
        }
        if min.is_finite() {
            pts.push((alpha, min));
        }
    }
    // Lower hull, left to right: pop while the turn is clockwise or straight.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(BoundCurve {
        points: hull,
        label: CurveLabel::Convexified,
        omega,
        snr_db: first.snr_db,
        family: first.family.clone(),
    })
}

/// Inputs to the scaling shapes. The constant `C` is asserted to exist but
/// never pinned down analytically, so it is an explicit parameter
/// (default 1); acceptance-style checks should assert ratio boundedness,
/// never absolute values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    omega: f64,
    snr: f64,
    decay_rate: f64,
    constant: f64,
    entropy_power_ratio: Option<f64>,
}

impl ScalingParams {
    /// # Errors
    ///
    /// Requires `Ω ∈ (0, 1/2)`, `P > 0`, decay rate `L ≥ 0`.
    pub fn new(omega: f64, snr: f64, decay_rate: f64) -> Result<Self, BoundsError> {
        check_omega(omega)?;
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(BoundsError::Domain {
                what: "SNR P (needs positive finite)",
                value: snr,
            });
        }
        if !(decay_rate >= 0.0 && decay_rate.is_finite()) {
            return Err(BoundsError::Domain {
                what: "decay rate L (needs nonnegative finite)",
                value: decay_rate,
            });
        }
        Ok(ScalingParams {
            omega,
            snr,
            decay_rate,
            constant: 1.0,
            entropy_power_ratio: None,
        })
    }

    /// Overrides the undetermined constant `C`.
    ///
    /// # Errors
    ///
    /// Requires `C > 0`.
    pub fn with_constant(mut self, constant: f64) -> Result<Self, BoundsError> {
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(BoundsError::Domain {
                what: "scaling constant C (needs positive finite)",
                value: constant,
            });
        }
        self.constant = constant;
        Ok(self)
    }

    /// Supplies `θ(Ω,F)`, needed by the `Prop6` admissibility condition.
    pub fn with_entropy_power_ratio(mut self, theta: f64) -> Self {
        self.entropy_power_ratio = Some(theta);
        self
    }
}

/// Evaluates one scaling shape on a distortion grid. Each α must lie in
/// `(0, 1/4)`, the regime the shapes are stated for. `Prop6` keeps only the
/// grid points satisfying its admissibility condition
/// `θ(Ω,F) > exp(1 − R(Ω,α)/Ω)`.
///
/// # Errors
///
/// α outside `(0, 1/4)`; `Prop6` without an entropy-power ratio.
pub fn scaling_curve(
    kind: ScalingKind,
    params: &ScalingParams,
    alphas: &[f64],
) -> Result<BoundCurve, BoundsError> {
    let (omega, p, l, c) = (params.omega, params.snr, params.decay_rate, params.constant);
    for &alpha in alphas {
        if !(alpha > 0.0 && alpha < 0.25) {
            return Err(BoundsError::Domain {
                what: "distortion α (scaling shapes are stated for (0, 1/4))",
                value: alpha,
            });
        }
    }
    let theta = params.entropy_power_ratio;
    if kind == ScalingKind::Prop6 && theta.is_none() {
        return Err(BoundsError::Unsupported {
            context: "the Prop6 shape needs the entropy-power ratio θ(Ω,F) for admissibility".into(),
        });
    }
    let prop1_term =
        |b: f64| b * omega * (1.0 / (b * omega)).ln() / (b.powf(4.0 * l + 2.0) * p * p).ln_1p();
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let rho = match kind {
            ScalingKind::Prop1 => omega + c * prop1_term(alpha).max(prop1_term(1.0)),
            ScalingKind::Prop2 => {
                c * ((1.0 + p) / p) * omega * (1.0 / (alpha * omega)).ln() / alpha.powf(2.0 * l)
            }
            ScalingKind::Prop3 => {
                c * alpha * omega * (1.0 / (alpha * omega)).ln()
                    / (alpha.powf(2.0 * l + 1.0) * p).ln_1p()
            }
            ScalingKind::Prop4 => c * alpha.powf(-2.0 * l) * (1.0 / alpha).ln(),
            ScalingKind::Prop5 => omega + c / p.ln_1p(),
            ScalingKind::Prop6 => {
                let rate = rate_term(Probability::new(omega)?, Probability::new(alpha)?)?;
                let threshold = (1.0 - rate / omega).exp();
                if theta.expect("checked above") <= threshold {
                    continue; // inadmissible point, excluded from the curve
                }
                omega + c * omega * (1.0 / omega).ln() / p.ln_1p()
            }
        };
        points.push((alpha, rho));
    }
    Ok(BoundCurve {
        points,
        label: CurveLabel::Scaling(kind),
        omega,
        snr_db: 10.0 * p.log10(),
        family: format!("scaling(L={l:e};C={c:e})"),
    })
}
