//! Command-line front end for the sparsity-pattern-recovery library:
//! evaluate sampling-rate bound curves to CSV, run seeded Monte Carlo
//! batches, sweep a config across sampling rates to locate its phase
//! transition, and run the built-in verification suites.
//!
//! Exit codes: `0` on success, `2` when a verification suite reports any
//! failed check, `1` on usage, I/O, or domain errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use suprec::bounds::{
    alpha_grid, bounded_source_bounds, convexify, family_metadata, ns_upper_bound, render_csv,
    th_gaussian_closed_form, th_loose_bound, th_upper_bound, BoundCurve, BoundedSourceParams,
    BoundsError, CurveLabel,
};
use suprec::harness::{
    phase_transition_sweep, render_results_csv, render_sweep_csv, run_trials_with, verify_all,
    verify_lemma_suite, verify_theorem8, ExperimentConfig, RunOptions,
};
use suprec::source::{DistributionModel, SourceSpec};

#[derive(Parser)]
#[command(
    name = "suprec-cli",
    version,
    about = "Sparsity-pattern recovery: rate bounds, seeded simulations, sweeps, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate sampling-rate upper bounds on a distortion grid and write CSV.
    Bounds(BoundsArgs),
    /// Run a seeded Monte Carlo batch described by a key=value config file.
    Simulate(SimulateArgs),
    /// Re-run a config across a sampling-rate grid and locate the transition.
    Sweep(SweepArgs),
    /// Run the built-in correctness suites and report per-check results.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Source family the bounds are evaluated for.
    #[arg(long, value_enum)]
    family: Family,
    /// Sparsity rate Ω ∈ (0, 1/2).
    #[arg(long)]
    omega: f64,
    /// Signal-to-noise ratio in dB; per-coefficient power is 10^(dB/10)/Ω.
    #[arg(long = "snr-db", value_name = "DB", allow_hyphen_values = true)]
    snr_db: f64,
    /// Magnitude-floor fraction η ∈ (0, 1] (bounded family only).
    #[arg(long)]
    eta: Option<f64>,
    /// Family power γ (bounded family only; default 10^(dB/10)/Ω).
    #[arg(long)]
    gamma: Option<f64>,
    /// Distortion grid lo:hi:n, log-spaced; default 200 points on [1e-3, 1-Ω].
    #[arg(long = "alpha-grid", value_name = "LO:HI:N")]
    alpha_grid: Option<String>,
    /// Also emit the lower convex envelope achievable by rate sharing.
    #[arg(long)]
    convexify: bool,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Zero-mean Gaussian coefficients scaled to the target power.
    Gaussian,
    /// Symmetric two-point coefficients (±c) scaled to the target power.
    #[value(name = "two_point")]
    TwoPoint,
    /// Worst case over all sources with power γ and magnitude floor √(ηγ).
    Bounded,
}

#[derive(Args)]
struct SimulateArgs {
    /// Key=value experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (per-trial rows plus a summary header).
    #[arg(long)]
    out: PathBuf,
    /// Also dump each trial's sampled instance into this directory.
    #[arg(long = "dump-dir", value_name = "DIR")]
    dump_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Key=value experiment config file (its rho is overridden per point).
    #[arg(long)]
    config: PathBuf,
    /// Sampling-rate grid lo:hi:n, linearly spaced.
    #[arg(long, value_name = "LO:HI:N")]
    rho: String,
    /// Output CSV path (one row per grid point plus the fitted crossing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Statistical and analytic support facts behind the bounds.
    Lemmas,
    /// Small-instance limit identities of the optimal Gaussian estimator.
    #[value(name = "theorem8")]
    Theorem8,
    /// Both suites.
    All,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Bounds(args) => {
            cmd_bounds(&args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(args) => {
            cmd_simulate(&args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            cmd_sweep(&args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => cmd_verify(&args),
    }
}

fn cmd_bounds(args: &BoundsArgs) -> Result<()> {
    ensure!(
        args.omega > 0.0 && args.omega < 0.5,
        "--omega must lie in (0, 1/2), got {}",
        args.omega
    );
    ensure!(args.snr_db.is_finite(), "--snr-db must be finite, got {}", args.snr_db);
    if args.family != Family::Bounded {
        ensure!(
            args.eta.is_none() && args.gamma.is_none(),
            "--eta and --gamma apply only to --family bounded"
        );
    }
    let alphas = match &args.alpha_grid {
        Some(text) => {
            let (lo, hi, n) = parse_grid(text).context("invalid --alpha-grid")?;
            ensure!(
                lo > 0.0 && hi <= 1.0,
                "--alpha-grid must lie inside (0, 1], got {lo}:{hi}"
            );
            log_spaced(lo, hi, n)
        }
        None => alpha_grid(args.omega),
    };
    let power = 10f64.powf(args.snr_db / 10.0);

    let curves = match args.family {
        Family::Gaussian => {
            let model = DistributionModel::gaussian(0.0, 1.0)?;
            let spec = SourceSpec::new(args.omega, model)?.with_power_target(power)?;
            let family = family_metadata(&spec);
            vec![
                sample_curve(CurveLabel::NsUb, &alphas, args, &family, |a| {
                    ns_upper_bound(&spec, a)
                })?,
                sample_curve(CurveLabel::ThUb, &alphas, args, &family, |a| {
                    th_upper_bound(&spec, a)
                })?,
                sample_curve(CurveLabel::ThGaussian, &alphas, args, &family, |a| {
                    th_gaussian_closed_form(args.omega, power, a)
                })?,
                sample_curve(CurveLabel::ThLoose, &alphas, args, &family, |a| {
                    th_loose_bound(&spec, a)
                })?,
            ]
        }
        Family::TwoPoint => {
            let model = DistributionModel::two_point(1.0)?;
            let spec = SourceSpec::new(args.omega, model)?.with_power_target(power)?;
            let family = family_metadata(&spec);
            vec![
                sample_curve(CurveLabel::NsUb, &alphas, args, &family, |a| {
                    ns_upper_bound(&spec, a)
                })?,
                sample_curve(CurveLabel::ThUb, &alphas, args, &family, |a| {
                    th_upper_bound(&spec, a)
                })?,
            ]
        }
        Family::Bounded => {
            let eta = args.eta.context("--family bounded requires --eta")?;
            let gamma = args.gamma.unwrap_or(power / args.omega);
            let params = BoundedSourceParams::new(eta, gamma)?;
            // The family's SNR is Ωγ; with an explicit --gamma this may
            // differ from --snr-db, and the CSV reports the resolved value.
            let snr_db = 10.0 * (args.omega * gamma).log10();
            let family = format!("bounded(eta={eta:e};gamma={gamma:e})");
            let mut ns_points = Vec::with_capacity(alphas.len());
            let mut th_points = Vec::with_capacity(alphas.len());
            for &alpha in &alphas {
                let (ns, th) = bounded_source_bounds(args.omega, &params, alpha)?;
                ns_points.push((alpha, ns));
                th_points.push((alpha, th));
            }
            let make = |label, points| BoundCurve {
                points,
                label,
                omega: args.omega,
                snr_db,
                family: family.clone(),
            };
            vec![
                make(CurveLabel::NsBounded, ns_points),
                make(CurveLabel::ThBounded, th_points),
            ]
        }
    };

    let mut curves = curves;
    if args.convexify {
        let envelope = convexify(&curves, args.omega)?;
        curves.push(envelope);
    }
    let points: usize = curves.iter().map(|c| c.points.len()).sum();
    fs::write(&args.out, render_csv(&curves))
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {} curve(s), {points} points -> {}", curves.len(), args.out.display());
    Ok(())
}

fn sample_curve(
    label: CurveLabel,
    alphas: &[f64],
    args: &BoundsArgs,
    family: &str,
    mut bound: impl FnMut(f64) -> Result<f64, BoundsError>,
) -> Result<BoundCurve> {
    let points = alphas
        .iter()
        .map(|&alpha| Ok((alpha, bound(alpha)?)))
        .collect::<Result<Vec<_>, BoundsError>>()
        .with_context(|| format!("evaluating the {label} bound"))?;
    Ok(BoundCurve {
        points,
        label,
        omega: args.omega,
        snr_db: args.snr_db,
        family: family.to_owned(),
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let cfg = ExperimentConfig::from_key_values(&text)?;
    let opts = RunOptions {
        dump_dir: args.dump_dir.clone(),
        collect_diagnostics: false,
    };
    let summary = run_trials_with(&cfg, &opts)?;
    fs::write(&args.out, render_results_csv(&cfg, &summary))
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "{} trial(s): error_rate={:.6e}, mean_distortion={:.6e} -> {}",
        summary.results.len(),
        summary.error_rate,
        summary.mean_distortion,
        args.out.display()
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let (lo, hi, n) = parse_grid(&args.rho).context("invalid --rho")?;
    ensure!(lo > 0.0, "--rho grid must start above 0, got {lo}");
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let cfg = ExperimentConfig::from_key_values(&text)?;
    let sweep = phase_transition_sweep(&cfg, &lin_spaced(lo, hi, n))?;
    fs::write(&args.out, render_sweep_csv(&cfg, &sweep))
        .with_context(|| format!("writing {}", args.out.display()))?;
    match sweep.crossing {
        Some(rho) => println!(
            "{n} grid point(s), 50% crossing near rho={rho:.6e} -> {}",
            args.out.display()
        ),
        None => println!(
            "{n} grid point(s), no 50% crossing fit -> {}",
            args.out.display()
        ),
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let report = match args.suite {
        Suite::Lemmas => verify_lemma_suite(),
        Suite::Theorem8 => verify_theorem8(),
        Suite::All => verify_all(),
    };
    print!("{}", report.render());
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

/// Parses `lo:hi:n` with finite `lo < hi` and `n ≥ 2`.
fn parse_grid(text: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    ensure!(parts.len() == 3, "expected LO:HI:N, got {text:?}");
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .with_context(|| format!("bad grid start {:?}", parts[0]))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .with_context(|| format!("bad grid end {:?}", parts[1]))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .with_context(|| format!("bad grid size {:?}", parts[2]))?;
    ensure!(
        lo.is_finite() && hi.is_finite() && lo < hi,
        "grid needs finite start < end, got {lo}:{hi}"
    );
    ensure!(n >= 2, "grid needs at least 2 points, got {n}");
    Ok((lo, hi, n))
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn lin_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
