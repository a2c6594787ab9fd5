//! End-to-end tests of the compiled binary: exit codes, CSV shape, and
//! byte-level reproducibility of every subcommand.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_suprec-cli"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("experiment.cfg");
    fs::write(&path, body).expect("config written");
    path.to_str().expect("utf-8 path").to_owned()
}

const SMALL_CONFIG: &str = "\
# desk-scale thresholding batch
n = 80
omega = 0.1
family = gaussian
mean = 0
variance = 1
snr_db = 10
rho = 1.5
alpha = 0.2
estimator = th
trials = 40
seed = 11
";

#[test]
fn bounds_csv_is_reproducible_and_well_formed() {
    let dir = TempDir::new().expect("tempdir");
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "bounds",
            "--family",
            "gaussian",
            "--omega",
            "0.1",
            "--snr-db",
            "10",
            "--alpha-grid",
            "0.05:0.5:7",
            "--convexify",
            "--out",
            out.to_str().expect("utf-8 path"),
        ]);
        assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    }
    let text_a = fs::read(&out_a).expect("csv a");
    let text_b = fs::read(&out_b).expect("csv b");
    assert_eq!(text_a, text_b, "two invocations must emit identical bytes");

    let text = String::from_utf8(text_a).expect("utf-8 csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,rho,label,omega,snr_db,family"));
    for line in lines {
        assert_eq!(line.split(',').count(), 6, "malformed row: {line}");
    }
    for label in ["ns_ub", "th_ub", "th_gaussian", "th_loose", "convexified"] {
        assert!(text.contains(&format!(",{label},")), "missing curve {label}");
    }
}

#[test]
fn bounds_two_point_emits_only_its_curves() {
    let dir = TempDir::new().expect("tempdir");
    let out = dir.path().join("c.csv");
    let output = run(&[
        "bounds",
        "--family",
        "two_point",
        "--omega",
        "0.05",
        "--snr-db",
        "23.0103",
        "--alpha-grid",
        "0.1:0.35:3",
        "--out",
        out.to_str().expect("utf-8 path"),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = fs::read_to_string(&out).expect("csv");
    assert!(text.contains(",ns_ub,") && text.contains(",th_ub,"));
    assert!(!text.contains("th_gaussian") && !text.contains("convexified"));
    assert!(text.contains("two_point(c="));
}

#[test]
fn bounds_bounded_family_needs_eta_and_labels_its_curves() {
    let dir = TempDir::new().expect("tempdir");
    let out = dir.path().join("d.csv");
    let missing = run(&[
        "bounds",
        "--family",
        "bounded",
        "--omega",
        "0.1",
        "--snr-db",
        "10",
        "--out",
        out.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&missing.stderr).contains("--eta"),
        "stderr should name the missing flag"
    );

    let ok = run(&[
        "bounds",
        "--family",
        "bounded",
        "--omega",
        "0.1",
        "--snr-db",
        "10",
        "--eta",
        "0.2",
        "--alpha-grid",
        "0.05:0.5:4",
        "--out",
        out.to_str().expect("utf-8 path"),
    ]);
    assert!(ok.status.success(), "stderr: {}", String::from_utf8_lossy(&ok.stderr));
    let text = fs::read_to_string(&out).expect("csv");
    assert!(text.contains(",ns_bounded,") && text.contains(",th_bounded,"));
    assert!(text.contains("bounded(eta=2e-1;gamma=1e2)"));

    let misuse = run(&[
        "bounds",
        "--family",
        "gaussian",
        "--omega",
        "0.1",
        "--snr-db",
        "10",
        "--eta",
        "0.2",
        "--out",
        out.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(misuse.status.code(), Some(1));
}

#[test]
fn simulate_is_byte_reproducible_and_summarized() {
    let dir = TempDir::new().expect("tempdir");
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out_a = dir.path().join("ra.csv");
    let out_b = dir.path().join("rb.csv");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "simulate",
            "--config",
            &config,
            "--out",
            out.to_str().expect("utf-8 path"),
        ]);
        assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    }
    let text_a = fs::read(&out_a).expect("csv a");
    assert_eq!(text_a, fs::read(&out_b).expect("csv b"));
    let text = String::from_utf8(text_a).expect("utf-8 csv");
    assert!(text.starts_with("# simulate results\n# config: n=80 omega=1e-1"));
    assert!(text.contains("# summary: error_rate="));
    assert!(text.contains("trial,seed,distortion,success"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 41);
}

#[test]
fn simulate_rejects_unknown_config_keys() {
    let dir = TempDir::new().expect("tempdir");
    let config = write_config(dir.path(), &format!("{SMALL_CONFIG}bogus_knob = 3\n"));
    let out = dir.path().join("r.csv");
    let output = run(&[
        "simulate",
        "--config",
        &config,
        "--out",
        out.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&output.stderr).contains("bogus_knob"),
        "stderr should name the offending key"
    );
    assert!(!out.exists(), "no output file on failure");
}

#[test]
fn sweep_emits_one_row_per_grid_point() {
    let dir = TempDir::new().expect("tempdir");
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out = dir.path().join("t.csv");
    let output = run(&[
        "sweep",
        "--config",
        &config,
        "--rho",
        "0.5:2.0:4",
        "--out",
        out.to_str().expect("utf-8 path"),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = fs::read_to_string(&out).expect("csv");
    assert!(text.contains("# logistic 50% crossing"));
    assert!(text.contains("rho,successes,trials,success_rate,wilson_lo,wilson_hi"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);

    let bad = run(&["sweep", "--config", &config, "--rho", "2.0:0.5:4", "--out", "x.csv"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--rho"));
}

#[test]
fn verify_lemmas_suite_passes_and_exits_zero() {
    let output = run(&["verify", "--suite", "lemmas"]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert_eq!(output.status.code(), Some(0), "stdout: {stdout}");
    assert_eq!(stdout.matches("[PASS]").count(), 12);
    assert_eq!(stdout.matches("[FAIL]").count(), 0);
}

#[test]
fn verify_theorem8_reports_known_failures_and_exits_two() {
    let output = run(&["verify", "--suite", "theorem8"]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert_eq!(output.status.code(), Some(2), "stdout: {stdout}");
    assert!(stdout.contains("[PASS] theorem8_ns_identity_alpha_0"));
    assert!(stdout.contains("[FAIL] theorem8_ns_identity_alpha_1_3"));
    assert!(stdout.contains("[FAIL] theorem8_ns_identity_alpha_2_3"));
    assert!(stdout.contains("[PASS] theorem8_th_identity_alpha_2_3"));
}
