//! Binary-level contract: exit codes, config diagnostics, report
//! determinism and file output.

use std::io::Write;
use std::process::Output;

fn run_capcone(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_capcone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn machine_block(stdout: &[u8]) -> String {
    let text = String::from_utf8_lossy(stdout);
    let idx = text.find("[machine]").expect("report has a machine block");
    text[idx..].to_string()
}

#[test]
fn passing_suite_exits_zero() {
    let out = run_capcone(&["check-jets", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("status=pass"));
}

#[test]
fn unknown_command_exits_two() {
    let out = run_capcone(&["fly-to-the-moon"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown command"));
}

#[test]
fn invalid_alpha_flag_exits_two() {
    let out = run_capcone(&["check-jets", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn malformed_config_file_exits_two_with_line_diagnostics() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "n = 4").unwrap();
    writeln!(file, "surprise_key = 1").unwrap();
    let out = run_capcone(&["check-jets", "--config", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("surprise_key"), "{err}");
}

#[test]
fn empty_config_file_uses_defaults() {
    let file = tempfile::NamedTempFile::new().unwrap();
    let out = run_capcone(&[
        "check-jets",
        "--config",
        file.path().to_str().unwrap(),
        "--samples",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("n = 4"));
    assert!(text.contains("theta_degrees = 45"));
    assert!(text.contains("competitor.a = 4"));
    assert!(text.contains("seed = 0"));
}

#[test]
fn obtuse_theta_is_normalized_with_notice() {
    let out = run_capcone(&["check-jets", "--samples", "10", "--theta", "120"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("theta_degrees = 60"), "{text}");
    assert!(text.contains("[notices]"), "{text}");
}

#[test]
fn identical_config_and_seed_reproduce_the_machine_block() {
    let args = ["check-jets", "--samples", "50", "--seed", "0"];
    let a = run_capcone(&args);
    let b = run_capcone(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(machine_block(&a.stdout), machine_block(&b.stdout));
    // a different seed changes the sampled residuals but not the schema
    let c = run_capcone(&["check-jets", "--samples", "50", "--seed", "1"]);
    assert_eq!(c.status.code(), Some(0));
    let ids = |s: &str| -> Vec<String> {
        s.lines()
            .filter_map(|l| l.split_whitespace().next().map(str::to_string))
            .collect()
    };
    assert_eq!(
        ids(&machine_block(&a.stdout)),
        ids(&machine_block(&c.stdout))
    );
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = run_capcone(&[
        "check-jets",
        "--samples",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("[machine]"));
}

#[test]
fn config_file_command_is_used_when_no_positional_given() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "command = check-spectral").unwrap();
    writeln!(file, "samples = 40").unwrap();
    let out = run_capcone(&["--config", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("command = check-spectral"));
}
