//! End-to-end runs of the `sfwm` binary.

use std::path::Path;
use std::process::{Command, Output};

use sfwm_cli::config::REFERENCE_PRESET;
use sfwm_cli::emit::read_csv;
use sfwm_core::spectral::Jsa;

fn sfwm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfwm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove(sfwm_cli::GRID_ENV)
        .output()
        .unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn chirp_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(sfwm(&["chirp"], &a).status.success());
    assert!(sfwm(&["chirp"], &b).status.success());
    for name in ["chirp.csv", "chirp.svg", "report.txt"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let (header, rows) = read_csv(a.join("chirp.csv")).unwrap();
    assert_eq!(header[0], "length_km");
    assert_eq!(rows.len(), 7);
}

#[test]
fn fig4_csv_has_fixed_columns_and_three_cases() {
    let dir = tempfile::tempdir().unwrap();
    let output = sfwm(&["fig4", "--grid", "64", "--format", "csv"], dir.path());
    assert!(output.status.success(), "{}", stderr(&output));
    let (header, rows) = read_csv(dir.path().join("fig4.csv")).unwrap();
    assert_eq!(header, ["delta_tau_ps", "normalized_coincidence", "case_label"]);
    let labels: std::collections::BTreeSet<_> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(labels.into_iter().collect::<Vec<_>>(), ["short", "smf-dcf", "smf-smf"]);
    assert_eq!(rows.len(), 3 * 161);
    assert!(!dir.path().join("fig4.svg").exists());
}

#[test]
fn jsa_dump_reads_back_at_the_env_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_sfwm"))
        .args(["jsa-dump", "--out"])
        .arg(dir.path())
        .env(sfwm_cli::GRID_ENV, "48")
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = std::fs::read_to_string(dir.path().join("jsa.txt")).unwrap();
    assert!(text.starts_with("# 48 48 "));
    let jsa = Jsa::load(dir.path().join("jsa.txt")).unwrap();
    assert_eq!(jsa.grid.shape(), (48, 48));
    assert!((jsa.max_modulus() - 1.0).abs() < 1e-3);
}

#[test]
fn grid_flag_beats_env() {
    let dir = tempfile::tempdir().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_sfwm"))
        .args(["jsa-dump", "--grid", "32", "--out"])
        .arg(dir.path())
        .env(sfwm_cli::GRID_ENV, "48")
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(std::fs::read_to_string(dir.path().join("jsa.txt")).unwrap().starts_with("# 32 32 "));
}

#[test]
fn bad_config_value_exits_1_with_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    let source = REFERENCE_PRESET.replacen("fwhm_nm = 1.0", "fwhm_nm = -1.0", 1);
    let line = source.lines().position(|l| l.contains("fwhm_nm = -1.0")).unwrap() + 1;
    std::fs::write(&config, source).unwrap();
    let output = sfwm(&["chirp", "--config", config.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(output.status.code(), Some(1));
    let message = stderr(&output);
    assert!(message.contains(&format!("line {line}")), "{message}");
    assert!(message.contains("pump.fwhm_nm"), "{message}");
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sfwm(&["bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(sfwm(&["g2", "--grid", "4"], dir.path()).status.code(), Some(1));
    assert_eq!(sfwm(&["g2", "--format", "png"], dir.path()).status.code(), Some(1));
}

#[test]
fn truncated_grid_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("narrow.toml");
    std::fs::write(&config, format!("{REFERENCE_PRESET}\n[grid]\nspan_rad_per_ps = 0.2\n")).unwrap();
    let output = sfwm(&["g2", "--grid", "32", "--config", config.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(output.status.code(), Some(2), "{}", stderr(&output));
}
