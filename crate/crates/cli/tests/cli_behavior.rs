//! Command-line behavior: config layering, flag overrides, and error
//! reporting through the real binary.

use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_erc7634"))
}

#[test]
fn config_file_overrides_defaults_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("scenario.toml");
    std::fs::write(
        &config_path,
        "seed = 7\n[market]\ninflation = 0.5\ntable_rows = [[10, 5]]\n",
    )
    .unwrap();

    let out = dir.path().join("out");
    let output = binary()
        .args(["market-table", "--config"])
        .arg(&config_path)
        .args(["--seed", "9", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");

    // Config narrowed the table to one row and raised inflation; fair value
    // is inflation-independent, max sell reflects the 1.5 multiplier.
    let table6 = std::fs::read_to_string(out.join("table6.csv")).unwrap();
    let rows: Vec<&str> = table6.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("10,5,"), "{rows:?}");
    assert!(rows[0].contains(",7.07,10.61,"), "{rows:?}");

    // The manifest echoes the flag-overridden seed, not the file's.
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("seed = 9"));
}

#[test]
fn unknown_config_keys_fail_with_single_line_error() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    std::fs::write(&config_path, "seed = 1\nturbo = true\n").unwrap();

    let output = binary()
        .args(["econ-tables", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    let lines: Vec<&str> = stderr.trim_end().lines().collect();
    assert_eq!(lines.len(), 1, "expected one error line, got {stderr:?}");
    assert!(lines[0].starts_with("error: "), "{stderr:?}");
}

#[test]
fn ledger_fuzz_subcommand_reports_and_exits_clean() {
    let output = binary()
        .args(["ledger-fuzz", "--ops", "5000", "--tokens", "64", "--seed", "3"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("safety violations: 0"));
    assert!(stdout.contains("replay: exact"));
}

#[test]
fn costs_flags_override_bypass_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let output = binary()
        .args(["costs-tables", "--wrapper-transfer-gas", "54283", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    // With no per-transfer margin the wrapper route never crosses the direct
    // line on the curve.
    let fig = std::fs::read_to_string(dir.path().join("fig10a.csv")).unwrap();
    for line in fig.lines().skip(1) {
        let cells: Vec<u64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[2] > cells[1], "wrapper crossed direct at n={}", cells[0]);
    }
}

#[test]
fn verify_fails_on_empty_directory_naming_the_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let output = binary().args(["verify", "--out"]).arg(dir.path()).output().unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("table2.csv"), "{stderr:?}");
}
