use std::path::PathBuf;
use std::process::Command;

use regdim_cli::Table;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regdim"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn value(t: &Table, row: &str, col: &str) -> String {
    let c = t.column(col).unwrap();
    t.rows.iter().find(|r| r[0] == row).unwrap_or_else(|| panic!("no row {row}"))[c].clone()
}

#[test]
fn formula_values() {
    let cantor = Table::from_csv(&run_ok(&["formula", "--config", config("cantor.toml").to_str().unwrap()])).unwrap();
    let v: f64 = value(&cantor, "dim_reg", "value").parse().unwrap();
    assert!((v - 1.09590).abs() < 1e-5);

    let dir = tempfile::tempdir().unwrap();
    let half = dir.path().join("half.toml");
    std::fs::write(&half, "[model]\nfamily = \"carpet\"\nepsilon = \"1/2\"\n").unwrap();
    let t = Table::from_csv(&run_ok(&["formula", "--config", half.to_str().unwrap()])).unwrap();
    let v: f64 = value(&t, "dim_reg", "value").parse().unwrap();
    assert!((v - 1.13093).abs() < 1e-5);

    let t = Table::from_csv(&run_ok(&["formula", "--config", config("sequence-poly-exp.toml").to_str().unwrap()])).unwrap();
    assert_eq!(value(&t, "dim_reg", "value"), "inf");

    let t = Table::from_csv(&run_ok(&["formula", "--config", config("lens.toml").to_str().unwrap()])).unwrap();
    assert_eq!(value(&t, "dim_reg", "note"), "no closed form");
}

#[test]
fn cantor_estimate() {
    let t = Table::from_csv(&run_ok(&["estimate", "--config", config("cantor.toml").to_str().unwrap()])).unwrap();
    let v: f64 = value(&t, "dimreg", "value").parse().unwrap();
    assert!((v - 1.0959).abs() < 0.05, "{v}");
    assert_eq!(value(&t, "dimreg", "runtime_ms"), "");
}

#[test]
fn carpet_chain_has_five_rows_and_no_violations() {
    let t = Table::from_csv(&run_ok(&["estimate", "--config", config("carpet-chain.toml").to_str().unwrap()])).unwrap();
    assert_eq!(t.rows.iter().filter(|r| r[0].starts_with("chain:")).count(), 5);
    assert!(!t.rows.iter().any(|r| r[0].starts_with("violation:")));
}

#[test]
fn lens_ratios_increase() {
    let t = Table::from_csv(&run_ok(&["estimate", "--config", config("lens.toml").to_str().unwrap()])).unwrap();
    let v: Vec<f64> = t.rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(v.len(), 6);
    assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
}

#[test]
fn sweep_columns_and_values() {
    let t = Table::from_csv(&run_ok(&["sweep-epsilon", "--eps-min", "0.01", "--eps-max", "0.5", "--steps", "50"])).unwrap();
    assert_eq!(t.header, ["epsilon", "dimreg", "T", "sup_local", "assouad"]);
    assert_eq!(t.rows.len(), 50);
    let last: Vec<f64> = t.rows[49].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[0], 0.5);
    assert!((last[1] - 1.13093).abs() < 1e-5 && (last[1] - last[4]).abs() < 1e-9);
}

#[test]
fn output_is_identical_across_thread_counts() {
    for cfg in ["cantor.toml", "carpet-chain.toml", "sequence-geometric.toml", "lens-free.toml"] {
        let path = config(cfg);
        let outs: Vec<String> =
            ["1", "4", "8"].iter().map(|n| run_ok(&["estimate", "--config", path.to_str().unwrap(), "--threads", n])).collect();
        assert!(outs.windows(2).all(|w| w[0] == w[1]), "{cfg}");
    }
}

#[test]
fn out_flag_writes_file_with_hash() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    run_ok(&["estimate", "--config", config("cantor.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# config-hash sha256:"));
    // a different seed is a different run
    let other = run_ok(&["estimate", "--config", config("cantor.toml").to_str().unwrap(), "--seed", "2"]);
    assert_ne!(text.lines().next(), other.lines().next());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model]\nfamily = \"carpet\"\nepsilon = \"1/4\"\ncolour = 3\n").unwrap();
    let out = bin().args(["estimate", "--config", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let missing = bin().args(["formula", "--config", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));

    let range = bin().args(["sweep-epsilon", "--eps-min", "0.3", "--eps-max", "0.7"]).output().unwrap();
    assert_eq!(range.status.code(), Some(2));

    let unwritable = bin().args(["sweep-epsilon", "--out", "/nonexistent/dir/x.csv"]).output().unwrap();
    assert_eq!(unwritable.status.code(), Some(3));
}

#[test]
fn failing_estimator_leaves_error_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    // a grid whose radii are all above 1 leaves the local scan without data
    std::fs::write(
        &cfg,
        "[model]\nfamily = \"carpet\"\nepsilon = \"1/4\"\n[grid]\nbase = 2\nexp_min = -8\nexp_max = -1\ngap_min = 1\ngap_max = 2\n[estimators]\nrun = [\"local\", \"dimreg\"]\n",
    )
    .unwrap();
    let t = Table::from_csv(&run_ok(&["estimate", "--config", cfg.to_str().unwrap()])).unwrap();
    assert!(!value(&t, "local", "error").is_empty());
    assert!(value(&t, "dimreg", "error").is_empty());
}
