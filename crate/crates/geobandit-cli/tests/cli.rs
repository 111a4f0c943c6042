use std::path::Path;
use std::process::{Command, Output};

fn geobandit(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geobandit")).args(args).arg("--out").arg(out).output().unwrap()
}

fn results(out: &Path) -> String {
    std::fs::read_to_string(out.join("results.csv")).unwrap()
}

#[test]
fn bounds_writes_results_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = geobandit(&["bounds"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(results(dir.path()).starts_with("experiment,param_name,param_value,seed,metric,value\n"));
    let manifest = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.starts_with("experiment=bounds\n"));
}

#[test]
fn lbval_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lbval.cfg");
    std::fs::write(&cfg, "# small run\nn_cand = 30\n").unwrap();
    let out = dir.path().join("run");
    let o = geobandit(&["lbval", "--T", "25", "--seeds", "2", "--config", cfg.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // Two seeds at one horizon plus one reference row.
    assert_eq!(results(&out).lines().count(), 1 + 3);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.lines().any(|l| l == "horizons=25"));
    assert!(manifest.lines().any(|l| l == "n_cand=30"));
}

#[test]
fn same_arguments_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert!(geobandit(&["lbval", "--T", "20", "--seeds", "1", "--seed-base", "9"], out).status.success());
    }
    assert_eq!(results(&a), results(&b));
}

#[test]
fn checks_with_small_oracle_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("checks.cfg");
    std::fs::write(&cfg, "oracle_pairs = 5\n").unwrap();
    let o = geobandit(&["checks", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(results(dir.path()).contains("kernel_oracle"));
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "not_a_key = 1\n").unwrap();
    let o = geobandit(&["d7", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not_a_key"));
    assert!(!geobandit(&["fig3"], dir.path()).status.success());
    assert!(!geobandit(&["bounds", "--config", "/nonexistent/x.cfg"], dir.path()).status.success());
}
