//! End-to-end tests of the `qd3` binary: exit codes, config handling,
//! seed precedence and byte-identical reports.

use qd3::params::{Config, ModelParams};
use std::path::Path;
use std::process::{Command, Output};

fn qd3(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qd3"));
    cmd.args(args).env_remove("QD3_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, p: &ModelParams) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&Config::from_params(p)).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn local_scope_passes_with_about_forty_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = qd3(&["verify", "--scope", "local", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["schema"], "qd3/1");
    let n = r["records"].as_array().unwrap().len();
    assert!((30..=50).contains(&n), "{n} records");
    assert!(r.get("timings").is_none());
}

#[test]
fn malformed_json_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"eta\": [0.1, 0.0], ").unwrap();
    let o = qd3(&["verify", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed config"));
}

#[test]
fn degenerate_inhomogeneity_exits_with_validation_message() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = ModelParams::default_profile(2);
    p.theta[0] = p.eta * 2.0;
    let cfg = write_config(dir.path(), "deg.json", &p);
    let o = qd3(&["verify", "--scope", "local", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("theta hits degeneration point"));
}

#[test]
fn long_chain_spectrum_is_refused() {
    let o = qd3(&["spectrum", "--sites", "4"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N ≤ 3"));
}

#[test]
fn spectrum_honours_grid_override_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let csv = dir.path().join("s.csv");
    let o =
        qd3(&["spectrum", "--grid-points", "12", "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["spectrum"]["n_generic"], 12);
    assert_eq!(r["spectrum"]["n_states"], 6);
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("curve,state,u_re,u_im,re,im"));
}

#[test]
fn counting_violation_exits_with_usage_error() {
    let o = qd3(&["bae", "--l1", "2", "--l2", "0", "--l3", "0"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bae_finds_a_matched_state_and_replays_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o =
            qd3(&["bae", "--l1", "1", "--l2", "0", "--l3", "0", "--starts", "64", "--out", out.to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let r = report(&a);
    let matches = r["bethe"]["matching"]["matches"].as_array().unwrap();
    assert!(matches.iter().any(|m| m["deviation"].as_f64().unwrap() < 1e-6));
}

#[test]
fn seed_precedence_is_flag_then_environment_then_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = ModelParams::default_profile(1);
    p.rng_seed = 5;
    let cfg = write_config(dir.path(), "c.json", &p);
    let out = dir.path().join("r.json");
    let o = out.to_str().unwrap();
    let seed_of = |args: &[&str], envs: &[(&str, &str)]| {
        let mut full = vec!["verify", "--scope", "local", "--samples", "1", "--config", &cfg, "--out", o];
        full.extend_from_slice(args);
        assert_eq!(qd3(&full, envs).status.code(), Some(0));
        report(&out)["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(&[], &[]), 5);
    assert_eq!(seed_of(&[], &[("QD3_SEED", "11")]), 11);
    assert_eq!(seed_of(&["--seed", "17"], &[("QD3_SEED", "11")]), 17);
    assert_eq!(qd3(&["verify", "--config", &cfg], &[("QD3_SEED", "x")]).status.code(), Some(2));
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = qd3(&["verify", "--scope", "local", "--samples", "1", "--timings", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&out)["timings"][0]["phase"], "verify");
}
