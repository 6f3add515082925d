use std::fs;
use std::path::Path;
use std::process::Command;

use lrd_harness::report::sha256_hex;
use lrd_harness::{parse_report, run_table_experiment, ExperimentConfig};

const SMALL: &str = r#"
experiment = "small"
n = 80
replicates = 6
seed = 11
d_ladder = [0.0, 0.3]
output = "unused"

[errors]
truncation = 400

[bandwidth]
values = [0.2, 1.0]
grid_lo = 0.1
grid_hi = 2.0
grid_count = 9

[rates]
n_ladder = [50, 100, 200, 400]
alphas = [0.9]

[conditions]
alphas = [0.4]
betas = [0.2]
mc_betas = [0.5]
ladder_lo = 6
ladder_hi = 9
families = ["farima"]
"#;

fn lrdreg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lrdreg")).args(args).env_remove("LRDREG_OUT").output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn hashes(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), sha256_hex(&fs::read(&p).unwrap()))
        })
        .collect();
    v.sort();
    v
}

#[test]
fn every_verb_writes_a_parseable_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    for verb in ["simulate", "table", "cv", "rates", "conditions"] {
        let out = tmp.path().join(verb);
        let o = lrdreg(&[verb, "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{verb}: {}", String::from_utf8_lossy(&o.stderr));
        let r = parse_report(&out).unwrap();
        assert_eq!(r.id, "small");
        assert!(!r.tables.is_empty());
    }
}

#[test]
fn reruns_are_byte_identical_and_seed_override_changes_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let run = |name: &str, extra: &[&str]| {
        let out = tmp.path().join(name);
        let mut args = vec!["cv", "--config", &cfg, "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert!(lrdreg(&args).status.success());
        hashes(&out)
    };
    let a = run("a", &[]);
    assert_eq!(a, run("b", &[]));
    assert_ne!(a, run("c", &["--seed", "12"]));
    assert_eq!(parse_report(&tmp.path().join("c")).unwrap().provenance.seed, 12);
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_lrdreg"))
        .args(["simulate", "--config", &cfg])
        .env("LRDREG_OUT", &out)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(out.join("summary.txt").exists());
}

#[test]
fn failures_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), &SMALL.replace("d_ladder = [0.0, 0.3]", "d_ladder = [0.0, 0.7]"));
    let o = lrdreg(&["table", "--config", &bad, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d_ladder[1]"));

    let missing = tmp.path().join("nope.toml");
    let o = lrdreg(&["table", "--config", missing.to_str().unwrap(), "--out", "x"]);
    assert_eq!(o.status.code(), Some(3));

    let cfg = write_config(tmp.path(), &SMALL.replace("[errors]", "[errors]\nfamily = \"stochastic-volatility\""));
    let o = lrdreg(&["table", "--config", &cfg, "--out", tmp.path().join("y").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let cfg = ExperimentConfig::load(&p).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }
}

#[test]
fn standard_error_shrinks_like_root_replicates() {
    let mut cfg = ExperimentConfig::from_toml(SMALL).unwrap();
    cfg.d_ladder = vec![0.0];
    cfg.bandwidth.values = vec![0.3];
    let se = |reps: usize| {
        let r = run_table_experiment(&ExperimentConfig { replicates: reps, ..cfg.clone() }).unwrap();
        r.table("mise").unwrap().select("mise_se", "h", &0.3.into())[0]
    };
    let ratio = se(100) / se(400);
    assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
}
