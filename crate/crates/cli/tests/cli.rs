use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lightasep(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightasep"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("LIGHTASEP_OUT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn manifest(dir: &Path, stem: &str) -> Value {
    serde_json::from_str(&read(dir, &format!("{stem}.manifest.json"))).unwrap()
}

#[test]
fn phase_of_totally_asymmetric_unit_rates() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        lightasep(dir.path(), &["phase", "--q", "0", "--alpha", "1", "--beta", "1", "--gamma", "0", "--delta", "0"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&read(dir.path(), "phase.json")).unwrap();
    for k in ["A", "B", "C", "D"] {
        assert_eq!(v[k].as_f64(), Some(0.0));
    }
    assert_eq!(v["phase"], "MaxCurrent");
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), read(dir.path(), "phase.json").trim());
    let m = manifest(dir.path(), "phase");
    assert_eq!(m["outputs"][0], "phase.json");
    assert!(m["created_unix"].as_u64().is_some());
}

#[test]
fn verify_relation_reports_residual() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["exact", "verify-relation", "--n", "4", "--q", "0.3", "--alpha", "0.8", "--beta", "0.9"];
    let o = lightasep(dir.path(), &[&args[..], &["--gamma", "0.1", "--delta", "0.05"]].concat());
    assert_eq!(code(&o), 0);
    let line = String::from_utf8_lossy(&o.stdout);
    assert!(line.starts_with("max residual"), "{line}");
    let csv = read(dir.path(), "verify-relation.csv");
    assert_eq!(csv.lines().next(), Some("k,l,lhs,rhs,residual"));
    assert_eq!(csv.lines().count(), 1 + 10);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&lightasep(p, &["phase", "--alpha", "1", "--beta", "1", "--bogus", "1"])), 2);
    assert_eq!(code(&lightasep(p, &["simulate", "--n", "5", "--alpha", "1", "--beta", "1", "--t", "1"])), 2);
    assert_eq!(code(&lightasep(p, &["phase", "--alpha", "1", "--beta", "1", "--A", "1"])), 2);
    assert_eq!(code(&lightasep(p, &["phase", "--alpha", "-1", "--beta", "1"])), 2);
    assert_eq!(code(&lightasep(p, &["experiment", "drift"])), 2);
    assert_eq!(code(&lightasep(p, &["experiment", "no-such-thing"])), 2);
    // AC = 1 excludes the relation
    let guard = ["exact", "verify-relation", "--n", "3", "--A", "2", "--B", "-0.1", "--C", "0.5", "--q", "0.3"];
    assert_eq!(code(&lightasep(p, &guard)), 3);
    assert_eq!(code(&lightasep(p, &["reproduce", "--seed", "42", "--only", "1,5"])), 0);
    assert_eq!(code(&lightasep(p, &["reproduce", "--seed", "42", "--only", "99"])), 2);
    assert_eq!(code(&lightasep(p, &["--help"])), 0);
}

#[test]
fn failed_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.txt"), "a = 0\nn_list = [20, 40]\n").unwrap();
    let cfg = dir.path().join("cfg.txt");
    let o = lightasep(dir.path(), &["experiment", "mass-split", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL terminal_split"));
    for f in ["mass-split.json", "mass-split.csv", "mass-split.raw.csv", "mass-split.manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lightasep"))
        .args(["exact", "mix", "--n", "3", "--r", "1", "--alpha", "1", "--beta", "1", "--name", "small"])
        .env("LIGHTASEP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&read(dir.path(), "small.json")).unwrap();
    assert!(v["t_mix"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("small.manifest.json").exists());
}

/// Runs `args` twice in the same directory and checks every data file is byte-identical
/// and the manifests differ at most in the timestamp.
fn assert_rerun_identical(args: &[&str], stem: &str, files: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let first = lightasep(dir.path(), args);
    assert!(code(&first) <= 1, "{}", String::from_utf8_lossy(&first.stderr));
    let a: Vec<String> = files.iter().map(|f| read(dir.path(), f)).collect();
    let mut ma = manifest(dir.path(), stem);
    std::thread::sleep(std::time::Duration::from_millis(1100));
    let second = lightasep(dir.path(), args);
    assert_eq!(code(&first), code(&second));
    let b: Vec<String> = files.iter().map(|f| read(dir.path(), f)).collect();
    let mut mb = manifest(dir.path(), stem);
    for (f, (x, y)) in files.iter().zip(a.iter().zip(&b)) {
        assert!(!x.is_empty(), "{f} is empty");
        assert_eq!(x, y, "{f} differs between reruns");
    }
    ma.as_object_mut().unwrap().remove("created_unix");
    mb.as_object_mut().unwrap().remove("created_unix");
    assert_eq!(ma, mb);
}

#[test]
fn simulate_is_byte_identical() {
    let args: Vec<&str> = "simulate --n 12 --r 2 --q 0.3 --alpha 0.9 --beta 0.6 --gamma 0.1 --delta 0.2 --t 20 \
                           --seed 17 --reps 4 --sample-dt 0.5 --sites 1,6,12 --snapshots"
        .split_whitespace()
        .collect();
    assert_rerun_identical(&args, "simulate", &["simulate.csv", "simulate.snapshots.txt", "simulate.init.txt"]);
}

#[test]
fn stochastic_experiments_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ("drift", "rho = 0.75\nhorizon = 40\nreplicas = 30\n"),
        ("coalescence", "a = 2\nn_list = [8, 16]\nreplicas = 40\n"),
        ("concentration", "{\"a\": 2, \"n_list\": [10, 20], \"replicas\": 20}"),
        ("hitting", "a = 2\nn_list = [10, 20]\nreplicas = 20\n"),
    ];
    for (name, text) in configs {
        let cfg = dir.path().join(format!("{name}.cfg"));
        std::fs::write(&cfg, text).unwrap();
        let files = [format!("{name}.json"), format!("{name}.csv"), format!("{name}.raw.csv")];
        let files: Vec<&str> = files.iter().map(String::as_str).collect();
        let args = ["experiment", name, "--config", cfg.to_str().unwrap(), "--seed", "5"];
        assert_rerun_identical(&args, name, &files);
    }
}

#[test]
fn init_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let init = dir.path().join("init.txt");
    std::fs::write(&init, "1:2,3:1,2:0\n").unwrap();
    let mut args = vec!["simulate", "--init", "file", "--init-file", init.to_str().unwrap()];
    args.extend("--alpha 1 --beta 1 --t 2 --seed 1".split_whitespace());
    let o = lightasep(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "simulate.csv");
    assert_eq!(csv.lines().next(), Some("rep,t,loc_1"));
    assert_eq!(csv.lines().nth(1), Some("0,0.0000000000000000e0,1"));
    let m = manifest(dir.path(), "simulate");
    assert_eq!(m["config"]["n"], 6);
    assert_eq!(m["seed"], 1);
}
