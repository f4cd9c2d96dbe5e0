use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsim")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn unknown_key_is_rejected_with_valid_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[params]\nepsilonn = 0.1\n");
    let o = qsim(&["validate", "h2-energy", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("epsilonn") && err.contains("epsilon"), "{err}");
}

#[test]
fn duplicate_key_is_a_parse_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[params]\nepsilon = 0.1\nepsilon = 0.2\n");
    let o = qsim(&["validate", "h2-energy", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parse"), "{}", stderr(&o));
}

#[test]
fn out_of_range_value_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[params]\nepsilon = -1.0\n");
    let o = qsim(&["h2-energy", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("`epsilon`") && err.contains("out of range"), "{err}");
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn wrong_type_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[params]\nbits = \"ten\"\n");
    let o = qsim(&["validate", "h2-energy", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`bits`"), "{}", stderr(&o));
}

#[test]
fn empty_config_validates_to_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "");
    let o = qsim(&["validate", "qft-check", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let parsed: toml::Table = text.parse().unwrap();
    assert_eq!(parsed["experiment"].as_str(), Some("qft-check"));
    assert_eq!(parsed["params"]["max_qubits"].as_integer(), Some(8));

    // the normalized output is itself a valid config
    let again = write(tmp.path(), "again.toml", &text);
    let o2 = qsim(&["validate", "qft-check", "--config", &again]);
    assert_eq!(String::from_utf8(o2.stdout).unwrap(), text);
}

#[test]
fn config_for_another_experiment_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "experiment = \"wavepacket\"\n");
    let o = qsim(&["validate", "qft-check", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("wavepacket"));
}

#[test]
fn missing_integral_file_names_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nowhere.txt");
    let cfg = write(tmp.path(), "c.toml", &format!("[params]\nintegrals = {:?}\n", missing.display().to_string()));
    let o = qsim(&["h2-energy", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere.txt"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_names_the_path() {
    let o = qsim(&["validate", "qft-check", "--config", "/definitely/not/here.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/definitely/not/here.toml"));
}

#[test]
fn thermal_bound_run_writes_artifacts_and_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("tb");
    let cfg = write(tmp.path(), "c.toml", "[params]\ndraws = 20\n");
    let o = qsim(&["thermal-bound", "--config", &cfg, "--seed", "3", "--threads", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("PASS")));
    assert!(!stdout.contains("FAIL"));

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["metrics"]["violations"], 0);
    assert_eq!(summary["seed"], 3);
    assert_eq!(summary["passed"], true);
    assert!(summary["schema"]["tables"]["thermal_bound.csv"].is_array());

    let prov: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["experiment"], "thermal-bound");

    let mut rows = csv::Reader::from_path(out.join("thermal_bound.csv")).unwrap();
    assert_eq!(rows.records().count(), 20 * 3 * 2);
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let out = tmp.path().join(threads);
        let o = qsim(&["trotter-scaling", "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        fs::read(out.join("trotter_scaling.csv")).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = qsim(&["no-such-experiment"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn list_shows_every_experiment() {
    let o = qsim(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["trotter-scaling", "h2-energy", "lindblad-converge", "cooling-ensemble"] {
        assert!(text.lines().any(|l| l == name), "{name} missing");
    }
}
