use std::fs;
use std::path::Path;
use std::process::Command as Process;

use sha2::{Digest, Sha256};

use grushin_core::experiment::{parse_config, run, Command, ExperimentConfig, Manifest};

const BIN: &str = env!("CARGO_BIN_EXE_grushin-lab");

fn lab(args: &[&str]) -> std::process::Output {
    Process::new(BIN).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn empty_config_yields_defaults() {
    assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
}

#[test]
fn eigen_scaling_at_gamma_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[physics]\ngamma = 1.0\n[discretization]\nn_cells = 1024\n",
    );
    let out = dir.path().join("out");
    let o = lab(&["eigen-scaling", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("scaling.json")).unwrap()).unwrap();
    assert_eq!(json["command"], "eigen-scaling");
    assert_eq!(json["schema_version"], 1);
    let slope = json["slope"].as_f64().unwrap();
    assert!((slope - 0.5).abs() <= 0.05, "{slope}");
    let csv = fs::read_to_string(out.join("scaling.csv")).unwrap();
    assert!(csv.starts_with("n,mu_n,lambda_n,ratio\n"));
    assert_eq!(csv.lines().count(), 1 + 57);
}

#[test]
fn check_class_on_zero_datum_is_a_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[discretization]\nn_cells = 128\n[initial_data.profile]\nkind = \"zero\"\n",
    );
    let out = dir.path().join("out");
    let o = lab(&["check-class", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("class.json")).unwrap()).unwrap();
    assert_eq!(json["reports"][0]["member"], false);
    assert_eq!(json["reports"][0]["k1_max"], 0.0);
}

#[test]
fn invalid_configuration_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[physics]\ngamma = 1.5\n[protocol]\nt1 = 0.3\n");
    let out = dir.path().join("out");
    let o = lab(&["forward", "--config", &bad, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gamma out of (0,1]"), "{err}");
    assert!(err.contains("protocol ordering"), "{err}");
    assert!(out.join("error.json").exists());

    let unknown = write(dir.path(), "u.toml", "[physics]\ngama = 0.5\n");
    assert_eq!(lab(&["forward", "--config", &unknown]).status.code(), Some(2));
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        lab(&["forward", "--config", missing.to_str().unwrap()]).status.code(),
        Some(4)
    );
}

#[test]
fn numerical_failure_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[discretization]\nn_cells = 128\n[initial_data.profile]\nkind = \"zero\"\n",
    );
    let out = dir.path().join("out");
    let o = lab(&["reconstruct", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("denominator floor"));
}

#[test]
fn unwritable_output_exits_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write(dir.path(), "file", "x");
    let out = format!("{blocker}/sub");
    let o = lab(&["check-class", "--out", &out]);
    assert_eq!(o.status.code(), Some(4));
}

fn small_ensemble(dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.discretization.n_cells = 128;
    cfg.discretization.dt = 2e-3;
    cfg.ensemble.count = 6;
    cfg.sweep.t_snap_list = vec![0.2, 0.3];
    cfg.output.directory = dir.to_path_buf();
    cfg
}

#[test]
fn manifest_hashes_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let m: Manifest = run(&small_ensemble(dir.path()), Command::StabilitySweep).unwrap();
    let names: Vec<&str> = m.files.iter().map(|f| f.path.as_str()).collect();
    for want in ["resolved_config.toml", "stability.json", "stability.csv", "t1_sweep.json", "t1_sweep.csv"] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    for f in &m.files {
        let bytes = fs::read(dir.path().join(&f.path)).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, f.sha256);
        assert_eq!(bytes.len() as u64, f.bytes);
    }
    let on_disk: Manifest =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(on_disk, m);
    let resolved = parse_config(&fs::read_to_string(dir.path().join("resolved_config.toml")).unwrap()).unwrap();
    assert_eq!(resolved, small_ensemble(dir.path()));
}

#[test]
fn stability_sweep_is_reproducible_and_seed_sensitive() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    run(&small_ensemble(a.path()), Command::StabilitySweep).unwrap();
    run(&small_ensemble(b.path()), Command::StabilitySweep).unwrap();
    let mut other = small_ensemble(c.path());
    other.ensemble.master_seed += 1;
    run(&other, Command::StabilitySweep).unwrap();
    let read = |d: &Path| fs::read(d.join("stability.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
    let json: serde_json::Value = serde_json::from_slice(&read(a.path())).unwrap();
    assert_eq!(json["reports"].as_array().unwrap().len(), 6);
}

#[test]
fn every_command_runs_on_a_small_grid() {
    for (cmd, file) in [
        (Command::Forward, "forward.csv"),
        (Command::Reconstruct, "reconstruction.csv"),
        (Command::Harnack, "harnack.csv"),
        (Command::CheckClass, "class.csv"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_ensemble(dir.path());
        cfg.discretization.n_cells = 200;
        let m = run(&cfg, cmd).unwrap();
        assert_eq!(m.command, cmd.name());
        assert!(dir.path().join(file).exists(), "{file}");
    }
}
