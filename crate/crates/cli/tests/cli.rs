use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
seed = 5
dimension = 2

[population]
kind = "point-mass"
theta = [1.0, 0.5]

[alternatives]
count = 5
[alternatives.space]
kind = "uniform-box"
lo = [0.0, 0.0]
hi = [1.0, 1.0]

[voters]
count = 6

[annotation.pairs]
kind = "round-robin"
repeats = 15

[audit]
epsilons = [0.0, 0.1]
[audit.consistency]
partitions = 2

[distortion]
resolution = 5
"#;

fn socialrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_socialrm")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("experiment.toml");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("run");
    let out_s = out.display().to_string();
    let o = socialrm(&["run", "--config", &cfg, "--out", &out_s, "--threads", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["dataset.txt", "model.json", "audit.json", "distortion.json", "verify.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let table = socialrm(&["report", "--out", &out_s]);
    assert!(table.status.success());
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains("unanimity") && text.contains("distortion"), "{text}");

    let rows = socialrm(&["report", "--out", &out_s, "--format", "rows"]);
    let text = String::from_utf8(rows.stdout).unwrap();
    let parsed = socialrm::harness::parse_rows(&text).unwrap();
    // Three axioms, two epsilons, five anchors each.
    assert_eq!(parsed.len(), 3 * 2 * 5);
}

#[test]
fn stage_subcommands_reproduce_a_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let whole = dir.path().join("whole").display().to_string();
    let split = dir.path().join("split").display().to_string();
    assert!(socialrm(&["run", "--config", &cfg, "--out", &whole]).status.success());
    for stage in ["simulate", "fit", "audit", "distort", "verify"] {
        let o = socialrm(&[stage, "--config", &cfg, "--out", &split]);
        assert!(o.status.success(), "{stage}: {}", stderr(&o));
    }
    for f in ["voters.txt", "slate.txt", "dataset.txt", "model.json", "audit.json", "distortion.json", "verify.json"] {
        assert_eq!(
            fs::read(Path::new(&whole).join(f)).unwrap(),
            fs::read(Path::new(&split).join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let dataset = |name: &str, seed: &str| {
        let out = dir.path().join(name).display().to_string();
        let o = socialrm(&["run", "--config", &cfg, "--out", &out, "--seed", seed, "--stage", "simulate"]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(dir.path().join(name).join("dataset.txt")).unwrap()
    };
    assert_eq!(dataset("a", "9"), dataset("b", "9"));
    assert_ne!(dataset("c", "9"), dataset("d", "10"));
}

#[test]
fn invalid_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = CONFIG.replace(
        "kind = \"point-mass\"\ntheta = [1.0, 0.5]",
        "kind = \"gaussian\"\nmean = [1.0, 0.5]\nvariance = [1.0, -1.0]",
    );
    let cfg = write_config(dir.path(), &bad);
    let o = socialrm(&["run", "--config", &cfg, "--out", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("population.variance[1]"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(socialrm(&["run", "--bogus"]).status.code(), Some(1));
    assert_eq!(socialrm(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_artifacts_are_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("empty").display().to_string();

    let o = socialrm(&["report", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("audit.json"), "{}", stderr(&o));

    let o = socialrm(&["fit", "--config", &cfg, "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dataset.txt"));
    let manifest = fs::read_to_string(Path::new(&out).join("manifest.json")).unwrap();
    assert!(manifest.contains("\"failed\""));
}
