use std::fs;
use std::path::PathBuf;
use std::process::Command;

use layerlab::experiments::{parse_config, run, CurveSpec, DensitySpec, ExperimentConfig, ExperimentKind, OperatorSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_layerlab"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("layerlab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

const GAUSS: &str = r#"{
    "experiment": "gauss_identity",
    "operator": {"a2": [[1, 0], [0, 1]], "a1": [0, 0], "a0": 0},
    "curve": {"kind": "circle", "radius": 1},
    "n": [64, 128],
    "density": "constant"
}"#;

#[test]
fn list_names_every_experiment() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for k in ExperimentKind::ALL {
        assert!(text.contains(k.name()), "{}", k.name());
    }
}

#[test]
fn run_writes_csv_and_summary() {
    let dir = scratch("gauss");
    let cfg = dir.join("gauss.json");
    fs::write(&cfg, GAUSS).unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.join("out")).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("out/gauss_identity.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,quantity,value,residual,observed_order"));
    for line in lines {
        let residual: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(residual < 1e-10, "{line}");
    }
    let summary = fs::read_to_string(dir.join("out/summary.txt")).unwrap();
    assert!(summary.trim_end().ends_with("overall: PASS"), "{summary}");
}

#[test]
fn bad_configs_exit_with_an_error() {
    let dir = scratch("bad");
    for (name, text) in [
        ("unknown", r#"{"experiment": "nonsense", "n": [64]}"#),
        ("key", r#"{"experiment": "wtg", "n": [64], "colour": "red"}"#),
        ("syntax", r#"{"experiment": "#),
    ] {
        let cfg = dir.join(format!("{name}.json"));
        fs::write(&cfg, text).unwrap();
        let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{name}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = ExperimentConfig::new(
        ExperimentKind::KernelNorm,
        OperatorSpec::test_operators()[4].clone(),
        CurveSpec::Kite {},
        &[64, 128],
    )
    .with_budgets(&[1 << 10, 1 << 12]);
    let a = run(&cfg).unwrap().csv();
    let b = run(&cfg).unwrap().csv();
    assert_eq!(a, b);
}

#[test]
fn parallel_and_sequential_agree() {
    let cfg = parse_config(r#"{"experiment": "wtg", "n": [64, 128], "operator": {"a2": [[4, 0], [0, 1]]}}"#).unwrap();
    let par = run(&cfg).unwrap().csv();
    let seq = layerlab::par::sequential(|| run(&cfg).unwrap().csv());
    assert_eq!(par, seq);
}

#[test]
fn config_round_trips_through_json() {
    let cfg = ExperimentConfig::new(
        ExperimentKind::Regularity,
        OperatorSpec::default(),
        CurveSpec::Ellipse { a: 2.0, b: 1.0 },
        &[64, 128],
    )
    .with_density(DensitySpec::RoughSawtooth(4));
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(parse_config(&text).unwrap(), cfg);
}
