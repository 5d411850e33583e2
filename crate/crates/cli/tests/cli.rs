//! Configuration-contract and end-to-end driver tests.

use rkg_cli::config::{apply_overrides, parse_config, Experiment};
use rkg_cli::{experiment_of, run_experiment};
use std::fs;

fn minimal_scatter() -> &'static str {
    r#"{
        "experiment": "scatter",
        "catalog": [
            {"component": "f1", "amplitude": [0.5, 0.0], "width": 3.0}
        ]
    }"#
}

#[test]
fn defaults_are_filled_for_a_minimal_config() {
    let cfg = parse_config(minimal_scatter()).unwrap();
    assert_eq!(cfg.time.dt, 0.05);
    assert_eq!(cfg.grid.n, 128);
    assert_eq!(cfg.grid.length, 64.0);
    assert_eq!(cfg.experiment, Experiment::Scatter);
    assert_eq!(cfg.mass, 1.0);
}

#[test]
fn unknown_keys_are_rejected_with_their_path() {
    let text = r#"{
        "experiment": "scatter",
        "time": {"t_max": 10.0, "dt": 0.05, "frog": 3},
        "catalog": []
    }"#;
    let err = parse_config(text).unwrap_err().to_string();
    assert!(err.contains("time"), "{err}");
    assert!(err.contains("frog"), "{err}");
}

#[test]
fn fit_window_must_sit_inside_the_run() {
    let text = r#"{
        "experiment": "scatter",
        "time": {"t_max": 50.0, "fit_window": [10.0, 80.0]},
        "catalog": [{"component": "f1", "amplitude": [0.5, 0.0], "width": 3.0}]
    }"#;
    let err = parse_config(text).unwrap_err().to_string();
    assert!(err.contains("fit_window"), "{err}");
}

#[test]
fn oversized_system_b_coupling_names_the_measured_surrogate() {
    let text = r#"{
        "experiment": "scatter",
        "system": "B",
        "catalog": [
            {"component": "f1", "amplitude": [0.5, 0.0], "width": 3.0},
            {"component": "f2", "amplitude": [4.0, 0.0], "width": 3.0}
        ]
    }"#;
    let err = parse_config(text).unwrap_err().to_string();
    assert!(err.contains("gamma"), "{err}");
    assert!(err.contains("smallness"), "{err}");
}

#[test]
fn band_and_locality_validation_fire() {
    // width 1 on a coarse grid: band limit exceeds the dealias cutoff
    let text = r#"{
        "experiment": "cauchy",
        "grid": {"n": 16, "length": 64.0},
        "catalog": [{"component": "f1", "amplitude": [1.0, 0.0], "width": 1.0}]
    }"#;
    assert!(parse_config(text).is_err());

    // wide data on a small box: locality violated
    let text = r#"{
        "experiment": "cauchy",
        "grid": {"n": 64, "length": 32.0},
        "catalog": [{"component": "f1", "amplitude": [1.0, 0.0], "width": 4.0}]
    }"#;
    let err = parse_config(text).unwrap_err().to_string();
    assert!(err.contains("central half"), "{err}");
}

#[test]
fn overrides_patch_nested_keys() {
    let patched = apply_overrides(
        minimal_scatter(),
        &["time.dt=0.02".into(), "grid.n=96".into()],
    )
    .unwrap();
    let cfg = parse_config(&patched).unwrap();
    assert_eq!(cfg.time.dt, 0.02);
    assert_eq!(cfg.grid.n, 96);
}

#[test]
fn experiment_names_resolve_including_the_poincare_alias() {
    assert_eq!(experiment_of("poincare-check").unwrap(), Experiment::Poincare);
    assert_eq!(experiment_of("poincare").unwrap(), Experiment::Poincare);
    assert!(experiment_of("rotate").is_err());
}

#[test]
fn cauchy_end_to_end_writes_deterministic_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    fs::write(
        &config_path,
        r#"{
            "experiment": "cauchy",
            "grid": {"n": 96, "length": 96.0},
            "catalog": [
                {"component": "f1", "amplitude": [0.8, 0.0], "width": 4.0},
                {"component": "f2", "amplitude": [0.4, 0.0], "width": 4.0}
            ],
            "time": {"t_max": 2.0, "dt": 0.05, "samples": 5}
        }"#,
    )
    .unwrap();

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let summary = run_experiment(Experiment::Cauchy, &config_path, &out_a, &[]).unwrap();
    assert!(summary.pass);
    let summary2 = run_experiment(Experiment::Cauchy, &config_path, &out_b, &[]).unwrap();
    assert!(summary2.pass);

    let csv_a = fs::read(out_a.join("cauchy_series.csv")).unwrap();
    let csv_b = fs::read(out_b.join("cauchy_series.csv")).unwrap();
    assert!(!csv_a.is_empty());
    // identical config, bit-identical table
    assert_eq!(csv_a, csv_b);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("cauchy_summary.json")).unwrap())
            .unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["experiment"], "cauchy");
    assert!(json["criteria"].as_array().map(|a| !a.is_empty()).unwrap_or(false));
}

#[test]
fn mismatched_experiment_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    fs::write(&config_path, minimal_scatter()).unwrap();
    let err = run_experiment(Experiment::Cauchy, &config_path, dir.path(), &[])
        .unwrap_err()
        .to_string();
    assert!(err.contains("declares experiment"), "{err}");
}
