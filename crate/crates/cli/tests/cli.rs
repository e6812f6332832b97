use std::fs;
use std::path::Path;

use clap::Parser;
use mcflab_cli::config::{parse_config, Config, ConfigError, Layers};
use mcflab_cli::{plan, run, Cli, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

fn cli(out: &Path, args: &[&str]) -> Cli {
    let mut argv = vec!["mcflab", "--out", out.to_str().unwrap()];
    argv.extend_from_slice(args);
    Cli::parse_from(argv)
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn empty_document_gives_defaults() {
    assert_eq!(parse_config("").unwrap(), Config::default());
}

#[test]
fn malformed_numeric_names_its_key() {
    let err = parse_config("[flow]\nt_end = \"soon\"\n").unwrap_err();
    assert_eq!(err.key(), "flow.t_end");
    let err = parse_config("[geometry]\nradius = 1.2.3\n").unwrap_err();
    assert_eq!(err.key(), "geometry.radius");
    let mut layers = Layers::default();
    let err = layers.apply_override("soliton.step=fast").unwrap_err();
    assert_eq!(err.key(), "soliton.step");
}

#[test]
fn unknown_keys_are_rejected() {
    assert_eq!(
        parse_config("[flow]\nwarp = 9\n").unwrap_err(),
        ConfigError::UnknownKey("flow.warp".into())
    );
    assert_eq!(parse_config("[nowhere]\nx = 1\n").unwrap_err(), ConfigError::UnknownKey("nowhere".into()));
}

#[test]
fn out_of_range_values_name_their_key() {
    assert_eq!(parse_config("n = 0\n").unwrap_err().key(), "n");
    assert_eq!(parse_config("[existence]\nepss = [0.01, 0.1]\n").unwrap_err().key(), "existence.epss");
    assert_eq!(parse_config("[soliton]\nkind = \"shrinker\"\n").unwrap_err().key(), "soliton.kind");
}

#[test]
fn n_override_reaches_every_module() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(&cli(dir.path(), &["--set", "n=3", "preset", "sphere-shrink"])).unwrap();
    assert_eq!(p.config.n, 3);
    assert_eq!(p.config.flow_config().n, 3);
    assert_eq!(p.config.initial_profile(21).unwrap().n, 3);
    // The exact extinction time 1/6 is met only if the flow used n = 3.
    assert_eq!(run(cli(dir.path(), &["--set", "n=3", "preset", "sphere-shrink"])), EXIT_PASS);
    let m = manifest(dir.path());
    assert_eq!(m["config"]["n"], 3);
    assert_eq!(m["pass"], true);
}

#[test]
fn layers_apply_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(&cfg_path, "[soliton]\nstep = 0.02\nrho_max = 8\n").unwrap();
    let c = cli(
        dir.path(),
        &["--config", cfg_path.to_str().unwrap(), "--set", "soliton.rho_max=9", "soliton", "--kind", "expander"],
    );
    let p = plan(&c).unwrap();
    assert_eq!(p.config.soliton.step, 0.02);
    assert_eq!(p.config.soliton.rho_max, 9.0);
    assert_eq!(p.config.soliton.kind, "expander");
}

#[test]
fn sphere_shrink_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(cli(dir.path(), &["preset", "sphere-shrink"])), EXIT_PASS);
    let m = manifest(dir.path());
    assert_eq!(m["tool"], "mcflab");
    assert!(m["wall_time_s"].as_f64().unwrap() > 0.0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["report"]["extinction_rel_err"].as_f64().unwrap() < 1e-3);
    assert!(dir.path().join("radius.csv").exists());
}

#[test]
fn pinch_preserve_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(cli(dir.path(), &["preset", "pinch-preserve"])), EXIT_PASS);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("pinching_alpha.json")).unwrap()).unwrap();
    assert!(report["measured"]["min_m"].as_f64().unwrap() >= -1e-3);
}

#[test]
fn bowl_scan_crosses_every_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(cli(dir.path(), &["soliton", "--kind", "translator", "--alpha-list", "0.3,0.1,0.03"]));
    assert_eq!(code, EXIT_PASS);
    let decay: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("decay.json")).unwrap()).unwrap();
    let audits = decay["audits"].as_array().unwrap();
    assert_eq!(audits.len(), 3);
    assert!(audits.iter().all(|a| a["crosses"] == true));
    let csv = fs::read_to_string(dir.path().join("soliton.csv")).unwrap();
    assert!(csv.starts_with("d,u,H,kappa1,kappan,ratio,normV,residual"));
}

#[test]
fn failed_audit_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(cli(dir.path(), &["--set", "existence.tol=1e-12", "preset", "existence-construction"]));
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(manifest(dir.path())["pass"], false);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(cli(dir.path(), &["--set", "flow.nonsense=1", "preset", "sphere-shrink"])), EXIT_USAGE);
    assert_eq!(run(cli(dir.path(), &["preset", "no-such-preset"])), EXIT_USAGE);
    assert_eq!(run(cli(dir.path(), &["soliton", "--step=-1"])), EXIT_USAGE);
}

#[test]
fn identical_configs_give_identical_tables() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(run(cli(d.path(), &["--set", "flow.t_end=0.05", "flow", "--shape", "ellipsoid"])), EXIT_PASS);
    }
    let read = |d: &Path, f: &str| fs::read(d.join(f)).unwrap();
    assert_eq!(read(a.path(), "flow.csv"), read(b.path(), "flow.csv"));
    assert_eq!(read(a.path(), "history/snapshot_0003.csv"), read(b.path(), "history/snapshot_0003.csv"));
}

#[test]
fn saved_history_can_be_audited() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("flow");
    assert_eq!(run(cli(&hist, &["--set", "flow.t_end=0.1", "flow"])), EXIT_PASS);
    let out = dir.path().join("audit");
    let code = run(cli(
        &out,
        &["verify", "--estimate", "pinching", "--history", hist.join("history").to_str().unwrap()],
    ));
    assert_eq!(code, EXIT_PASS);
    let out = dir.path().join("pick");
    let code = run(cli(&out, &["pick", "--history", hist.join("history").to_str().unwrap(), "--seed-snapshot", "40"]));
    assert_eq!(code, EXIT_PASS);
}

#[test]
fn resolved_config_reruns_exactly() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(cli(dir.path(), &["--seed", "7", "--set", "spacetime.random_fields=5", "preset", "point-pick-demo"])), EXIT_PASS);
    let text = fs::read_to_string(dir.path().join("config.toml")).unwrap();
    let reparsed = parse_config(&text).unwrap();
    let p = plan(&cli(dir.path(), &["--set", "spacetime.random_fields=5", "preset", "point-pick-demo"])).unwrap();
    assert_eq!(reparsed, p.config);
}
