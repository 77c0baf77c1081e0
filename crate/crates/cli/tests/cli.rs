use std::process::Command;

use deq_cli::{catalog, load, run_text, CliError, RunOptions};

fn deq(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_deq")).args(args).output().unwrap()
}

#[test]
fn empty_config_yields_no_records() {
    let out = run_text("", RunOptions::default()).unwrap();
    assert!(out.records.is_empty());
    assert_eq!(out.exit_code(), 0);
    let out = run_text("seed = 4\n", RunOptions::default()).unwrap();
    assert!(out.records.is_empty());
}

#[test]
fn catalog_has_guaranteed_entries() {
    for name in ["ssd-rational-grid", "counterexample-ball", "dgn-skew"] {
        assert!(catalog::entry(name).is_some(), "{name}");
    }
    for e in catalog::ENTRIES {
        let text = catalog::entry_config(e.name).unwrap();
        let cfg = deq_cli::parse(&text).unwrap();
        assert!(!cfg.scenarios.is_empty(), "{} has no scenario", e.name);
        assert!(cfg.scenarios.iter().all(|s| s.builtin.as_deref() == Some(e.name)));
        assert!(cfg.scenarios.iter().all(|s| s.kind.name() == e.kind));
    }
    let listing = String::from_utf8(deq(&["list"]).stdout).unwrap();
    assert!(listing.contains("dgn-skew"));
}

#[test]
fn bundled_dgn_reports_excess_demand() {
    let out = run_text(&load("dgn-skew").unwrap(), RunOptions::default()).unwrap();
    assert_eq!(out.records.len(), 1);
    let r = &out.records[0];
    assert_eq!(r["verdict"], "Found");
    assert_eq!(r["residuals"]["z"], serde_json::json!([1.0, 0.0]));
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn records_carry_required_fields() {
    let out = run_text(catalog::bundled("coercive").unwrap().text, RunOptions::default()).unwrap();
    for r in &out.records {
        for key in ["scenario", "anchor", "grids", "tolerances", "seed", "verdict", "residuals", "witnesses"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
    let failed = &out.records[1];
    assert_eq!(failed["verdict"], "ExtensionFailed");
    assert_eq!(failed["witnesses"][0]["y"], serde_json::json!([0.5, 0.5]));
}

#[test]
fn unknown_kind_names_scenario_and_path() {
    let text = "[[scenario]]\nname = \"first\"\nkind = \"equilibrium\"\n[[scenario]]\nname = \"second\"\nkind = \"bogus\"\n";
    match run_text(text, RunOptions::default()) {
        Err(CliError::Config { scenario, path, .. }) => {
            assert_eq!(scenario.as_deref(), Some("second"));
            assert_eq!(path, "scenario[1].kind");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_instance_names_field() {
    let text = r#"
[[scenario]]
name = "bad"
kind = "coercive"
[scenario.instance]
problem = "strong_geq"
bifunction = { name = "sq_norm_gap" }
cone = { type = "orthant", dim = 2 }
mode = "zero_witness"
r = "one"
r1 = 2.0
"#;
    match run_text(text, RunOptions::default()) {
        Err(CliError::Config { scenario, path, .. }) => {
            assert_eq!(scenario.as_deref(), Some("bad"));
            assert_eq!(path, "instance.r");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn grid_cap_reports_scenario_and_field() {
    let text = r#"
[[scenario]]
name = "fine"
kind = "equilibrium"
grids = { res = 1e-5 }
[scenario.instance]
problem = "strong_geq"
bifunction = { name = "sq_norm_gap" }
domain = { shape = "box", lo = [0.0, 0.0], hi = [1.0, 1.0] }
"#;
    let err = run_text(text, RunOptions::default()).unwrap_err();
    assert!(matches!(&err, CliError::Run { scenario, path, .. } if scenario == "fine" && path == "grids.res"));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mismatch = dir.path().join("mismatch.cfg");
    std::fs::write(
        &mismatch,
        "[[scenario]]\nname = \"m\"\nkind = \"dgn\"\nexpect = { verdict = \"NoSolutionOnGrid\" }\n[scenario.instance]\neconomy = { name = \"rotation\" }\n",
    )
    .unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[[scenario]]\nname = \"b\"\n").unwrap();
    let out_path = dir.path().join("out.jsonl");

    let ok = deq(&["run", "counterexample", "-q", "--out", out_path.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out_path).unwrap().lines().count(), 3);
    assert_eq!(deq(&["run", mismatch.to_str().unwrap(), "-q"]).status.code(), Some(2));
    let e = deq(&["run", bad.to_str().unwrap()]);
    assert_eq!(e.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&e.stderr).contains("`b`"));
    assert_eq!(deq(&["run", "no-such-config"]).status.code(), Some(1));
}

#[test]
fn overrides_apply() {
    let text = catalog::bundled("nash").unwrap().text;
    let out = run_text(
        text,
        RunOptions {
            seed: Some(99),
            res: Some(0.1),
        },
    )
    .unwrap();
    for r in &out.records {
        assert_eq!(r["seed"], 99);
        assert_eq!(r["grids"]["res"], 0.1);
    }
    assert_eq!(out.records[0]["report"]["solve"]["resolutions"], serde_json::json!([0.1, 0.1]));
}

#[test]
fn rerun_is_byte_identical() {
    let text = catalog::bundled("dense_sets").unwrap().text;
    let a = run_text(text, RunOptions::default()).unwrap().to_lines();
    let b = run_text(text, RunOptions::default()).unwrap().to_lines();
    assert_eq!(a, b);
}
