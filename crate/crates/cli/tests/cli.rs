use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bench(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks").join(name)
}

fn tamc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tamc"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn parse_reports_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tamc(dir.path(), &["parse", path(&bench("strb.ta.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["locations"], 4);
    assert_eq!(v["rules"], 6);
    assert_eq!(v["kind"], "concrete");
}

#[test]
fn syntax_errors_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.ta.json");
    std::fs::write(&f, "{\n  \"parameters\": [\"n\"\n}").unwrap();
    let out = tamc(dir.path(), &["parse", path(&f)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn semantic_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = tamc(dir.path(), &["cover", path(&bench("strb.ta.json")), "--location", "nowhere", "--param-mode"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tamc(
        dir.path(),
        &["cover", path(&bench("strb.ta.json")), "--location", "l3", "--init", r#"{"params":{"n":3,"t":1,"f":1}}"#],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = tamc(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_solver_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = tamc(
        dir.path(),
        &["--solver", "/nonexistent/z3", "reach", path(&bench("strb.ta.json")), "--pos", "l3"],
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cover_witness_replays_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let strb = bench("strb.ta.json");
    let out = tamc(
        dir.path(),
        &["cover", path(&strb), "--location", "l3", "--init", r#"{"params":{"n":4,"t":1,"f":1},"kappa":{"l1":3}}"#],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "coverable");
    let w = dir.path().join(v["witness"].as_str().unwrap());
    assert!(w.ends_with("strb.cover.witness.json"));
    let out = tamc(dir.path(), &["oracle", path(&strb), "--replay", path(&w)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "replayed");

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    doc["data"]["pos"] = serde_json::json!(["l0"]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out = tamc(dir.path(), &["oracle", path(&strb), "--replay", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unreachable_target_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = tamc(
        dir.path(),
        &["reach", path(&bench("strb.ta.json")), "--zero", "l0,l1,l2", "--pos", "l3", "--bound", "0"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "unsat");
}

#[test]
fn mc_exit_codes_and_lasso_replay() {
    let dir = tempfile::tempdir().unwrap();
    let spec = bench("strb_unforg.eltl");
    let out = tamc(dir.path(), &["mc", path(&bench("strb.ta.json")), "--spec", path(&spec)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "holds");

    let weak = bench("strb_weak.ta.json");
    let out = tamc(dir.path(), &["mc", path(&weak), "--spec", path(&spec)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "violated");
    let w = dir.path().join(v["witness"].as_str().unwrap());
    let out = tamc(dir.path(), &["oracle", path(&weak), "--replay", path(&w)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn digests_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (ta, spec) = (bench("strb_weak.ta.json"), bench("strb_unforg.eltl"));
    let args = ["mc", path(&ta), "--spec", path(&spec)];
    let a = json(&tamc(dir.path(), &args));
    let b = json(&tamc(dir.path(), &args));
    assert_eq!(a["digest"], b["digest"]);
    assert_eq!(a["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn gen_and_synth_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = tamc(d, &["gen", "sigma2", path(&bench("sigma2_true.qdl")), "-o", "s.ta.json", "--spec-out", "s.eltl"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = tamc(d, &["synth", "s.ta.json", "--spec", "s.eltl", "--num-bound", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["assignment"]["v1"], "1/1");
    assert!(v["candidates_tried"].as_u64().unwrap() >= 1);
    let out = tamc(d, &["oracle", "s.ta.json", "--replay", "s.synth.witness.json"]);
    assert_eq!(out.status.code(), Some(0));

    let out = tamc(d, &["gen", "sigma2", path(&bench("sigma2_false.qdl")), "-o", "f.ta.json", "--spec-out", "f.eltl"]);
    assert_eq!(out.status.code(), Some(0));
    let out = tamc(d, &["synth", "f.ta.json", "--spec", "f.eltl", "--num-bound", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "none_in_space");
}

#[test]
fn gen_3sat_cover() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (cnf, code) in [("example.cnf", 0), ("contradiction.cnf", 1)] {
        let out = tamc(d, &["gen", "3sat", path(&bench(cnf)), "-o", "t.ta.json"]);
        assert_eq!(out.status.code(), Some(0));
        let out = tamc(d, &["cover", "t.ta.json", "--location", "l_F", "--param-mode"]);
        assert_eq!(out.status.code(), Some(code), "{cnf}");
    }
    let out = tamc(d, &["gen", "3sat", path(&bench("example.cnf")), "-o", "np.ta.json", "--variant", "nonparam"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn oracle_search_mode() {
    let dir = tempfile::tempdir().unwrap();
    let strb = bench("strb.ta.json");
    let out = tamc(dir.path(), &["oracle", path(&strb), "--location", "l3", "--params", "n=4,t=1,f=1"]);
    assert_eq!(out.status.code(), Some(0));
    let out = tamc(dir.path(), &["oracle", path(&strb), "--location", "l3", "--params", "n=4,t=1,f=1", "--bound", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_is_read_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tamc.toml"), "seed = 7\n").unwrap();
    let out = tamc(dir.path(), &["cover", path(&bench("strb.ta.json")), "--location", "l3", "--param-mode"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["solver"]["seed"], 7);
    std::fs::write(dir.path().join("tamc.toml"), "colour = 1\n").unwrap();
    let out = tamc(dir.path(), &["parse", path(&bench("strb.ta.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = tamc(
        dir.path(),
        &["bench", path(&bench("manifest.json")), "--jobs", "2", "--out-dir", "out"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/bench.csv")).unwrap();
    assert!(csv.starts_with("case,query,locations,rules,verdict,time_ms"));
    assert!(csv.contains("strb-weak-unforg,mc,4,6,violated"));
    assert!(csv.contains("sat-contradiction,cover,5,5,not_coverable"));
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/bench.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 7);
}
