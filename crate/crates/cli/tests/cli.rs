use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn opnl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opnl")).args(args).output().expect("binary runs")
}

fn opnl_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opnl")).args(args).env(key, value).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("opnl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn suite<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["suites"].as_array().unwrap().iter().find(|s| s["suite"] == name).unwrap()
}

fn check<'a>(s: &'a Value, name: &str) -> &'a Value {
    s["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn passing_suite_exits_zero() {
    let out = opnl(&["verify", "--suite", "oper-xi", "--levels", "2", "--max-weight", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["schema"], "opnl/1");
    assert_eq!(r["status"], "pass");
    let s = suite(&r, "oper-xi");
    assert_eq!(s["checks"].as_array().unwrap().len(), 2);
    assert_eq!(s["config"]["seed"], 0);
}

#[test]
fn short_suite_names_are_accepted() {
    let out = opnl(&["verify", "xi", "--levels", "1", "--max-weight", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("suite oper-xi"));
}

#[test]
fn zero_levels_is_a_usage_error() {
    let out = opnl(&["verify", "--suite", "oper-xi", "--levels", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("must be positive"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(opnl(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(opnl(&["verify"]).status.code(), Some(2));
}

#[test]
fn pointed_only_suites_reject_plain_mode() {
    let out = opnl(&["verify", "--suite", "co-monoid", "--mode", "plain"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("pointed"));
}

#[test]
fn all_suites_report_in_order() {
    let args = ["verify", "--suite", "all", "--max-weight", "2", "--format", "json", "--seed", "7"];
    let out = opnl(&args);
    let r = json(&out);
    let names: Vec<&str> = r["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["oper-xi", "odot-monoidal", "oper-equiv", "box-identities", "theta", "co-monoid", "coend-quadratic"]
    );
    for s in ["oper-xi", "oper-equiv", "box-identities", "co-monoid"] {
        assert_eq!(suite(&r, s)["status"], "pass", "{s}");
    }
    for s in ["odot-monoidal", "theta", "coend-quadratic"] {
        assert_eq!(suite(&r, s)["status"], "fail", "{s}");
    }
    assert!(r["suites"].as_array().unwrap().iter().all(|s| s["config"]["seed"] == 7));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = ["verify", "--suite", "all", "--max-weight", "2", "--format", "json", "--seed", "3"];
    let a = opnl_env(&args, "OPNL_THREADS", "1");
    let b = opnl_env(&args, "OPNL_THREADS", "4");
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let text = ["verify", "--suite", "odot-monoidal", "--seed", "5", "--samples", "4"];
    assert_eq!(opnl(&text).stdout, opnl(&text).stdout);
}

#[test]
fn seeds_change_sampled_inputs() {
    let run = |seed: &str| {
        json(&opnl(&["verify", "--suite", "box-identities", "--samples", "3", "--seed", seed, "--format", "json"]))
    };
    let count = |r: &Value| check(suite(r, "box-identities"), "box product identities")["checked"].clone();
    let counts: Vec<Value> = ["1", "2", "3", "4"].iter().map(|s| count(&run(s))).collect();
    assert!(counts.iter().any(|c| *c != counts[0]));
}

#[test]
fn injected_faults_are_located() {
    let cases: [(&str, &[&str], &str); 7] = [
        ("oper-xi", &["--levels", "2", "--max-weight", "2"], "xi [1, 1] bijective on classes"),
        ("odot-monoidal", &["--max-weight", "2", "--samples", "2"], "right unit bijection"),
        ("oper-equiv", &["--max-weight", "3"], "ass: algebra laws"),
        ("box-identities", &["--samples", "3"], "box product identities"),
        ("theta", &["--degrees", "1", "--arity", "2"], "constant factors: products validate"),
        ("co-monoid", &["--degrees", "2", "--arity", "3"], "boxcirc monoid diagrams"),
        ("coend-quadratic", &["--degrees", "1", "--max-weight", "2"], "three-level maps against the two-level tensor"),
    ];
    for (name, extra, target) in cases {
        let mut args = vec!["verify", "--suite", name, "--format", "json"];
        args.extend_from_slice(extra);
        let clean = json(&opnl(&args));
        args.push("--inject-fault");
        let out = opnl(&args);
        assert_eq!(out.status.code(), Some(1), "{name}: {}", stderr(&out));
        let faulty = json(&out);
        let before = check(suite(&clean, name), target);
        let after = check(suite(&faulty, name), target);
        assert!(
            after["failures"].as_u64() > before["failures"].as_u64(),
            "{name}: {} vs {}",
            before["failures"],
            after["failures"]
        );
        let w = &after["witnesses"][0];
        assert!(!w["diagram"].as_str().unwrap().is_empty(), "{name}");
        assert_eq!(suite(&faulty, name)["config"]["inject_fault"], true);
    }
}

#[test]
fn oper_component_at_a_profile() {
    let r = json(&opnl(&["compute", "oper", "--profile", "(2,(1,1),(1,1))"]));
    assert_eq!(r["kind"], "oper-component");
    assert_eq!(r["value"]["level"], 3);
    // One orbit of planar shapes, with the two orderings of the root's children.
    assert_eq!(r["value"]["size"], 2);
    let whole = json(&opnl(&["compute", "oper", "--levels", "3", "--max-weight", "2", "--mode", "plain"]));
    let entry = whole["value"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["level"] == 3 && e["profile"] == serde_json::json!([[2], [1, 1], [1, 1]]))
        .unwrap()
        .clone();
    assert_eq!(entry["obj"].as_array().unwrap().len(), 2);
}

#[test]
fn circle_of_units_is_the_unit() {
    let r = json(&opnl(&["compute", "circle", "--left", "unit", "--right", "unit", "--arity", "4"]));
    assert_eq!(r["sizes"], serde_json::json!([0, 1, 0, 0, 0]));
    let r = json(&opnl(&["compute", "circle", "--left", "unit", "--right", "sigma", "--arity", "3"]));
    assert_eq!(r["sizes"], serde_json::json!([0, 1, 2, 6]));
}

#[test]
fn box_with_the_unit_is_canonically_the_left_factor() {
    for left in ["simplex:1", "simplex:2", "const:3"] {
        let r = json(&opnl(&["compute", "box", "--left", left, "--right", "unit", "--degrees", "3"]));
        assert_eq!(r["right_is_unit"], true);
        assert_eq!(r["canonical_iso_to_left"], true, "{left}");
    }
    let r = json(&opnl(&["compute", "box", "--left", "simplex:1", "--right", "simplex:0", "--degrees", "2"]));
    assert_eq!(r["right_is_unit"], false);
    assert!(r["canonical_iso_to_left"].is_null());
}

#[test]
fn compute_is_idempotent_and_writes_files() {
    let path = scratch("co.json");
    let p = path.to_str().unwrap();
    let out = opnl(&["compute", "co", "--operad", "ass", "--degrees", "3", "--out", p]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let first = std::fs::read(&path).unwrap();
    opnl(&["compute", "co", "--operad", "ass", "--degrees", "3", "--out", p]);
    assert_eq!(std::fs::read(&path).unwrap(), first);
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["schema"], "opnl/1");
    assert_eq!(v["kind"], "cosimplicial");
}

#[test]
fn written_artifacts_read_back_as_inputs() {
    let path = scratch("sigma.json");
    let p = path.to_str().unwrap();
    opnl(&["compute", "circle", "--left", "unit", "--right", "sigma", "--arity", "3", "--out", p]);
    let direct = json(&opnl(&["compute", "circle", "--left", "sigma", "--right", "sigma", "--arity", "3"]));
    let via = json(&opnl(&["compute", "circle", "--left", p, "--right", "sigma", "--arity", "3"]));
    assert_eq!(via["sizes"], direct["sizes"]);
}

#[test]
fn malformed_inputs_name_the_failing_path() {
    let path = scratch("bad.json");
    let p = path.to_str().unwrap();
    let out = opnl(&["compute", "box", "--left", "simplex:1", "--degrees", "1"]);
    let mut v = json(&out);
    v["value"]["levels"][0]["levels"][0]["atoms"] = Value::from(7);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = opnl(&["compute", "box", "--left", p, "--degrees", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("schema error at $.value.levels[0].levels[0].atoms"), "{}", stderr(&out));

    v["schema"] = Value::from("opnl/0");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = opnl(&["compute", "box", "--left", p, "--degrees", "1"]);
    assert!(stderr(&out).contains("schema error at $.schema"), "{}", stderr(&out));

    std::fs::write(&path, "{ not json").unwrap();
    let out = opnl(&["compute", "box", "--left", p, "--degrees", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("schema error at $"));
}

#[test]
fn coend_sizes_are_reported() {
    let r =
        json(&opnl(&["compute", "coend", "--degrees", "1", "--levels", "2", "--max-weight", "2", "--mode", "plain"]));
    let entries = r["value"]["entries"].as_array().unwrap();
    let size =
        |l: u64, p: Value| entries.iter().find(|e| e["level"] == l && e["profile"] == p).unwrap()["size"].clone();
    assert_eq!(size(1, serde_json::json!([[1]])), 2);
    assert_eq!(size(2, serde_json::json!([[2], [1, 1]])), 16);
}

#[test]
fn enumerations() {
    let rows =
        |args: &[&str]| String::from_utf8(opnl(args).stdout).unwrap().lines().map(String::from).collect::<Vec<_>>();
    assert_eq!(rows(&["enumerate", "profiles", "--levels", "1", "--weight", "3", "--positive"]), ["(3)"]);
    assert_eq!(
        rows(&["enumerate", "profiles", "--levels", "2", "--weight", "2", "--positive"]),
        ["(1,(2))", "(2,(1,1))"]
    );
    assert_eq!(rows(&["enumerate", "trees", "--profile", "(1,(4))"]).len(), 1);
    assert_eq!(rows(&["enumerate", "trees", "--profile", "(2,(2,1))"]).len(), 2);
    let j = json(&opnl(&[
        "enumerate",
        "decompositions",
        "--profile",
        "(2,(1,1),(1,1))",
        "--ells",
        "1,2",
        "--format",
        "json",
    ]));
    assert_eq!(j["count"], 1);
    assert_eq!(j["rows"][0]["base"], serde_json::json!([[2], [1, 1]]));
    let zeros = opnl(&["enumerate", "profiles", "--levels", "2", "--weight", "2"]);
    assert_eq!(zeros.status.code(), Some(2));
    let bounded = rows(&["enumerate", "profiles", "--levels", "2", "--weight", "1", "--max-width", "2"]);
    assert!(bounded.len() > 1);
}
