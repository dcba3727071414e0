//! End-to-end runs of the binary. Every JSON document is checked against the
//! schema shipped in `schemas/`.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn assert_schema(name: &str, doc: &Value) {
    let path = schema_dir().join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name} schema: {errors:?}\n{doc:#}");
}

struct Run {
    code: i32,
    stdout: String,
    json: Value,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_altruism"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}"));
    Run {
        code: out.status.code().unwrap(),
        stdout,
        json,
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn generated(dir: &TempDir, kind: &str, name: &str) -> String {
    let r = run(&["generate", kind]);
    assert_eq!(r.code, 0);
    write(dir, name, &r.stdout)
}

fn d1d2_game(dir: &TempDir) -> String {
    let g = json!({
        "resources": [
            {"id": "d1", "delay": {"kind": "table", "values": ["1", "2", "3"]}},
            {"id": "d2", "delay": {"kind": "table", "values": ["5/2", "5/2", "5/2"]}}
        ],
        "agents": (1..=3).map(|i| json!({
            "id": format!("a{i}"), "beta": "0", "strategies": [["d1"], ["d2"]]
        })).collect::<Vec<_>>()
    });
    write(dir, "d1d2.json", &g.to_string())
}

#[test]
fn solve_example1_reports_no_equilibrium() {
    let dir = TempDir::new().unwrap();
    let game = generated(&dir, "example1", "ex1.json");
    let r = run(&["solve", "--game", &game]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["exists"], json!(false));
    assert_schema("solve", &r.json);
    assert_eq!(run(&["solve", "--game", &game, "--require-ne"]).code, 1);
    let o = run(&["oracle", "--game", &game, "--require-ne"]);
    assert_eq!(o.code, 1);
    assert_schema("oracle", &o.json);
}

#[test]
fn oracle_budget_refusal() {
    let dir = TempDir::new().unwrap();
    let game = generated(&dir, "example1", "ex1.json");
    let r = run(&["oracle", "--game", &game, "--budget", "3"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json["error"]["kind"], json!("budget"));
    assert_schema("error", &r.json);
}

#[test]
fn bad_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let junk = write(&dir, "junk.json", "not json");
    let r = run(&["validate", "--game", &junk]);
    assert_eq!(r.code, 2);
    assert_schema("error", &r.json);
    let bad_beta = write(
        &dir,
        "beta.json",
        r#"{"resources":[{"id":"e","delay":{"kind":"linear","a":"1"}}],
            "agents":[{"id":"a","beta":"3/2","strategies":[["e"]]}]}"#,
    );
    let r = run(&["validate", "--game", &bad_beta]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["error"]["kind"], json!("validation"));
    let r = run(&["solve"]);
    assert_eq!(r.code, 2);
    assert_schema("error", &r.json);
}

#[test]
fn validate_and_optimum() {
    let dir = TempDir::new().unwrap();
    let game = generated(&dir, "footnote-asym", "fa.json");
    let v = run(&["validate", "--game", &game]);
    assert_eq!(v.code, 0);
    assert_schema("validate", &v.json);
    assert_eq!(v.json["state_count"], json!("8"));
    let o = run(&["optimum", "--game", &game]);
    assert_schema("optimum", &o.json);
    assert_eq!(o.json["cost"], json!("20"));
    assert_eq!(o.json["assignment"]["a1"], json!(["r1"]));
    let sym = generated(&dir, "footnote-sym", "fs.json");
    let o = run(&["optimum", "--game", &sym]);
    assert_eq!(o.json["method"], json!("dp"));
    assert_eq!(o.json["cost"], json!("106"));
}

#[test]
fn dynamics_converges_on_linear_game_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let game = generated(&dir, "footnote-asym", "fa.json");
    let r = run(&[
        "dynamics",
        "--game",
        &game,
        "--policy",
        "round_robin",
        "--start",
        "1,0,0",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["converged"], json!(true));
    assert_schema("dynamics", &r.json);

    let traj = dir.path().join("t.txt");
    let args = [
        "dynamics",
        "--game",
        &game,
        "--policy",
        "random",
        "--seed",
        "7",
        "--start",
        "random",
        "--trajectory",
        traj.to_str().unwrap(),
    ];
    let a = run(&args);
    let text = std::fs::read_to_string(&traj).unwrap();
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_schema("dynamics", &a.json);
    let steps = a.json["trajectory"].as_array().unwrap();
    assert_eq!(text.lines().count(), steps.len());
    for line in text.lines() {
        assert_eq!(line.split_whitespace().count(), 6, "{line}");
        assert!(line.contains('→'));
    }
}

#[test]
fn example1_dynamics_cycle() {
    let dir = TempDir::new().unwrap();
    let game = generated(&dir, "example1", "ex1.json");
    let r = run(&[
        "dynamics",
        "--game",
        &game,
        "--start",
        "0,0,1,1",
        "--max-steps",
        "100",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["converged"], json!(false));
    assert_eq!(r.json["cycle_detected"], json!(true));
    assert_schema("dynamics", &r.json);
}

#[test]
fn output_independent_of_worker_count() {
    let dir = TempDir::new().unwrap();
    let game = generated(&dir, "footnote-sym", "fs.json");
    for cmd in ["solve", "oracle", "thresholds"] {
        let one = run(&["--workers", "1", cmd, "--game", &game]);
        let four = run(&["--workers", "4", cmd, "--game", &game]);
        assert_eq!(one.stdout, four.stdout, "{cmd}");
    }
}

#[test]
fn thresholds_footnote() {
    let dir = TempDir::new().unwrap();
    let game = generated(&dir, "footnote-sym", "fs.json");
    let r = run(&["thresholds", "--game", &game]);
    assert_schema("thresholds", &r.json);
    assert_eq!(r.json["optimum"], json!("106"));
    assert_eq!(r.json["n1_plus"], json!(2));
    assert_eq!(r.json["n1_minus"], json!(null));
}

#[test]
fn stabilize_and_vcg() {
    let dir = TempDir::new().unwrap();
    let game = d1d2_game(&dir);
    let target = write(&dir, "target.json", r#"{"target": {"d1": 1, "d2": 2}}"#);
    let r = run(&[
        "stabilize",
        "--game",
        &game,
        "--target",
        &target,
        "--verify",
    ]);
    assert_eq!(r.code, 0);
    assert_schema("stabilize", &r.json);
    assert_eq!(r.json["size"], json!(2));
    assert_eq!(r.json["verified"], json!(true));

    let costs = write(
        &dir,
        "costs.json",
        r#"{"costs": {"a1": {"d1": "0", "d2": "3"}, "a2": {"d1": "2", "d2": "1"}, "a3": {"d1": "5/2", "d2": "1"}}}"#,
    );
    let r = run(&[
        "stabilize",
        "--game",
        &game,
        "--target",
        &target,
        "--costs",
        &costs,
    ]);
    assert_schema("stabilize", &r.json);
    assert_eq!(r.json["total"], json!("2"));
    assert_eq!(r.json["allocation"]["a1"], json!("d1"));
    let v = run(&[
        "vcg", "--game", &game, "--target", &target, "--costs", &costs,
    ]);
    assert_eq!(v.code, 0);
    assert_schema("vcg", &v.json);
    // a1 takes the d1 slot nobody else wants, so its presence costs the others nothing
    assert_eq!(v.json["payments"]["a1"], json!("0"));

    let impossible = write(&dir, "t2.json", r#"{"d1": 3, "d2": 1}"#);
    let r = run(&["stabilize", "--game", &game, "--target", &impossible]);
    assert_eq!(r.code, 2);
}

#[test]
fn generators_emit_valid_documents() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.cnf", "p cnf 2 2\n1 -2 0\n2 0\n");
    let part = write(&dir, "part.txt", "# weights\n1 2 3\n");
    for kind in ["example1", "footnote-sym", "footnote-asym"] {
        assert_schema("game", &run(&["generate", kind]).json);
    }
    let s = run(&["generate", "sat-singleton", "--formula", &phi]);
    assert_schema("game", &s.json);
    for extra in [&[][..], &["--symmetric"][..]] {
        let mut args = vec!["generate", "sat-network", "--formula", &phi];
        args.extend_from_slice(extra);
        let net = run(&args);
        assert_eq!(net.code, 0);
        assert_schema("network", &net.json);
        args.push("--expand");
        assert_schema("game", &run(&args).json);
    }
    let p = run(&["generate", "partition", "--partition", &part]);
    assert_schema("network", &p.json);
    let file = write(&dir, "p.json", &p.stdout);
    let o = run(&["oracle", "--game", &file]);
    assert_eq!(o.code, 0);
    assert_eq!(o.json["exists"], json!(true));
    let opt = run(&["optimum", "--game", &file]);
    assert_eq!(opt.json["cost"], json!("45/2"));

    let missing = run(&["generate", "sat-singleton"]);
    assert_eq!(missing.code, 2);
}
