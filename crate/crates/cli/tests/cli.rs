use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_expanderlab"));
    c.env_remove("EXPANDERLAB_PRECISION_CAP");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_lines(text: &[u8]) -> Vec<Value> {
    String::from_utf8_lossy(text).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn verify_identity_exits_zero() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "ab.json",
        r#"[{"field":"fp","p":101,"elements":[2,3,5]},{"field":"fp","p":101,"elements":[7,11]}]"#,
    );
    let o = run(&["verify", s(&f), "--relation", "R6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lines = json_lines(&o.stdout);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["lhs"], "6");
    assert_eq!(lines[0]["verdict"], "Holds");
}

#[test]
fn verify_all_lists_side_condition_and_exits_64() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.json", r#"{"field":"q","elements":["1","2","3/2"]}"#);
    let o = run(&["verify", s(&f), "--all"]);
    assert_eq!(code(&o), 64);
    let lines = json_lines(&o.stdout);
    assert!(lines.iter().any(|v| v["error"] == "SideConditionViolated"));
    assert!(lines.iter().any(|v| v["name"] == "R1" && v["verdict"] == "Holds"));
}

#[test]
fn verify_r1_on_500_generated_triples() {
    let o = run(&["verify", "--random", "500", "--seed", "17", "--p", "97", "--relation", "R1"]);
    assert_eq!(code(&o), 0);
    let lines = json_lines(&o.stdout);
    assert_eq!(lines.len(), 500);
    assert!(lines.iter().all(|v| v["verdict"] == "Holds"));
}

#[test]
fn verify_rejects_unknown_relation_and_missing_input() {
    assert_eq!(code(&run(&["verify", "--random", "1", "--p", "7", "--relation", "R99"])), 64);
    assert_eq!(code(&run(&["verify", "--relation", "R1"])), 64);
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", r#"{"field":"fp","p":7,"elements":[9]}"#);
    assert_eq!(code(&run(&["verify", s(&f), "--relation", "R1"])), 64);
}

#[test]
fn pipeline_density_guard() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "a.json", r#"{"field":"fp","p":7,"elements":[1,2,3]}"#);
    let o = run(&["pipeline", s(&f), "--mode", "fp"]);
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("density"));
}

#[test]
fn pipeline_real_trace_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "a.json", r#"{"field":"q","elements":[2,3]}"#);
    let (o1, o2) = (dir.path().join("t1.json"), dir.path().join("t2.json"));
    assert_eq!(code(&run(&["pipeline", s(&f), "--mode", "real", "--out", s(&o1)])), 0);
    assert_eq!(code(&run(&["pipeline", s(&f), "--mode", "real", "--out", s(&o2)])), 0);
    let (b1, b2) = (fs::read(&o1).unwrap(), fs::read(&o2).unwrap());
    assert_eq!(b1, b2);
    let trace: Value = serde_json::from_slice(&b1).unwrap();
    let steps = trace["steps"].as_array().unwrap();
    assert!(steps.len() >= 5);
    assert_eq!(steps.last().unwrap()["report"]["name"], "R13");
    assert!(!String::from_utf8_lossy(&b1).contains('\r'));
}

#[test]
fn pipeline_mode_must_match_field() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "a.json", r#"{"field":"fp","p":101,"elements":[2,3,5,7]}"#);
    assert_eq!(code(&run(&["pipeline", s(&f), "--mode", "real"])), 64);
    assert_eq!(code(&run(&["pipeline", s(&f), "--mode", "fp"])), 0);
}

#[test]
fn search_exhaustive_row() {
    let o = run(&["search", "--p", "7", "--n", "2", "--mode", "exhaustive"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "p,n,value,exponent_lo,exponent_hi,certified,witness,seed");
    let cols: Vec<&str> = rows[1].split(',').collect();
    assert_eq!((cols[0], cols[1], cols[2], cols[5], cols[6]), ("7", "2", "3", "true", "2 4"));
}

#[test]
fn search_seed_is_reproducible() {
    let args = ["search", "--p", "101", "--n", "3,4", "--mode", "anneal", "--seed", "42", "--iterations", "200"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let again = bin().args(["--threads", "1"]).args(args).output().unwrap();
    assert_eq!(again.stdout, a.stdout);
}

#[test]
fn search_error_codes() {
    assert_eq!(code(&run(&["search", "--p", "4", "--n", "2"])), 64);
    assert_eq!(code(&run(&["search", "--p", "997", "--n", "8", "--budget", "1000"])), 65);
}

#[test]
fn energy_of_subgroup() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "h.json", r#"{"field":"fp","p":7,"elements":[1,2,4]}"#);
    let o = run(&["energy", s(&f), "--alpha", "2,3"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["energies"][0]["value"]["lo"], "27");
    assert_eq!(v["energies"][1]["value"]["lo"], "81");
}

#[test]
fn precision_cap_env_is_honoured() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "a.json", r#"{"field":"q","elements":[2,3,5]}"#);
    let o = bin().args(["energy", s(&f), "--alpha", "3/2"]).env("EXPANDERLAB_PRECISION_CAP", "32").output().unwrap();
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["energy", s(&f), "--alpha", "3/2"])), 0);
}

#[test]
fn manifest_replay_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&[
        "--threads",
        "2",
        "search",
        "--p",
        "31",
        "--n",
        "2,3",
        "--mode",
        "hillclimb",
        "--seed",
        "9",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let mpath = dir.path().join("r.csv.manifest.json");
    let manifest: Value = serde_json::from_str(&fs::read_to_string(&mpath).unwrap()).unwrap();
    assert_eq!(manifest["command"], "search");
    assert!(!manifest["args"].as_array().unwrap().iter().any(|a| a == "--threads"));
    let before = fs::read(&out).unwrap();
    let r = run(&["replay", s(&mpath)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(fs::read(&out).unwrap(), before);
    assert!(String::from_utf8_lossy(&r.stderr).contains("identical"));

    // A recorded digest that no longer matches the regenerated bytes.
    let mut m = manifest.clone();
    m["outputs"][0]["sha256"] = Value::from("0".repeat(64));
    fs::write(&mpath, serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(code(&run(&["replay", s(&mpath)])), 2);
}

#[test]
fn replay_detects_changed_inputs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "a.json", r#"{"field":"q","elements":[2,3]}"#);
    let out = dir.path().join("v.jsonl");
    assert_eq!(code(&run(&["verify", s(&f), "--relation", "R1,R3", "--out", s(&out)])), 0);
    write(&dir, "a.json", r#"{"field":"q","elements":[2,5]}"#);
    assert_eq!(code(&run(&["replay", s(&dir.path().join("v.jsonl.manifest.json"))])), 64);
}
