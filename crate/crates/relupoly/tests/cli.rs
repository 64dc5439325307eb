//! End-to-end runs of the `relupoly` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn relupoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relupoly")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("relupoly-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_corner_net(dir: &Path) -> PathBuf {
    let path = dir.join("corner.json");
    std::fs::write(&path, relupoly::fixtures::corner_net().to_json_string()).unwrap();
    path
}

#[test]
fn construct_then_check_strict() {
    let dir = scratch("construct");
    let o = relupoly(&["construct", "identifiable", "--arch", "2,2,2,1", "--seed", "3", "--out", arg(&dir)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let net = dir.join("net.json");
    let trail: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("trail.json")).unwrap()).unwrap();
    assert_eq!(trail["stages"].as_array().unwrap().len(), 2);

    let o = relupoly(&["check", arg(&net), "--all", "--box", "1", "--strict"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["verdicts"].as_array().unwrap().iter().all(|v| v["status"] == "pass"));
    assert!(v["identifiability"].is_object());

    let trail = dir.join("trail.json");
    let o = relupoly(&["check", arg(&net), "--all", "--box", "1", "--trail", arg(&trail)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["identifiability"].is_object());
}

#[test]
fn failing_verdict_under_strict_exits_with_one() {
    let dir = scratch("strict");
    let o = relupoly(&["construct", "nonidentifiable", "--arch", "2,2,4,2", "--out", arg(&dir)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.join("block.json").exists());
    let net = dir.join("net.json");
    assert_eq!(relupoly(&["check", arg(&net), "--box", "1"]).status.code(), Some(0));
    let o = relupoly(&["check", arg(&net), "--box", "1", "--strict", "--format", "txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("cTPIC"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = scratch("bad");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"layers\": 3}").unwrap();
    assert_eq!(relupoly(&["complex", arg(&bad)]).status.code(), Some(2));
    assert_eq!(relupoly(&["eval", arg(&dir.join("missing.json")), "--at", "0,0"]).status.code(), Some(2));
    assert_eq!(
        relupoly(&["construct", "identifiable", "--arch", "2,1,2,1", "--out", arg(&dir)]).status.code(),
        Some(2)
    );
    assert_eq!(relupoly(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn eval_is_exact() {
    let dir = scratch("eval");
    let net = write_corner_net(&dir);
    let o = relupoly(&["eval", arg(&net), "--at", "1/2,3/4", "--at", "-1,5"]);
    let v: Vec<Vec<String>> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, vec![vec!["1/4".to_string()], vec!["4".to_string()]]);
}

#[test]
fn render_and_depgraph_outputs() {
    let dir = scratch("render");
    let net = write_corner_net(&dir);
    let svg = dir.join("c.svg");
    assert!(relupoly(&["render", arg(&net), "--box", "4", "--out", arg(&svg)]).status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("#d62728"));
    assert!(!dir.join("c.svg.tmp").exists());

    let o = relupoly(&["depgraph", arg(&net), "--format", "dot"]);
    assert!(stdout(&o).starts_with("digraph"));
    let o = relupoly(&["render", arg(&net), "--format", "dot"]);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn reports_are_reproducible() {
    let dir = scratch("report");
    let net = write_corner_net(&dir);
    let a = stdout(&relupoly(&["report", arg(&net), "--box", "4", "--seed", "5"]));
    let b = stdout(&relupoly(&["report", arg(&net), "--box", "4", "--seed", "5"]));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["input"]["sha256"].as_str().unwrap().len(), 64);
    assert!(v.get("timings").is_none());
    let t: serde_json::Value =
        serde_json::from_str(&stdout(&relupoly(&["report", arg(&net), "--box", "4", "--timings"]))).unwrap();
    assert!(t["timings"].is_object());
}

#[test]
fn fiber_system_in_both_formats() {
    let dir = scratch("fiber");
    let net = write_corner_net(&dir);
    let txt = stdout(&relupoly(&["fiber", arg(&net), "--box", "4", "--format", "txt"]));
    assert!(txt.contains("Alignment") && txt.contains("mu[0]"));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&relupoly(&["fiber", arg(&net), "--box", "4"]))).unwrap();
    assert!(json.is_object());
    let member: serde_json::Value =
        serde_json::from_str(&stdout(&relupoly(&["fiber", arg(&net), "--box", "4", "--member", arg(&net)]))).unwrap();
    assert_eq!(member["member"], true);
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = scratch("threads");
    let net = write_corner_net(&dir);
    let o = Command::new(env!("CARGO_BIN_EXE_relupoly"))
        .args(["complex", arg(&net)])
        .env("RELUPOLY_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
}
