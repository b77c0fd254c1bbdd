//! The `isomat` binary: JSON schema, exit codes and round trips.

use std::process::{Command, Output};

use isomat::graph::Graph;
use proptest::prelude::*;
use serde_json::Value;

fn isomat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isomat"))
        .args(args)
        .env_remove("ISOMAT_THREADS")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = isomat(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("one JSON object");
    v["report"].clone()
}

#[test]
fn analyze_reports() {
    let c5 = report(&["analyze", "--fixture", "c5", "--json"]);
    assert_eq!(c5["tau"], 3);
    assert_eq!(c5["kappa_star"], 3);
    assert_eq!(c5["kappa"], 5);
    assert_eq!(c5["kappa_B"], "inf");
    assert_eq!(c5["family"], "C5");

    let inline = report(&["analyze", "--n", "5", "--edges", "0-1,1-2,2-3,3-4,4-0", "--json"]);
    assert_eq!(inline, c5);

    let w5 = report(&["analyze", "--fixture", "w5", "--json"]);
    assert_eq!(w5["kappa"], 6);
    assert_eq!(w5["kappa_B"], "inf");

    let w7 = report(&["analyze", "--fixture", "w7", "--json"]);
    assert_eq!(w7["kappa"], 7);
    assert_eq!(w7["kappa_B"], 4);

    let empty = report(&["analyze", "--n", "0", "--json"]);
    assert_eq!(empty["tau"], "inf");
    assert_eq!(empty["kappa_star"], 0);
    assert_eq!(empty["kappa"], 0);

    let looped = report(&["analyze", "--n", "2", "--edges", "0-1", "--loops", "0,1", "--json"]);
    assert_eq!(looped["kappa"], 2);
}

#[test]
fn file_input_forms_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = Graph::wheel(6);
    let text = dir.path().join("w6.txt");
    std::fs::write(&text, g.to_text()).unwrap();
    let hex = dir.path().join("w6.hex");
    std::fs::write(&hex, format!("# W6\n{}\n", g.to_hex())).unwrap();
    let a = report(&["analyze", text.to_str().unwrap(), "--json"]);
    let b = report(&["analyze", hex.to_str().unwrap(), "--json"]);
    assert_eq!(a, b);
    assert_eq!(a["kappa"], 5);
}

#[test]
fn verify_exit_codes() {
    let ok = isomat(&["verify", "cconnect", "--n", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    let summary: Value = serde_json::from_slice(ok.stdout.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(summary["record"], "summary");
    assert_eq!(summary["status"], "pass");

    assert_eq!(isomat(&["verify", "vconnect", "--n", "9"]).status.code(), Some(2));
    assert_eq!(isomat(&["verify", "nonsense", "--n", "3"]).status.code(), Some(2));
    assert_eq!(isomat(&["verify", "halfcirc", "--n", "6"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.jsonl");
    let cp = dir.path().join("cp.json");
    let r = Command::new(env!("CARGO_BIN_EXE_isomat"))
        .args(["verify", "unique", "--n", "5", "--threads", "2", "--checkpoint"])
        .arg(&cp)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().contains("\"status\":\"pass\""));
    let checkpoint: Value = serde_json::from_str(&std::fs::read_to_string(&cp).unwrap()).unwrap();
    assert_eq!(checkpoint["version"], 1);
    assert!(checkpoint["next"].is_null());
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_isomat"))
        .args(["verify", "oracle", "--n", "3"])
        .env("ISOMAT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_isomat"))
        .args(["verify", "oracle", "--n", "3"])
        .env("ISOMAT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn printed_graphs_reparse() {
    for name in ["c5", "w5", "w6", "w7", "k44", "k2", "p4"] {
        let text = isomat(&["fixture", name]);
        let hex = isomat(&["fixture", name, "--hex"]);
        let a: Graph = String::from_utf8(text.stdout).unwrap().parse().unwrap();
        let b: Graph = String::from_utf8(hex.stdout).unwrap().trim().parse().unwrap();
        assert_eq!(a.code(), b.code(), "{name}");
    }
    let orbit = isomat(&["orbit", "--fixture", "c5", "--json"]);
    let v: Value = serde_json::from_slice(&orbit.stdout).unwrap();
    let rep: Graph = v["representative"].as_str().unwrap().parse().unwrap();
    assert_eq!(rep.min_degree(), Some(2));
    assert_eq!(v["min_degree"], 2);
}

#[test]
fn split_and_circuits_json() {
    let out = isomat(&["split", "--fixture", "p4", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["prime"], false);
    assert_eq!(v["structure"]["type"], "pendant");
    let out = isomat(&["circuits", "--fixture", "k44", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["search"]["q"], 4);
    let out = isomat(&["circuits", "--fixture", "c5", "--within", "0,1,2", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["circuits"].as_array().unwrap().len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn malformed_input_exits_two(junk in "[ -~]{0,24}") {
        prop_assume!(junk.parse::<Graph>().is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, &junk).unwrap();
        prop_assert_eq!(isomat(&["analyze", path.to_str().unwrap()]).status.code(), Some(2));
        // Inline junk is either a valid edge list or a usage error.
        let inline = isomat(&["analyze", "--n", "4", "--edges", &junk]).status.code();
        prop_assert!(matches!(inline, Some(0) | Some(2)), "{:?}", inline);
    }

    #[test]
    fn analyze_output_graph_round_trips(code in 0u128..1 << 15) {
        let g = Graph::from_code(5, code).unwrap();
        let out = isomat(&["analyze", "--json", "--n", "5", "--edges", &edge_list(&g), "--loops", &loop_list(&g)]);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        let back: Graph = v["graph"].as_str().unwrap().parse().unwrap();
        prop_assert_eq!(back, g);
    }
}

fn edge_list(g: &Graph) -> String {
    g.edges().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(",")
}

fn loop_list(g: &Graph) -> String {
    g.loops().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
