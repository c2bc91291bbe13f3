use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn syzygy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syzygy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = syzygy(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error(args: &[&str]) -> (i32, Value) {
    let out = syzygy(args);
    let code = out.status.code().expect("exit code");
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert!(out.stdout.is_empty());
    (code, err)
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn report_envelope() {
    let r = json_ok(&["counts", "--k", "4", "--seed", "3"]);
    assert_eq!(r["command"], "counts");
    assert_eq!(r["inputs"]["k"], 4);
    assert_eq!(r["inputs"]["seed"], 3);
    assert_eq!(r["inputs"]["p"], 101);
    assert!(r.get("timings").is_none());
    assert!(r["artifact_version"].is_string());
    assert_eq!(r["results"]["dimV"], 21);

    let r = json_ok(&["counts", "--k", "4", "--timings"]);
    assert!(r["timings"].is_object());
}

#[test]
fn text_output() {
    let out = syzygy(&["counts", "--k", "3", "--text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("command           counts"), "{text}");
    assert!(text.contains("results:\n"));
    assert!(text.lines().any(|l| l.trim_start().starts_with("dimV ")));
}

#[test]
fn exit_codes() {
    let (code, e) = error(&["strand", "--ideal", "/nonexistent/ideal.json"]);
    assert_eq!(code, 3);
    assert_eq!(e["error"]["kind"], "file_not_found");

    let (code, e) = error(&["strand", "--bogus"]);
    assert_eq!(code, 2);
    assert_eq!(e["error"]["kind"], "parse");

    let (code, _) = error(&["mukai", "--k", "4", "--kind", "surface"]);
    assert_eq!(code, 2);

    let (code, _) = error(&["counts", "--k", "3", "--p", "100"]);
    assert_eq!(code, 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let (code, _) = error(&["strand", "--ideal", &bad]);
    assert_eq!(code, 2);

    let curve = path(dir.path(), "c6.json");
    json_ok(&["mukai", "--k", "3", "--out", &curve]);
    let out = Command::new(env!("CARGO_BIN_EXE_syzygy"))
        .args(["ranklocus", "--ideal", &curve, "--index", "1", "--rank", "3"])
        .env("SYZYGY_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "budget_exceeded");
}

#[test]
fn help_exits_cleanly() {
    let out = syzygy(&["--help"]);
    assert!(out.status.success());
    let help = String::from_utf8(out.stdout).unwrap();
    for cmd in ["strand", "rank", "scheme", "restrict", "ranklocus", "gensyz"] {
        assert!(help.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn grassmannian_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let g6 = path(dir.path(), "g6.json");
    let s = path(dir.path(), "s.json");
    let r = json_ok(&[
        "grass", "--n", "6", "--out", &g6, "--minimal", "1,2,3,4,5,6", "--syzygy-out", &s,
    ]);
    assert_eq!(r["results"]["num_quadrics"], 15);
    assert_eq!(r["results"]["minimal"]["rank"], 5);
    assert_eq!(r["results"]["minimal"]["linear_span_is_u_wedge_u"], true);

    let strand = json_ok(&["strand", "--ideal", &g6]);
    assert_eq!(strand["results"]["dims"], serde_json::json!([15, 35, 21, 0]));
    assert_eq!(strand["results"]["ideal_hash"], r["results"]["ideal_hash"]);

    let rank = json_ok(&["rank", "--ideal", &g6, "--syzygy", &s]);
    assert_eq!(rank["results"]["rank"], 5);

    let scheme = json_ok(&["scheme", "--ideal", &g6, "--syzygy", &s]);
    assert_eq!(scheme["results"]["p"], 2);

    let matrix = path(dir.path(), "pi.json");
    let lift = json_ok(&["lift", "--ideal", &g6, "--syzygy", &s, "--matrix-out", &matrix]);
    let res = &lift["results"];
    assert_eq!(res["regime"], "grassmannian");
    assert_eq!(res["embedding"], true);
    assert_eq!(res["pfaffian_pullbacks_in_ideal"], true);
    assert_eq!(res["pfaffian_pullback_rank"], 15);
    assert!(Path::new(&matrix).exists());
}

#[test]
fn mukai_restriction_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let g6 = path(dir.path(), "g6.json");
    let sub = path(dir.path(), "sub.json");
    json_ok(&["grass", "--n", "6", "--out", &g6]);
    let m = json_ok(&["mukai", "--k", "4", "--strand", "--sub-out", &sub]);
    assert_eq!(m["results"]["dims"], serde_json::json!([15, 35, 21, 0]));

    let r = json_ok(&["restrict", "--ideal", &g6, "--sub", &sub, "--index", "2"]);
    assert_eq!(r["results"]["shape"], serde_json::json!([21, 21]));
    assert_eq!(r["results"]["rank"], 21);
    assert_eq!(r["results"]["injective"], true);

    let d = json_ok(&["dualdeg", "--k", "3"]);
    assert_eq!(d["results"]["degree"], 5);
    let d = json_ok(&["dualdeg", "--k", "3", "--kind", "k3"]);
    assert_eq!(d["results"]["empty"], true);
}

#[test]
fn text_ideal_files() {
    let dir = tempfile::tempdir().unwrap();
    let g5 = path(dir.path(), "g5.txt");
    json_ok(&["grass", "--n", "5", "--out", &g5]);
    let strand = json_ok(&["strand", "--ideal", &g5, "--pmax", "3"]);
    assert_eq!(strand["results"]["dims"], serde_json::json!([5, 5, 0]));
}

#[test]
fn bott_and_gensyz() {
    let b = json_ok(&["bott", "--weight=-4,0,0,0,-2"]);
    assert_eq!(b["results"]["result"]["i0"], 3);
    assert_eq!(b["results"]["result"]["dim"], 5);
    let t = json_ok(&["bott", "--corollary", "--k", "4"]);
    assert!(t["results"].is_object() || t["results"].is_array());

    let g = json_ok(&["gensyz", "--index", "2", "--rank", "5", "--classify", "20"]);
    assert_eq!(g["command"], "gensyz");
    let a = json_ok(&["gensyz", "--index", "2", "--rank", "5", "--classify", "20", "--seed", "4"]);
    let b = json_ok(&["gensyz", "--index", "2", "--rank", "5", "--classify", "20", "--seed", "4"]);
    assert_eq!(a, b);
}

#[test]
fn quadric_rank_locus() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = path(dir.path(), "k3.json");
    json_ok(&["mukai", "--k", "3", "--kind", "k3", "--out", &k3]);
    let r = json_ok(&["ranklocus", "--ideal", &k3, "--index", "0", "--rank", "4", "--dmax", "12"]);
    assert_eq!(r["results"]["psi_shape"], serde_json::json!([7, 7]));
    assert!(r["results"]["hilbert"]["empty_from"].is_u64());
}
