use std::path::PathBuf;
use std::process::Command;

use pickbody::cli::{run, Outcome, ReportFile};
use serde_json::{json, Value};
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, body: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(body).unwrap()).unwrap();
    path
}

fn cx(re: f64, im: f64) -> Value {
    json!({ "re": re, "im": im })
}

fn pickbody(args: &[&str], input: &PathBuf) -> Outcome {
    let mut full = vec!["pickbody".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.push("--in".into());
    full.push(input.display().to_string());
    run(full)
}

fn report(o: &Outcome) -> ReportFile {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("bad report ({e}): {}", o.stdout))
}

fn two_point(w2: f64) -> Value {
    json!({
        "id": "two-point",
        "points": [[cx(0.0, 0.0)], [cx(0.5, 0.0)]],
        "targets": [cx(0.0, 0.0), cx(w2, 0.0)],
    })
}

#[test]
fn solve_reports_unique_identity() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &two_point(0.5));
    let o = pickbody(&["solve"], &path);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let r = report(&o);
    assert_eq!(r.command, "solve");
    assert_eq!(r.verdicts[0].verdict, "Unique(1)");
    assert_eq!(r.witnesses["blaschke"]["degree"], 1);
}

#[test]
fn solve_rejects_unsolvable_targets() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &two_point(0.9));
    let o = pickbody(&["solve"], &path);
    assert_eq!(o.code, 1);
    assert_eq!(report(&o).verdicts[0].verdict, "None");
}

#[test]
fn malformed_input_exits_with_code_two() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"points\": [").unwrap();
    let o = pickbody(&["solve"], &path);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("malformed"));

    let unknown = write(&dir, "unknown.json", &json!({ "points": [], "colour": 3 }));
    assert_eq!(pickbody(&["solve"], &unknown).code, 2);

    let outside = write(
        &dir,
        "outside.json",
        &json!({ "points": [[cx(1.5, 0.0)], [cx(0.0, 0.0)]], "targets": [cx(0.0, 0.0), cx(0.0, 0.0)] }),
    );
    assert_eq!(pickbody(&["solve"], &outside).code, 2);
    assert_eq!(run(["pickbody", "solve"]).code, 2);
    assert_eq!(run(["pickbody", "frobnicate"]).code, 2);
}

#[test]
fn member_in_szego_ball() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &two_point(0.3));
    let o = pickbody(&["member"], &path);
    assert_eq!(o.code, 0);
    assert_eq!(report(&o).verdicts[0].verdict, "Member");

    let path = write(&dir, "q.json", &two_point(0.7));
    let o = pickbody(&["member"], &path);
    assert_eq!(o.code, 1);
    assert_eq!(report(&o).verdicts[0].verdict, "NonMember");
}

#[test]
fn bidisc_membership_uses_the_domain() {
    let dir = TempDir::new().unwrap();
    let body = json!({
        "domain": { "kind": "polydisc", "dim": 2 },
        "points": [[cx(0.0, 0.0), cx(0.1, 0.0)], [cx(0.5, 0.0), cx(0.0, 0.6)]],
        "targets": [cx(0.0, 0.0), cx(0.55, 0.0)],
    });
    let o = pickbody(&["member"], &write(&dir, "b.json", &body));
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert_eq!(report(&o).verdicts[0].verdict, "Member");
}

#[test]
fn diagonal_kernel_is_extremal() {
    let dir = TempDir::new().unwrap();
    let zero = cx(0.0, 0.0);
    let body = json!({
        "points": [[cx(0.0, 0.0)], [cx(0.3, 0.0)], [cx(0.0, 0.4)]],
        "kernel": [
            [cx(1.0, 0.0), zero, zero],
            [zero, cx(2.0, 0.0), zero],
            [zero, zero, cx(0.5, 0.0)],
        ],
    });
    let o = pickbody(&["extremal", "--samples", "20"], &write(&dir, "k.json", &body));
    assert_eq!(o.code, 0);
    assert_eq!(report(&o).verdicts[0].verdict, "Extremal");
}

#[test]
fn recognize_round_trip() {
    let dir = TempDir::new().unwrap();
    let nodes = [(0.2, 0.1), (-0.3, 0.4), (0.5, -0.2)];
    let body = json!({
        "points": nodes.iter().map(|&(a, b)| vec![cx(a, b)]).collect::<Vec<_>>(),
    });
    let o = pickbody(&["recognize"], &write(&dir, "s.json", &body));
    assert_eq!(o.code, 0);
    let r = report(&o);
    assert_eq!(r.verdicts[0].verdict, "Szego");
    assert!(r.verdicts[0].residual < 1e-9);

    // Feed the recovered nodes back in; the kernel must be recognized again.
    let alpha = r.witnesses["alpha"].clone();
    let again = json!({
        "points": alpha.as_array().unwrap().iter().map(|z| vec![z.clone()]).collect::<Vec<_>>(),
    });
    let o = pickbody(&["recognize"], &write(&dir, "t.json", &again));
    assert_eq!(o.code, 0);

    let zero = cx(0.0, 0.0);
    let diag = json!({
        "points": body["points"],
        "kernel": [[cx(1.0, 0.0), zero, zero], [zero, cx(1.0, 0.0), zero], [zero, zero, cx(1.0, 0.0)]],
    });
    let o = pickbody(&["recognize"], &write(&dir, "d.json", &diag));
    assert_eq!(o.code, 1);
    assert_eq!(report(&o).verdicts[0].verdict, "NotSzego");
}

#[test]
fn non_hermitian_kernel_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let body = json!({
        "points": [[cx(0.0, 0.0)], [cx(0.3, 0.0)]],
        "kernel": [[cx(1.0, 0.0), cx(0.2, 0.0)], [cx(0.5, 0.0), cx(1.0, 0.0)]],
    });
    assert_eq!(pickbody(&["member"], &write(&dir, "k.json", &body)).code, 2);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let body = json!({
        "points": [[cx(0.1, 0.0)], [cx(-0.2, 0.3)], [cx(0.4, 0.4)]],
        "seed": 9,
    });
    let path = write(&dir, "p.json", &body);
    let strip = |o: &Outcome| {
        let mut v: Value = serde_json::from_str(&o.stdout).unwrap();
        v["timing_ms"] = Value::Null;
        v
    };
    let a = pickbody(&["extremal", "--samples", "5"], &path);
    let b = pickbody(&["extremal", "--samples", "5"], &path);
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(report(&a).seed, 9);
    let c = pickbody(&["extremal", "--samples", "5", "--seed", "10"], &path);
    assert_eq!(report(&c).seed, 10);
}

#[test]
fn report_schema_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &two_point(0.5));
    let o = pickbody(&["distance"], &path);
    assert_eq!(o.code, 0);
    let r = report(&o);
    let text = serde_json::to_string(&r).unwrap();
    let back: ReportFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert!((r.verdicts[0].residual - 0.5).abs() < 1e-12);
}

#[test]
fn csv_has_one_row_per_verdict() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "p.json",
        &json!({ "points": [[cx(0.0, 0.0)], [cx(0.5, 0.0)], [cx(0.0, -0.4)]] }),
    );
    let o = pickbody(&["verify", "--theorem", "lemmas", "--format", "csv"], &path);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "command,instance_id,verdict,residual,seed");
    assert_eq!(lines.len(), 1 + 4);
    assert!(lines[1..].iter().all(|l| l.starts_with("verify,") && l.contains("Pass")));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &two_point(0.5));
    let out = dir.path().join("report.json");
    let o = run([
        "pickbody",
        "boundary",
        "--in",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    let r: ReportFile = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r.verdicts[0].verdict, "BoundaryScale");
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_pickbody");
    let ok = write(&dir, "ok.json", &two_point(0.5));
    let bad = write(&dir, "bad.json", &two_point(0.9));
    let status = |p: &PathBuf| {
        Command::new(bin)
            .args(["solve", "--in", p.to_str().unwrap()])
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status(&ok), Some(0));
    assert_eq!(status(&bad), Some(1));
    assert_eq!(status(&dir.path().join("missing.json")), Some(2));
}
