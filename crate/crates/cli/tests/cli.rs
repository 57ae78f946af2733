use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn tccp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tccp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn hiding_example_checks() {
    let o = tccp(&[
        "check",
        "--program",
        &data("hiding.tccp"),
        "--formula",
        &data("next_out_b.ltl"),
        "-k",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("valid: main sat next O(y=b)"));
}

#[test]
fn refuted_claim_prints_a_table() {
    let o = tccp(&[
        "check",
        "--program",
        &data("tell_true.tccp"),
        "--formula",
        &data("out_a.ltl"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("refuted"));
    assert!(out.contains("t | I    | O"), "{out}");
    assert!(out.contains("1 | true | true"), "{out}");
}

#[test]
fn unguarded_recursion_is_a_static_error() {
    let o = tccp(&[
        "check",
        "--program",
        &data("unguarded.tccp"),
        "--formula",
        &data("out_a.ltl"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("call `p(x)`"), "{}", stderr(&o));
}

#[test]
fn parse_errors_exit_two() {
    let o = tccp(&[
        "check",
        "--program",
        &data("out_a.ltl"),
        "--formula",
        &data("out_a.ltl"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = tccp(&[
        "check",
        "--program",
        &data("missing.tccp"),
        "--formula",
        &data("out_a.ltl"),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stop_has_one_record_per_element() {
    let o = tccp(&["trace", "--program", &data("stop.tccp"), "-k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.split("\n\n").count(), 3, "{out}");
    assert!(out.contains("t=1 in=x=a out=x=a"));
}

#[test]
fn tell_traces_begin_with_the_told_output() {
    let o = tccp(&["trace", "--program", &data("tell_a.tccp"), "-k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for rec in out.trim_end().split("\n\n") {
        let first = rec.lines().next().unwrap();
        let ok = ["t=1 in=true out=x=a", "t=1 in=x=a out=x=a", "t=1 in=false out=false"].contains(&first);
        assert!(ok, "{first}");
    }
}

#[test]
fn json_trace_matches_text_trace() {
    let text = stdout(&tccp(&["trace", "--program", &data("tell_a.tccp"), "-k", "2"]));
    let json = stdout(&tccp(&[
        "trace",
        "--program",
        &data("tell_a.tccp"),
        "-k",
        "2",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let recs = v.as_array().unwrap();
    assert_eq!(recs.len(), text.trim_end().split("\n\n").count());
    assert_eq!(recs[0][0]["t"], 1);
    assert_eq!(recs[0][0]["out"], "x=a");
}

#[test]
fn denotational_trace_and_comparison() {
    let op = stdout(&tccp(&["trace", "--program", &data("par.tccp"), "-k", "2"]));
    let den = stdout(&tccp(&[
        "trace",
        "--program",
        &data("par.tccp"),
        "-k",
        "2",
        "--denotational",
    ]));
    assert_eq!(op, den);
    let o = tccp(&["trace", "--program", &data("par.tccp"), "-k", "2", "--compare"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("agree"));
}

#[test]
fn comparison_reports_the_difference() {
    let o = tccp(&["trace", "--program", &data("now.tccp"), "-k", "2", "--compare"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("differ"));
    assert!(out.contains("denotational only: <true, true>"), "{out}");
}

#[test]
fn trace_writes_to_out_file() {
    let path = std::env::temp_dir().join(format!("tccp-trace-{}.txt", std::process::id()));
    let o = tccp(&[
        "trace",
        "--program",
        &data("stop.tccp"),
        "-k",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(written.starts_with("t=1 in=true out=true"));
}

#[test]
fn bundled_proof_replays() {
    let o = tccp(&[
        "prove",
        "--program",
        &data("hiding.tccp"),
        "--proof",
        &data("hiding.proof"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("root       T7       ok [bounded-oracle]"), "{out}");
    assert!(out.contains("root check (k=4): valid"));
}

#[test]
fn freshness_violation_names_the_node() {
    let o = tccp(&["prove", "--program", &data("par.tccp"), "--proof", &data("fresh.proof")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("both       T5(I, Y) rejected"), "{}", stdout(&o));
}

#[test]
fn undeclared_procedure_exits_two() {
    let o = tccp(&[
        "prove",
        "--program",
        &data("par.tccp"),
        "--proof",
        &data("undeclared.proof"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("undeclared procedure `q`"));
}

#[test]
fn selftest_matrix() {
    let o = tccp(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches(" pass").count(), 5);
    let o = tccp(&["selftest", "--system", "degenerate"]);
    assert_eq!(o.status.code(), Some(0));
    let o = tccp(&["selftest", "--system", "broken", "-k", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["axioms_pass"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn verdicts_do_not_depend_on_workers() {
    let (p, f) = (data("par.tccp"), data("out_a.ltl"));
    let run = |w: &str| {
        stdout(&tccp(&[
            "check",
            "--program",
            &p,
            "--formula",
            &f,
            "--workers",
            w,
            "--format",
            "json",
        ]))
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn zero_bound_is_rejected() {
    let o = tccp(&["trace", "--program", &data("stop.tccp"), "-k", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
