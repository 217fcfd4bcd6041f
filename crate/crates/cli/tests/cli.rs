use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file).to_string_lossy().into_owned()
}

fn indrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indrec")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn advise_prints_requested_number_of_lines() {
    let o = indrec(&["advise", &corpus("rev.thy"), "--goal", "rev2_rev1", "--top", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3, "{out}");
    assert!(lines[0].trim_start().starts_with("1 "));
}

#[test]
fn missing_file_is_an_input_error() {
    let o = indrec(&["advise", "/nonexistent/x.thy"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn advise_json_field_order() {
    let o = indrec(&["advise", &corpus("rev.thy"), "--goal", "rev2_rev1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let keys = ["\"tool_version\"", "\"goal\"", "\"config\"", "\"recommendations\"", "\"timing_ms\""];
    let pos: Vec<usize> = keys.iter().map(|k| out.find(k).unwrap_or_else(|| panic!("{k} missing"))).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{out}");
    let rec = ["\"rank\"", "\"total\"", "\"induction_points\"", "\"generalisation_points\"", "\"tactic\""];
    let pos: Vec<usize> = rec.iter().map(|k| out.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let n = v["recommendations"].as_array().unwrap().len();
    assert!((1..=10).contains(&n));
}

#[test]
fn advise_without_goal_json_is_an_array() {
    let o = indrec(&["advise", &corpus("rev.thy"), "--json", "--top", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().is_some_and(|a| a.len() > 1));
}

#[test]
fn unknown_goal_exits_2() {
    let o = indrec(&["advise", &corpus("rev.thy"), "--goal", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explain_lists_generalisation_heuristic() {
    let o = indrec(&["explain", &corpus("rev.thy"), "--goal", "rev2_rev1", "--candidate", "induct xs arbitrary: ys"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("nipkow_generalisation")).unwrap();
    assert!(line.split_whitespace().any(|w| w == "true"), "{line}");
    assert!(out.lines().last().unwrap().starts_with("total "));
}

#[test]
fn explain_json_contributions_sum_to_total() {
    let o = indrec(&["explain", &corpus("rev.thy"), "--goal", "rev2_rev1", "--candidate", "induct xs arbitrary: ys", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let sum: i64 = v["heuristics"].as_array().unwrap().iter().map(|h| h["contribution"].as_i64().unwrap()).sum();
    assert_eq!(sum, v["total"].as_i64().unwrap());
    assert_eq!(
        v["induction_points"].as_i64().unwrap() + v["generalisation_points"].as_i64().unwrap(),
        v["total"].as_i64().unwrap()
    );
}

#[test]
fn explain_pruned_candidate_exits_3() {
    let o = indrec(&["explain", &corpus("rev.thy"), "--goal", "rev2_rev1", "--candidate", "induct xs rule: rev2.induct"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("arity-mismatch"));
}

#[test]
fn dump_subgoals() {
    let o = indrec(&["dump", &corpus("rev.thy"), "--goal", "rev2_rev1", "--stage", "subgoals", "--candidate", "induct xs"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2, "{out}");
    assert!(out.lines().next().unwrap().starts_with("rev2 Nil ys"));
}

#[test]
fn unknown_stage_is_a_usage_error() {
    let o = indrec(&["dump", &corpus("rev.thy"), "--goal", "rev2_rev1", "--stage", "bogus"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn theory_needs_prelude_types() {
    let o = indrec(&["advise", &corpus("rev.thy"), "--no-prelude"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn custom_heuristics_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("only.heur");
    std::fs::write(
        &path,
        "(heuristic prefer_compound (phase induction) (weight 7)\n  (exists t (in induction_terms) (is_compound t)))\n",
    )
    .unwrap();
    let heur = path.to_string_lossy().into_owned();
    let o = indrec(&["advise", &corpus("rev.thy"), "--goal", "rev2_rev1", "--heuristics", &heur, "--top", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("  7  induct (rev1 xs)"), "{out}");

    std::fs::write(&path, "(heuristic broken").unwrap();
    let o = indrec(&["advise", &corpus("rev.thy"), "--heuristics", &heur]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_text_report() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let o = indrec(&["eval", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("coincidence"), "{out}");
}
