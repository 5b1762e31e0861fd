use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn treecut(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_treecut"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn first_number(text: &str, tag: &str) -> u64 {
    let line = text.lines().find(|l| l.starts_with(tag)).unwrap();
    line[tag.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn generated_hw_pipes_into_approx() {
    let g = treecut(&["gen", "hw", "--w", "4"], None);
    assert_eq!(g.status.code(), Some(0));
    let o = treecut(&["approx", "--w", "5", "-"], Some(&stdout(&g)));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(first_number(&stdout(&o), "WIDTH ") <= 10);
}

#[test]
fn approx_output_passes_verify() {
    let dir = tempfile::tempdir().unwrap();
    let decomp = dir.path().join("d.tcwdecomp");
    let dot = dir.path().join("d.dot");
    let graph = fixture("hw3.tcwgraph");
    let o = treecut(
        &[
            "approx",
            "--w",
            "3",
            graph.to_str().unwrap(),
            "--out",
            decomp.to_str().unwrap(),
            "--dot",
            dot.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let claimed = first_number(&stdout(&o), "WIDTH ");
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph"));
    let v = treecut(&["verify", graph.to_str().unwrap(), decomp.to_str().unwrap()], None);
    assert_eq!(v.status.code(), Some(0));
    let verified = first_number(&stdout(&v), "WIDTH ");
    assert_eq!(verified, claimed);
    assert!(verified <= 6);
}

#[test]
fn approx_reports_too_wide() {
    let k5 = fixture("k5.tcwgraph");
    let o = treecut(&["approx", "--w", "2", k5.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("TOOWIDE "));
}

#[test]
fn verify_reports_hw_witness_width() {
    let o = treecut(
        &[
            "verify",
            fixture("hw4.tcwgraph").to_str().unwrap(),
            fixture("hw4_witness.tcwdecomp").to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(first_number(&out, "WIDTH "), 5);
    assert!(out.contains("INTERNAL_WIDTH "));
    assert!(out.contains("ADHESION "));
}

#[test]
fn verify_rejects_an_invalid_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let decomp = dir.path().join("bad.tcwdecomp");
    std::fs::write(&decomp, "tcwdecomp 1 0\nb 0 2 0 1\n").unwrap();
    let o = treecut(&["verify", fixture("k3.tcwgraph").to_str().unwrap(), decomp.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("violation"));
}

#[test]
fn exact_on_a_single_vertex() {
    let o = treecut(&["exact", "-"], Some("tcwgraph 1 0\n"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("TCW 1\ntcwdecomp"));
}

#[test]
fn exact_respects_the_cap() {
    let o = treecut(&["exact", fixture("hw3.tcwgraph").to_str().unwrap(), "--cap", "8"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = treecut(&["exact", fixture("hw3.tcwgraph").to_str().unwrap(), "--cap", "9"], None);
    assert_eq!(first_number(&stdout(&o), "TCW "), 2);
}

#[test]
fn starcut_answers() {
    let o = treecut(&["starcut", fixture("k3_w2.starcut").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("YES\ntcwdecomp"));
    let no = "starcut 3 3 1 0\n0 1 1\n0 2 1\n1 2 1\n";
    let o = treecut(&["starcut", "-"], Some(no));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "NO\n");
}

#[test]
fn tw_tags_exactness() {
    let o = treecut(&["tw", fixture("k5.tcwgraph").to_str().unwrap()], None);
    assert_eq!(stdout(&o), "TW 4 EXACT\n");
    let big = treecut(&["gen", "random", "--n", "30", "--m", "60", "--seed", "1"], None);
    let o = treecut(&["tw", "-"], Some(&stdout(&big)));
    assert!(stdout(&o).starts_with("TW ") && stdout(&o).trim_end().ends_with(" UB"));
}

#[test]
fn gen_bisection_builds_the_reduction() {
    let o = treecut(&["gen", "bisection", "--graph", fixture("c4.tcwgraph").to_str().unwrap(), "--k", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(first_number(&stdout(&o), "tcwgraph "), 17396);
}

#[test]
fn gen_random_is_deterministic() {
    let args = ["gen", "random", "--n", "7", "--m", "9", "--max-mult", "3", "--seed", "11"];
    let a = treecut(&args, None);
    let b = treecut(&args, None);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("tcwgraph 7 "));
}

#[test]
fn malformed_input_names_the_line() {
    let o = treecut(&["tw", "-"], Some("tcwgraph 3 1\n\n0 q 1\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(treecut(&["approx"], None).status.code(), Some(2));
    assert_eq!(treecut(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(treecut(&["tw", "/nonexistent/file"], None).status.code(), Some(2));
}
