use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use tela::families::{alternating_chain, cnf_blowup, singleton_bridge_counterexample};
use tela::hoa::{parse_hoa, print_hoa};
use tela::{AcceptanceFormula, Tela};

fn tela(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tela"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    input.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(input);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_empty() {
    let empty = Tela::new(vec![], 1, [0], vec![], AcceptanceFormula::False, 0).unwrap();
    let o = tela(&["check", "empty"], Some(&print_hoa(&empty)));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "EMPTY\n");
    let o = tela(&["check", "empty"], Some(&print_hoa(&cnf_blowup(2))));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NONEMPTY\nwitness "));
}

#[test]
fn check_limitdet() {
    let a = print_hoa(&singleton_bridge_counterexample());
    let o = tela(&["check", "limitdet"], Some(&a));
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "NO\n"));
    let gfm = tela(&["limitdet", "--method", "gfm"], Some(&a));
    assert_eq!(gfm.status.code(), Some(0));
    let o = tela(&["check", "limitdet"], Some(&stdout(&gfm)));
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "SYNTACTIC\n"));
    let sum = tela(&["limitdet", "--method", "sum"], Some(&a));
    let o = tela(&["check", "limitdet"], Some(&stdout(&sum)));
    assert_eq!(o.status.code(), Some(0));
    assert!(["SYNTACTIC\n", "SEMANTIC\n"].contains(&stdout(&o).as_str()));
}

#[test]
fn determinize_blowup() {
    let input = print_hoa(&cnf_blowup(3));
    for method in ["product", "via-gba:cnf", "via-gba:split_remfin"] {
        let o = tela(&["determinize", "--method", method], Some(&input));
        assert_eq!(o.status.code(), Some(0), "{method}");
        let text = stdout(&o);
        let d = parse_hoa(&text).unwrap();
        assert!(d.is_deterministic() && d.is_complete());
        assert_eq!(print_hoa(&d), text);
    }
}

#[test]
fn model_check_example() {
    let dir = tempfile::tempdir().unwrap();
    let mdp = write(dir.path(), "m.mdp", &alternating_chain().to_string());
    let aut = write(dir.path(), "a.hoa", &print_hoa(&singleton_bridge_counterexample()));
    let o = tela(&["mc", "--mdp", &mdp, "--aut", &aut, "--quant"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.000000000000\n");
    let o = tela(&["mc", "--mdp", &mdp, "--aut", &aut, "--quant", "--reference"], None);
    assert_eq!(stdout(&o), "1.000000000000\n");
    let o = tela(&["mc", "--mdp", &mdp, "--aut", &aut, "--qual"], None);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "POSITIVE\n"));
}

#[test]
fn random_is_reproducible() {
    let args = ["random", "--states", "5", "--seed", "7"];
    let a = tela(&args, None);
    let b = tela(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let conv = tela(&["convert"], Some(&stdout(&a)));
    assert_eq!(conv.stdout, a.stdout);
    let gba = tela(&["convert", "--to", "gba", "--gba-method", "cnf"], Some(&stdout(&a)));
    assert!(parse_hoa(&stdout(&gba)).unwrap().acceptance().gba_sets().is_some());
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(tela(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(tela(&["check", "empty", "--nope"], None).status.code(), Some(2));
    assert_eq!(tela(&["determinize", "--method", "magic"], Some("")).status.code(), Some(2));
    let o = tela(&["check", "empty"], Some("HOA: v1\nStates: x\n"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stdin: 2:9:"));
    assert_eq!(tela(&["check", "empty", "/no/such/file"], None).status.code(), Some(3));
}

#[test]
fn bench_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bench.cfg",
        "instances = 3\nfamily = blowup\nmax_n = 3\nmethods = product,gba:cnf,gba:split_remfin\n",
    );
    let report = dir.path().join("report.txt");
    let o = tela(&["bench", "--config", &cfg, "--report", report.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("0 language mismatches"));
    let kv = fs::read_to_string(report).unwrap();
    assert!(kv.starts_with("tela-bench-report 1\n"));
    assert!(kv.contains("instance.2.gba:cnf.gba_marks 8\n"));
}
