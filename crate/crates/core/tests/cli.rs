//! The command-line binary: subcommands, files and exit statuses.

mod common;

use std::process::{Command, Output};

use common::corpus_dir;

fn cpforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpforge"))
        .args(args)
        .current_dir(corpus_dir())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const GOLFERS: [&str; 10] = [
    "transform",
    "--from",
    "scomma",
    "--model",
    "golfers.scm",
    "--data",
    "golfers.scd",
    "--to",
    "eclipse",
    "--chain",
];

#[test]
fn transform_writes_program_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.ecl");
    let report = dir.path().join("g.csv");
    let mut args = GOLFERS.to_vec();
    args.extend([
        "flatten-classes,flatten-records,remove-enums",
        "--out",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    let o = cpforge(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let expected = std::fs::read_to_string(corpus_dir().join("golden/golfers.ecl")).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), expected);
    let csv = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "Problems,Lines,Inject,s-to-P,Comp,Enum,P-to-E,Extract,Total,Lines");
    assert!(lines[1].starts_with("SocialGolfers,42,") && lines[1].ends_with(",38"), "{}", lines[1]);
}

#[test]
fn transform_prints_when_no_output_is_given() {
    let mut args = GOLFERS.to_vec();
    args.push("flatten-classes,flatten-records,remove-enums");
    let o = cpforge(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("socialGolfers(L):-\n"));
}

#[test]
fn transform_from_a_configuration_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.ecl");
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        format!(
            "source = \"clean/queens.scm\"\ndata = \"clean/queens.scd\"\ntarget = \"eclipse\"\n\
             chain = [\"flatten-classes\", \"remove-if\", \"unroll-loops\"]\nout = \"{}\"\n",
            out.display()
        ),
    )
    .unwrap();
    let o = cpforge(&["transform", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("#\\=").count(), 30);
}

#[test]
fn wrong_chain_order_exits_2() {
    let mut args = GOLFERS.to_vec();
    args.push("flatten-records,flatten-classes");
    let o = cpforge(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("flatten-records"), "{}", stderr(&o));
}

#[test]
fn checker_errors_exit_1_and_list_problems() {
    let o = cpforge(&["check", "defects/inverted_interval.scm"]);
    assert_eq!(o.status.code(), Some(1));
    let listing = stdout(&o);
    assert_eq!(listing.lines().count(), 1);
    assert!(listing.starts_with("error defects/inverted_interval.scm:2:2 empty domain"), "{listing}");

    let o = cpforge(&["transform", "--model", "defects/chained_equality.scm", "--to", "pivot"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("chained_equality.scm:6:3"), "{}", stderr(&o));
}

#[test]
fn clean_model_checks_silently() {
    let o = cpforge(&["check", "golfers.scm", "golfers.scd"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["check", "missing.scm"],
        vec!["frobnicate"],
        vec!["transform", "--model", "golfers.scm", "--chain", "inline-everything"],
        vec!["transform", "--model", "golfers.scm", "--to", "minizinc"],
        vec!["transform", "--from", "essence", "--model", "golfers.scm"],
        vec!["bench", "--family", "sudoku", "--sizes", "3"],
    ] {
        let o = cpforge(&args);
        assert_eq!(o.status.code(), Some(64), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn solve_lists_solutions_one_per_line() {
    let o = cpforge(&["solve", "clean/queens.scm", "clean/queens.scd"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().all(|l| l.starts_with("q[1]=") && l.split(' ').count() == 5), "{text}");

    let o = cpforge(&["solve", "clean/send.scm", "clean/send.scd", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_prints_the_scaling_table() {
    let o = cpforge(&["bench", "--family", "nqueens", "--sizes", "5,10", "--chain", "remove-if,unroll-loops"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "Problems,Inject,s-to-P,Comp,Forall,P-to-E,Extract,Total,Lines,Total/Lines");
    assert!(lines[1].starts_with("5-Queens,") && lines[2].starts_with("10-Queens,"));
    assert_eq!(lines.len(), 3);
}
