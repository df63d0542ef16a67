use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn ratseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratseq"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = ratseq(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn representation() {
    assert_eq!(stdout(&["rep", "--base", "3/2", "7"]), "2122\n");
    assert_eq!(stdout(&["rep", "--sig", "023,14,5", "15"]), "2121\n");
    assert_eq!(stdout(&["val", "--base", "3/2", "212211"]), "17\n");
    assert_eq!(stdout(&["val", "--base", "3/2", "1"]), "1/2\n");
}

#[test]
fn sequence_prefix() {
    assert_eq!(
        stdout(&["seq", "--dfao", "toy.json", "--base", "3/2", "--count", "17"]),
        "00111011111011011\n"
    );
    assert_eq!(
        stdout(&[
            "seq",
            "--dfao",
            "sum_of_digits_mod2_s.json",
            "--sig",
            "023,14,5",
            "--count",
            "12"
        ]),
        "001100110101\n"
    );
    assert_eq!(
        stdout(&["seq", "--dfao", "ce.json", "--base", "3/2", "--count", "4", "--format", "json"]),
        "[\"0\",\"1\",\"0\",\"0\"]\n"
    );
}

#[test]
fn signatures() {
    assert_eq!(stdout(&["sig", "derive", "--base", "11/4"]), "048,159,2.6.10,37\n");
    assert_eq!(
        stdout(&["sig", "enumerate", "--sig", "023,14,5", "--count", "6"]),
        "e\n2\n3\n21\n24\n35\n"
    );
    assert_eq!(
        stdout(&["sig", "dot", "--base", "3/2", "--levels", "3"]),
        golden("sig_dot_32.dot")
    );
}

#[test]
fn morphisms() {
    assert_eq!(
        stdout(&["morph", "to-block", "--builtin", "toy"]),
        golden("toy_blocks.txt")
    );
    assert_eq!(
        stdout(&["morph", "fixpoint", "--builtin", "kolakoski", "--count", "13"]),
        "2211212212211\n"
    );
    assert_eq!(
        stdout(&[
            "morph",
            "fixpoint",
            "--builtin",
            "lepisto2",
            "--seed",
            "01",
            "--count",
            "11"
        ]),
        "01001100001\n"
    );
    let bridged = stdout(&["morph", "bridge", "--dfao", "toy.json", "--base", "3/2"]);
    assert!(bridged.contains("start: "));
    assert!(bridged.contains("coding: "));
}

#[test]
fn factors() {
    let toy = ["--dfao", "toy.json", "--base", "3/2", "--nodes", "10000"];
    let run = |cmd: &[&str]| stdout(&[cmd, &toy[..]].concat());
    assert_eq!(
        run(&["factors", "census", "--height", "2"]),
        golden("census_toy_h2.txt")
    );
    assert_eq!(run(&["factors", "determinize"]), golden("determinize_toy.json"));
    let probe = run(&["factors", "probe", "--max-height", "3"]);
    assert_eq!(probe, "0\t2\n1\t5\n2\t9\n3\t17\nSTRICTLY-GROWING-UP-TO(3)\n");
    let verdict = stdout(&[
        "factors",
        "check-condition",
        "--dfao",
        "counterex.json",
        "--base",
        "3/2",
        "--height",
        "4",
    ]);
    assert!(verdict.starts_with("FAILS(4)"));
    let lemma = stdout(&[
        "factors",
        "check-lemma",
        "--base",
        "3/2",
        "--height",
        "2",
        "--samples",
        "500",
    ]);
    assert!(lemma.contains("0 domain violations, 0 extension violations"));
    assert!(lemma.contains("partition: yes"));
}

#[test]
fn conversion() {
    assert_eq!(stdout(&["convert", "--base", "3/2", "--mul", "2", "21"]), "212\n");
    assert_eq!(stdout(&["convert", "--base", "3/2", "--add", "3", "21"]), "2101\n");
    assert_eq!(stdout(&["convert", "--base", "3/2", "--lsd-digits", "2,4"]), "212\n");
    assert_eq!(stdout(&["convert", "--base", "3/2", "--add", "7", "e"]), "2122\n");
}

#[test]
fn deterministic_output() {
    let args = [
        "factors", "nfa", "--dfao", "ce.json", "--base", "3/2", "--nodes", "20000", "--format", "json",
    ];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn exit_codes() {
    assert_eq!(ratseq(&["rep", "7"]).status.code(), Some(2));
    assert_eq!(ratseq(&["rep", "--base", "3/2", "--bogus", "7"]).status.code(), Some(2));
    assert_eq!(ratseq(&["val", "--sig", "02,1", "11"]).status.code(), Some(1));
    assert_eq!(ratseq(&["convert", "--base", "3/2", "22"]).status.code(), Some(1));
    let missing = ratseq(&["seq", "--dfao", "missing.json", "--base", "3/2"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.json"));
}

#[test]
fn malformed_automaton_names_file_and_field() {
    let dir = std::env::temp_dir().join(format!("ratseq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        r#"{"states": ["a"], "initial": "a", "alphabet": [0, 1, 2], "delta": {}, "output": {"a": "0"}}"#,
    )
    .unwrap();
    let out = ratseq(&["seq", "--dfao", path.to_str().unwrap(), "--base", "3/2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.json"), "{err}");
    assert!(err.contains("delta"), "{err}");
}

#[test]
fn every_subcommand_has_help() {
    let commands: [&[&str]; 17] = [
        &["rep"],
        &["val"],
        &["seq"],
        &["convert"],
        &["sig", "derive"],
        &["sig", "enumerate"],
        &["sig", "dot"],
        &["morph", "fixpoint"],
        &["morph", "to-block"],
        &["morph", "bridge"],
        &["factors", "census"],
        &["factors", "check-lemma"],
        &["factors", "check-condition"],
        &["factors", "nfa"],
        &["factors", "determinize"],
        &["factors", "probe"],
        &[],
    ];
    for cmd in commands {
        let out = ratseq(&[cmd, &["--help"][..]].concat());
        assert!(out.status.success(), "{cmd:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage:"));
    }
}
