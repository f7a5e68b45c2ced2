//! End-to-end runs of the `legsurg` binary: exit codes, determinism and
//! machine-readable output.

use std::path::PathBuf;
use std::process::{Command, Output};

use legsurg::io::HomologyReport;

fn legsurg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_legsurg")).args(args).output().expect("run legsurg")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 output")
}

/// A scratch directory unique to this test process.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("legsurg-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn validate_and_morphism_succeed() {
    let o = legsurg(&["validate", "corpus:chekanov_a"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("valid"));
    let o = legsurg(&["morphism", "corpus:chekanov_phi", "--check"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("chain map: yes"));
}

#[test]
fn linearized_chekanov_homology() {
    let o = legsurg(&[
        "--json", "homology", "corpus:chekanov_a", "--complex", "lin", "--augmentation", "corpus:chekanov_a_eps",
        "--min-deg", "-3", "--max-deg", "3",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = HomologyReport::from_json(&stdout(&o)).unwrap();
    let nonzero: Vec<(i64, usize)> = r.betti.interior_ranks().into_iter().filter(|&(_, k)| k > 0).collect();
    assert_eq!(nonzero, vec![(-2, 1), (1, 1), (2, 1)]);
}

#[test]
fn augmentations_are_enumerated() {
    let o = legsurg(&["augmentations", "corpus:chekanov_a", "--values=-1,0,1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("1 augmentation(s)"));
    assert!(stdout(&o).contains("a7=1 a8=-1 a9=1"));
}

#[test]
fn input_errors_exit_2() {
    // Unknown corpus entry.
    assert_eq!(code(&legsurg(&["validate", "corpus:nope"])), 2);
    // Parametric document without --dim.
    assert_eq!(code(&legsurg(&["validate", "corpus:unknot"])), 2);
    // Partial documents are refused by homology and surgery.
    let o = legsurg(&["homology", "corpus:lambda_t", "--complex", "ho", "--min-deg", "0", "--max-deg", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("partial"));
    // Wrong document kind.
    assert_eq!(code(&legsurg(&["validate", "corpus:chekanov_phi"])), 2);
    // Missing file.
    assert_eq!(code(&legsurg(&["validate", "/nonexistent/x.dga"])), 2);
}

#[test]
fn schema_errors_carry_positions() {
    let dir = scratch("schema");
    let path = dir.join("bad.dga");
    std::fs::write(
        &path,
        "format = \"legsurg-dga/1\"\nambient_dim = 2\ncomponents = 1\n\n[[generators]]\nname = \"a\"\ngrading = \"x\"\n",
    )
    .unwrap();
    let o = legsurg(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn truncated_windows_need_consent() {
    let args = ["homology", "corpus:chekanov_a", "--complex", "cyc", "--min-deg", "-3", "--max-deg", "1", "--max-len", "2"];
    let o = legsurg(&args);
    assert_ne!(code(&o), 0);
    assert!(stderr(&o).contains("--allow-truncated"), "{}", stderr(&o));
    let mut with = args.to_vec();
    with.push("--allow-truncated");
    let o = legsurg(&with);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("TRUNCATED"));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let args = ["--json", "--dim", "3", "surgery", "corpus:unknot", "--filling", "ball:3", "--theory", "sh", "--min-deg", "-1", "--max-deg", "9"];
    let a = stdout(&legsurg(&args));
    let b = stdout(&legsurg(&args));
    assert_eq!(a, b);
    let r = HomologyReport::from_json(&a).unwrap();
    assert_eq!(r.to_json(), a.trim_end());
    let ranks: Vec<usize> = (0..=8).map(|d| r.betti.rank(d)).collect();
    assert_eq!(ranks, vec![1, 0, 1, 1, 1, 1, 1, 1, 1]);
}

#[test]
fn emitted_examples_are_readable_documents() {
    let dir = scratch("emit");
    let o = legsurg(&["examples", "emit", "chekanov_a"]);
    assert_eq!(code(&o), 0);
    let path = dir.join("copy.dga");
    std::fs::write(&path, stdout(&o)).unwrap();
    assert_eq!(code(&legsurg(&["validate", path.to_str().unwrap()])), 0);
    let list = stdout(&legsurg(&["examples", "list"]));
    for name in ["unknot", "chekanov_a", "chekanov_phi", "lefschetz_min", "ball3"] {
        assert!(list.contains(name), "{name} missing from listing");
    }
}

#[test]
fn lefschetz_commands() {
    let o = legsurg(&["lefschetz", "corpus:lefschetz_min", "--t-order", "3", "--emit", "dga"]);
    assert_eq!(code(&o), 2, "the example is parametric in n");
    let o = legsurg(&["--dim", "3", "lefschetz", "corpus:lefschetz_min", "--t-order", "3", "--emit", "dictionary-check"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("dictionary: holds"));
    // The emitted algebra is itself a valid DGA document.
    let o = legsurg(&["--dim", "3", "lefschetz", "corpus:lefschetz_min", "--t-order", "2", "--emit", "dga"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dir = scratch("lefschetz");
    let path = dir.join("lef.dga");
    std::fs::write(&path, stdout(&o)).unwrap();
    assert_eq!(code(&legsurg(&["validate", path.to_str().unwrap()])), 0);
    // In dimension 2 the extra cubic terms do not square to zero: a math failure.
    let o = legsurg(&["--dim", "2", "lefschetz", "corpus:lefschetz_min", "--t-order", "2", "--emit", "dga"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("d^2"));
}

#[test]
fn filling_documents_match_the_builtin_ball() {
    let run = |filling: &str| {
        let o = legsurg(&[
            "--json", "--dim", "3", "surgery", "corpus:unknot", "--filling", filling, "--theory", "sh", "--min-deg", "-1", "--max-deg", "7",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        HomologyReport::from_json(&stdout(&o)).unwrap().betti
    };
    let from_doc = run("corpus:ball3");
    assert_eq!(from_doc.interior_ranks(), run("ball:3").interior_ranks());
    // Mismatched dimensions are an input error.
    let o = legsurg(&["surgery", "corpus:dc1_vanishing", "--filling", "corpus:ball3", "--theory", "sh", "--min-deg", "0", "--max-deg", "4"]);
    assert_eq!(code(&o), 2);
}
