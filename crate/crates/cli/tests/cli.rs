use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kdeck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdeck"))
        .args(args)
        .output()
        .expect("spawn kdeck")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn deck_then_reconstruct_matches_truth() {
    let dir = tempfile::tempdir().unwrap();
    let pic = dir.path().join("p.txt");
    let dk = dir.path().join("p.deck");
    let out = dir.path().join("q.txt");
    assert!(
        kdeck(&["gen", "--n", "48", "--seed", "11", "--out", path(&pic)])
            .status
            .success()
    );
    assert!(
        kdeck(&["deck", "--k", "5", "--in", path(&pic), "--out", path(&dk)])
            .status
            .success()
    );
    let r = kdeck(&[
        "reconstruct",
        "--deck",
        path(&dk),
        "--seed",
        "3",
        "--out",
        path(&out),
        "--truth",
        path(&pic),
    ]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    assert_eq!(fs::read(&pic).unwrap(), fs::read(&out).unwrap());
}

#[test]
fn wrong_truth_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let pic = dir.path().join("p.txt");
    let other = dir.path().join("o.txt");
    let dk = dir.path().join("p.deck");
    kdeck(&["gen", "--n", "48", "--seed", "11", "--out", path(&pic)]);
    kdeck(&["gen", "--n", "48", "--seed", "12", "--out", path(&other)]);
    kdeck(&["deck", "--k", "5", "--in", path(&pic), "--out", path(&dk)]);
    let r = kdeck(&[
        "reconstruct",
        "--deck",
        path(&dk),
        "--seed",
        "3",
        "--truth",
        path(&other),
    ]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn non_square_deck_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let dk = dir.path().join("bad.deck");
    fs::write(&dk, "DECK k=2 total=3\n0000 2\n0001 1\n").unwrap();
    let r = kdeck(&["reconstruct", "--deck", path(&dk), "--seed", "1"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(r.stdout.is_empty());
}

#[test]
fn garbage_picture_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let pic = dir.path().join("p.txt");
    fs::write(&pic, "01\n2x\n").unwrap();
    assert_eq!(
        kdeck(&["deck", "--k", "1", "--in", path(&pic)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kdeck(&["gen", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(
        kdeck(&[
            "experiment",
            "--n",
            "48",
            "--k",
            "7..4",
            "--trials",
            "1",
            "--seed",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn bounds_prints_threshold() {
    let r = kdeck(&["bounds", "--n", "100", "--k", "2"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.lines().any(|l| l == "kc=4"), "{text}");
    assert!(text.contains("log2_binomial_bound=-9841.35178"), "{text}");
}

#[test]
fn oracle_answers() {
    let dir = tempfile::tempdir().unwrap();
    let pic = dir.path().join("p.txt");
    fs::write(&pic, "10\n00\n").unwrap();
    let no = kdeck(&["oracle", "check", "--in", path(&pic), "--k", "1"]);
    assert_eq!(no.status.code(), Some(1));
    assert!(String::from_utf8(no.stdout).unwrap().starts_with("no\n"));
    assert_eq!(
        kdeck(&["oracle", "check", "--in", path(&pic), "--k", "2"])
            .status
            .code(),
        Some(0)
    );
    let c = kdeck(&["oracle", "classify", "--n", "2", "--k", "1"]);
    assert!(String::from_utf8(c.stdout)
        .unwrap()
        .starts_with("n=2 k=1 total=16 reconstructible=2\n"));
    assert_eq!(
        kdeck(&["oracle", "classify", "--n", "5", "--k", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn experiment_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (t, f) in [("1", &a), ("4", &b)] {
        let r = kdeck(&[
            "experiment",
            "--n",
            "30,9",
            "--k",
            "2..4",
            "--trials",
            "6",
            "--seed",
            "7",
            "--threads",
            t,
            "--csv",
            path(f),
        ]);
        assert!(r.status.success());
        assert!(String::from_utf8(r.stderr)
            .unwrap()
            .contains("skipped n=9 k=4"));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 1 + 3 + 2);
    assert!(text.starts_with("n,k,trials,successes,wrong,"));
}

#[test]
fn diagnose_writes_marks() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.txt");
    let o = dir.path().join("o.txt");
    let m = dir.path().join("m.txt");
    fs::write(&t, "00101\n10100\n10100\n01001\n11010\n").unwrap();
    fs::write(&o, "00101\n10010\n10100\n01010\n11010\n").unwrap();
    let r = kdeck(&[
        "diagnose",
        "--truth",
        path(&t),
        "--output",
        path(&o),
        "--k",
        "2",
        "--marks",
        path(&m),
    ]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.contains("marked 10"), "{text}");
    assert!(text.contains("length=7"), "{text}");
    assert_eq!(
        fs::read_to_string(&m).unwrap(),
        "MARKS rows=5 cols=5\n..XXX\n..XXX\n...XX\n...XX\n.....\n"
    );
}

#[test]
fn trial_reports_outcome() {
    let r = kdeck(&["trial", "--n", "48", "--k", "5", "--seed", "2"]);
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.starts_with("n=48 k=5 seed=2 result="), "{text}");
    assert_eq!(r.status.code() == Some(0), text.contains("result=success"));
}

#[test]
fn gen_is_deterministic() {
    let a = kdeck(&["gen", "--n", "9", "--seed", "5"]).stdout;
    let b = kdeck(&["gen", "--n", "9", "--seed", "5"]).stdout;
    assert_eq!(a, b);
    assert_eq!(a.len(), 9 * 10);
}
