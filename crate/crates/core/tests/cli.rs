use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_singer-codes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("singer-codes-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn code_file(name: &str, args: &[&str]) -> String {
    let mut full = vec!["find-code"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let path = scratch(name);
    std::fs::write(&path, &o.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn estimate_v100() {
    let o = run(&["estimate", "--q", "2", "--v", "100", "--k", "3", "--orbits", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("m=633825300114114700748351602687\n"));
    assert!(text.contains("s=21\n"));
    assert!(text.contains("exponent=-3.3132158019282496e-28\n"));
    assert!(text.contains("combinable_birthday_median=66955225653132\n"));
}

#[test]
fn field_info() {
    let o = run(&["field-info", "--v", "5", "--poly", "29"]);
    assert_eq!(stdout(&o).lines().next(), Some("v=5 poly=29 order=31"));
    let o = run(&["field-info", "--v", "5", "--poly", "3f"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn find_and_inspect_v5() {
    let path = code_file("v5.code", &["--v", "5", "--k", "2", "--orbits", "1", "--seed", "1"]);
    let o = run(&["inspect-orbit", "--code", &path, "--index", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("length=31\n"));
    assert!(text.contains("exponents=0,1,18\n"));
    assert_eq!(
        run(&["inspect-orbit", "--code", &path, "--index", "3"]).status.code(),
        Some(1)
    );
}

#[test]
fn output_is_reproducible() {
    let args = ["find-code", "--v", "12", "--k", "3", "--orbits", "2", "--seed", "77"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let path = code_file("rep.code", &["--v", "12", "--k", "3", "--orbits", "2", "--seed", "77"]);
    let sim = [
        "simulate",
        "--code",
        &path,
        "--messages",
        "200",
        "--errors",
        "1",
        "--seed",
        "4",
    ];
    let a = run(&sim);
    assert_eq!(a.stdout, run(&sim).stdout);
    assert_eq!(
        stdout(&a).split_whitespace().take(4).collect::<Vec<_>>(),
        vec!["sent=200", "ok=200", "fail=0", "miscorrect=0"]
    );
}

#[test]
fn encode_simulate_decode_pipeline() {
    let path = code_file("pipe.code", &["--v", "13", "--k", "3", "--orbits", "1", "--seed", "9"]);
    for (seed, errors, erasures) in [("1", "0", "0"), ("2", "1", "0"), ("3", "0", "1"), ("4", "1", "0")] {
        let word = run(&["encode", "--code", &path, "--message", "5000"]);
        assert_eq!(word.status.code(), Some(0));
        let received = run_stdin(
            &[
                "simulate",
                "--code",
                &path,
                "--word",
                "-",
                "--seed",
                seed,
                "--errors",
                errors,
                "--erasures",
                erasures,
            ],
            &word.stdout,
        );
        assert_eq!(received.status.code(), Some(0));
        let decoded = run_stdin(&["decode", "--code", &path], &received.stdout);
        let line = stdout(&decoded);
        assert_eq!(decoded.status.code(), Some(0), "{line}");
        assert!(line.starts_with("status=ok orbit=0 shift=5000 "), "{line}");
        assert!(line.trim_end().ends_with("message=5000"));
    }
}

#[test]
fn decode_failures_exit_2() {
    let path = code_file("fail.code", &["--v", "13", "--k", "3", "--orbits", "1", "--seed", "9"]);
    let word = run(&["encode", "--code", &path, "--message", "1"]);
    let received = run_stdin(
        &[
            "simulate", "--code", &path, "--word", "-", "--seed", "1", "--errors", "2",
        ],
        &word.stdout,
    );
    let decoded = run_stdin(&["decode", "--code", &path], &received.stdout);
    assert_eq!(decoded.status.code(), Some(2));
    assert!(stdout(&decoded).starts_with("status=fail"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["nope"]).status.code(), Some(1));
    // randomized subcommands insist on a seed
    assert_eq!(
        run(&["find-code", "--v", "8", "--k", "3", "--orbits", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["encode", "--code", "/nonexistent/file", "--message", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn exhausted_search_exits_2() {
    let o = run(&[
        "find-code",
        "--v",
        "5",
        "--k",
        "3",
        "--orbits",
        "2",
        "--seed",
        "1",
        "--max-trials",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("orbits in 20 trials"));
}

#[test]
fn verify_accepts_and_rejects() {
    let path = code_file("verify.code", &["--v", "9", "--k", "3", "--orbits", "2", "--seed", "3"]);
    let o = run(&["verify", "--code", &path, "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("labels=42 quotients=84 distinct=true"));
    assert!(text.contains("codewords=1022 min_distance=4"));

    // an orbit of GF(8)-lines inside GF(2^9) repeats quotients
    let field = singer_codes::FieldSpec::new(9, None).unwrap();
    let g = field.exp(73);
    let bad = format!(
        "code v=9 poly={} k=3 seed=0\norbit v=9 poly={} k=3 gens=1,{:x},{:x}\n",
        field.modulus(),
        field.modulus(),
        g,
        field.mul(g, g)
    );
    let bad_path = scratch("bad.code");
    std::fs::write(&bad_path, bad).unwrap();
    let o = run(&["verify", "--code", bad_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn kramer_commands() {
    let o = run(&["km-build", "--v", "6", "--k", "3", "--t", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("km v=6 k=3 t=2 rows=11 cols=23"));
    assert_eq!(lines.count(), 11);
    let o = run(&["km-solve", "--v", "6", "--k", "3", "--t", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("solution codewords="));
    let o = run(&["km-solve", "--v", "6", "--k", "3", "--t", "2", "--cell-cap", "10"]);
    assert_eq!(o.status.code(), Some(1));
}
