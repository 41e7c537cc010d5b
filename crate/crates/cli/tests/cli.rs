use std::io::Write;
use std::process::{Command, Output, Stdio};

const GOLDEN: &str = "2F8F74C54AD330BBB2755499F51E1C5986CFFE2F7F4127E99A7888A50A77CC5C";

fn run(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_chaoshash"))
        .args(args)
        .env_remove("CHAOSHASH_TEST_KEY")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    // usage errors exit before reading stdin
    if let Err(e) = child.stdin.take().unwrap().write_all(stdin) {
        assert_eq!(e.kind(), std::io::ErrorKind::BrokenPipe, "{e}");
    }
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn golden_digest_from_stdin() {
    let out = run(&["hash", "--key", "my key"], b"The original text");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), format!("{GOLDEN}\n"));
}

#[test]
fn trailing_newline_is_hashed() {
    let out = run(&["hash", "--key", "my key"], b"The original text\n");
    assert_eq!(
        stdout(&out).trim(),
        "1BDF56120CAD52AF583F44B76E74404289AFA0ABD2ADA49888663085B60334FB"
    );
}

#[test]
fn golden_digest_from_file_to_file() {
    let dir = std::env::temp_dir().join(format!("chaoshash-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("message.txt");
    let output = dir.join("digest.txt");
    std::fs::write(&input, "The original text").unwrap();
    let out = run(
        &[
            "hash",
            "--key",
            "my key",
            "--file",
            input.to_str().unwrap(),
            "--out",
            output.to_str().unwrap(),
        ],
        b"",
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&output).unwrap(),
        format!("{GOLDEN}\n")
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn key_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_chaoshash"))
        .args([
            "hash",
            "--key-env",
            "CHAOSHASH_TEST_KEY",
            "--file",
            "/dev/null",
        ])
        .env("CHAOSHASH_TEST_KEY", "my key")
        .output()
        .unwrap();
    // /dev/null is an empty message: a data error, but only after the key resolved
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty"));
}

#[test]
fn missing_key_is_a_usage_error() {
    let out = run(&["hash"], b"The original text");
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    let first = err.lines().next().unwrap();
    assert!(first.contains("--key"), "{err}");
    assert!(err.contains("Usage:"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_environment_variable_is_a_usage_error() {
    let out = run(&["hash", "--key-env", "CHAOSHASH_TEST_KEY"], b"x");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("CHAOSHASH_TEST_KEY"));
}

#[test]
fn non_ascii_input_is_a_data_error() {
    let out = run(&["hash", "--key", "my key"], "caf\u{e9}".as_bytes());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("0xc3"), "{}", stderr(&out));
}

#[test]
fn lowercase_hex_key_is_a_data_error() {
    let out = run(&["hash", "--key-hex", "ab"], b"x");
    assert_eq!(out.status.code(), Some(2));
    let ok = run(&["hash", "--key-hex", "AB"], b"x");
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn bad_digest_size_is_a_usage_error() {
    let out = run(&["hash", "--key", "k", "--n", "6"], b"x");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn hashing_is_deterministic() {
    let first = run(&["hash", "--key", "k", "--n", "512"], b"determinism");
    let second = run(&["hash", "--key", "k", "--n", "512"], b"determinism");
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(stdout(&first).trim().len(), 128);
}

#[test]
fn verify_bijectivity_reports_true_for_negation() {
    let out = run(
        &[
            "verify-bijectivity",
            "--n",
            "6",
            "--map",
            "negation",
            "--seed",
            "3",
        ],
        b"",
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).ends_with("bijective: true\n"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn verify_bijectivity_reports_false_for_rotation() {
    let out = run(
        &["verify-bijectivity", "--n", "4", "--map", "rotation"],
        b"",
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("bijective: false\n"));
}

#[test]
fn strategy_dump_has_requested_length() {
    let out = run(
        &["strategy", "--key", "k", "--n", "8", "--length", "40"],
        b"abc",
    );
    let indices: Vec<usize> = stdout(&out)
        .trim()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(indices.len(), 40);
    assert!(indices.iter().all(|&s| (1..=8).contains(&s)));
}

#[test]
fn posttreat_round_trips_through_invert() {
    let args = [
        "posttreat",
        "--k1",
        "AB",
        "--k2",
        "CD12",
        "--n",
        "8",
        "--inner",
        "xorfold",
    ];
    let outer = run(&args, b"hello");
    assert_eq!(outer.status.code(), Some(0));
    let mut invert = args.to_vec();
    invert.push("--invert");
    let inner = run(&invert, &outer.stdout);
    // xorfold inner digest: XOR of the bytes of "hello" (0x62) XOR K1
    assert_eq!(stdout(&inner), "C9\n");
}

#[test]
fn diffusion_writes_csv() {
    let out = run(
        &[
            "diffusion",
            "--n",
            "64",
            "--trials",
            "50",
            "--msg-bits",
            "80",
        ],
        b"",
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,trials,b_min,b_max,b_mean,p_mean,delta_b,delta_p")
    );
    assert!(lines.next().unwrap().starts_with("64,50,"));
}

#[test]
fn bench_rejects_too_few_runs() {
    let out = run(&["bench", "--lengths", "64,128", "--runs", "2"], b"");
    assert_eq!(out.status.code(), Some(1));
}
