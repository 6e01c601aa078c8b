//! End-to-end checks of the `i2i` binary: tables, design, codec round trip,
//! and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_i2i"))
}

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn networks() -> PathBuf {
    workspace_root().join("data/networks")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn i2i")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn tables_prints_expected_values() {
    let out = run(&["tables", "--klt-abs", "--sizes", "4,8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n,klt_abs_db"), "{text}");
    // 4-point row: KLT 10.0039, DCT -0.6211
    let row4 = text.lines().find(|l| l.starts_with("4,")).unwrap();
    assert!(row4.contains("10.0039") && row4.contains("-0.6211"), "{row4}");
}

#[test]
fn design_writes_a_loadable_network() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.txt");
    let out = run(&["design", "--n", "4", "--length", "2", "--l", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    i2i_core::QuantizedLiftingNetwork::from_text(&text).unwrap();
    assert!(stdout(&out).contains("-0.7"), "L=2 cascade gain expected in summary");
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in.pgm");
    let bitstream = dir.path().join("out.i2ic");
    let recon = dir.path().join("rec.pgm");

    let out = run(&[
        "synth", "--kind", "mixed", "--width", "70", "--height", "50", "--seed", "5", "--out",
        src.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let nets = networks();
    let out = run(&[
        "encode", "--input", src.to_str().unwrap(), "--out", bitstream.to_str().unwrap(),
        "--profile", "i2i48-rdpcm", "--networks", nets.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&[
        "decode", "--input", bitstream.to_str().unwrap(), "--out", recon.to_str().unwrap(),
        "--networks", nets.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&src).unwrap(), std::fs::read(&recon).unwrap());
}

#[test]
fn networks_dir_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in.pgm");
    let bitstream = dir.path().join("out.i2ic");
    assert!(run(&["synth", "--kind", "plaid", "--width", "16", "--height", "16", "--seed", "1", "--out", src.to_str().unwrap()]).status.success());
    let out = bin()
        .args(["encode", "--input", src.to_str().unwrap(), "--out", bitstream.to_str().unwrap(), "--profile", "i2i4"])
        .env("I2I_NETWORKS", networks())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes() {
    // 2: validation error
    let out = run(&["design", "--n", "4", "--length", "2", "--rho", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["encode", "--input", "/nonexistent.pgm", "--out", "/tmp/x", "--profile", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    // 3: search budget exceeded
    let out = run(&["design", "--n", "4", "--length", "9"]);
    assert_eq!(out.status.code(), Some(3));
    // 4: I/O or bitstream format problems
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.i2ic");
    std::fs::write(&junk, b"not a bitstream").unwrap();
    let out = run(&[
        "decode", "--input", junk.to_str().unwrap(), "--out", dir.path().join("y.pgm").to_str().unwrap(),
        "--networks", networks().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn selftest_passes_on_bundled_networks() {
    let out = run(&["selftest", "--networks", networks().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("625"));
}

#[test]
fn compare_reports_all_profiles() {
    let corpus = workspace_root().join("data/corpus");
    assert!(Path::new(&corpus).exists());
    let out = run(&[
        "compare", "--corpus", corpus.to_str().unwrap(), "--networks", networks().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for name in ["skip-all", "rdpcm", "i2i4", "i2i4-rdpcm", "i2i48", "i2i48-rdpcm"] {
        assert!(text.contains(name), "missing {name}");
    }
}
