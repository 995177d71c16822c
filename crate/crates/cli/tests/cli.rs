//! The binary: exit codes, configuration files and the output directory.

use std::path::Path;
use std::process::{Command, Output};

fn exe(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exactapprox"))
        .args(args)
        .current_dir(dir)
        .env_remove("EXACTAPPROX_OUT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn spectrum_lists_the_first_markoff_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let o = exe(&["spectrum", "--limit", "5"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[1, 2, 5]"));
    assert!(dir.path().join("out/spectrum.json").exists());
}

#[test]
fn construct_recheck_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = exe(&["construct", "--gamma", "21/4", "--pad", "power:1/1", "--blocks", "2", "--out", "c"], d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&exe(&["recheck", "--certificate", "c/certificate.json", "--out", "r"], d)), 0);

    let path = d.join("c/alpha.json");
    let mut alpha: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let digits = alpha["digits"].as_array_mut().unwrap();
    let i = digits.len() / 2;
    digits[i] = (if digits[i] == 1 { 2 } else { 1 }).into();
    std::fs::write(d.join("c/forged.json"), alpha.to_string()).unwrap();
    let o = exe(&["recheck", "--certificate", "c/certificate.json", "--alpha", "c/forged.json", "--out", "r"], d);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("recheck failed"));

    let args = ["verify", "--alpha", "c/alpha.json", "--gamma", "21/4", "--pad", "power:1/1"];
    let o = exe(
        &[&args[..], &["--sign", "minus", "--Q", "2000", "--certificate", "c/certificate.json", "--out", "v"]].concat(),
        d,
    );
    assert_eq!(code(&o), 0);
    let o = exe(&[&args[..], &["--sign", "plus", "--format", "csv", "--out", "v"]].concat(), d);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(d.join("v/solutions.csv")).unwrap();
    assert!(csv.starts_with("q,p,lhs_hi,rhs_lo,verdict\n"));
}

#[test]
fn undecided_fractions_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("a.json"), r#"{"a0":0,"digits":[1,1,1,2],"tail":{"kind":"system","system":"F4"}}"#).unwrap();
    let o = exe(&["verify", "--alpha", "a.json", "--gamma", "2", "--Q", "100"], d);
    assert_eq!(code(&o), 2);
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = exe(&["construct", "--gamma", "21/4", "--pad", "log", "--blocks", "1", "--max-block-digits", "200"], d);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("padding function too slow for block 1"));
    assert_eq!(code(&exe(&["construct", "--gamma", "5", "--pad", "log"], d)), 1);
    assert_eq!(code(&exe(&["verify", "--gamma", "5"], d)), 1);
    assert_eq!(code(&exe(&["decompose", "--gamma", "abc"], d)), 1);
}

#[test]
fn config_file_and_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.toml"), "command = \"spectrum\"\nlimit = 13\nout = \"from-file\"\n").unwrap();
    assert_eq!(code(&exe(&["run", "--config", "run.toml"], d)), 0);
    assert!(d.join("from-file/spectrum.json").exists());

    let o = Command::new(env!("CARGO_BIN_EXE_exactapprox"))
        .args(["run", "--config", "run.toml", "--limit", "2"])
        .current_dir(d)
        .env("EXACTAPPROX_OUT", "from-env")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[1, 2]"));
    assert!(d.join("from-env/spectrum.json").exists());

    std::fs::write(d.join("bad.toml"), "command = \"spectrum\"\nlimt = 13\n").unwrap();
    let o = exe(&["run", "--config", "bad.toml"], d);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("limt"));
}
