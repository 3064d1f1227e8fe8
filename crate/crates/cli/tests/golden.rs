use std::path::PathBuf;
use std::process::Command;

fn dir(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

/// The documented example commands and their golden outputs.
pub fn cases() -> Vec<(&'static str, Vec<String>)> {
    let f = |name: &str| dir("fixtures").join(name).display().to_string();
    vec![
        ("analyze_werner_p05.json", vec!["analyze".into(), f("werner_p05.json")]),
        (
            "transform_worked_ea_hadamard.json",
            vec!["transform".into(), f("worked_ea.json"), "--screen".into(), "0".into(), "--basis".into(), "hadamard".into()],
        ),
        ("powers_zero_two_bases.json", vec!["powers".into(), f("zero.json"), f("qubit_two_bases.json")]),
        ("werner_scan_101.json", vec!["werner".into(), "--scan".into(), "0,1,101".into()]),
    ]
}

fn run(args: &[String]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_qlab")).args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn golden_outputs_are_reproduced_byte_for_byte() {
    for (golden, args) in cases() {
        let expected = std::fs::read(dir("golden").join(golden)).unwrap();
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first, second, "{golden}: consecutive runs differ");
        assert!(first == expected, "{golden}: output differs from the golden file");
    }
}
