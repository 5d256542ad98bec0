use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn orbiquot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbiquot")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn group_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../groups").join(name).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("orbiquot-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn catalog_lists_the_built_in_groups() {
    let o = orbiquot(&["catalog"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for name in ["W(A2)", "M(R5)", "BinaryIcosahedral", "D+(4)"] {
        assert!(s.contains(name), "{name} missing from\n{s}");
    }
}

#[test]
fn group_files_are_classified() {
    let o = orbiquot(&["--json", "classify", &group_file("cube_rotations.json")]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 24);
    let o = orbiquot(&["--json", "classify", &group_file("i2_8.json")]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 16);
}

#[test]
fn verify_a_reflection_group_from_a_file() {
    let o = orbiquot(&["--json", "verify", &group_file("i2_8.json")]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "Ball");
}

#[test]
fn unknown_group_is_a_usage_error() {
    let o = orbiquot(&["classify", "no-such-group"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tampered_certificate_fails_replay_with_the_step() {
    let dir = scratch("tamper");
    let o = orbiquot(&["--certificates", dir.to_str().unwrap(), "verify", "W(B3)"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let file = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| std::fs::read_to_string(p).unwrap().contains("\"Collapse\""))
        .expect("a collapse certificate is written");
    let o = orbiquot(&["replay", file.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("certificate replays"));

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    // replay numbers punctured simplices first, then collapse steps
    let punctured = v["certificate"]["Collapse"]["punctured"].as_array().map_or(0, Vec::len);
    let steps = v["certificate"]["Collapse"]["steps"].as_array_mut().unwrap();
    assert!(steps.len() >= 2);
    let first = steps[0].clone();
    steps.insert(1, first);
    let bad = dir.join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = orbiquot(&["replay", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(&format!("step {}: simplex already removed", punctured + 1)), "{}", stdout(&o));
    let _ = std::fs::remove_dir_all(&dir);
}
