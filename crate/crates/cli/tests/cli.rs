use std::process::{Command, Output};

fn vltau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vltau")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn structure_passes() {
    let o = vltau(&["verify", "structure"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("verify structure: pass, 16 identities checked"), "{}", stdout(&o));
}

#[test]
fn classification_summary() {
    let o = vltau(&["classify", "run"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("23 solvable / 37 rejected / all matches"), "{}", stdout(&o));
}

#[test]
fn low_grade_characters() {
    let o = vltau(&["chars", "decompositions", "--max-weight", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("chars decompositions: pass"));
}

#[test]
fn json_reports_are_byte_identical() {
    let a = vltau(&["fusion", "check", "--report-format", "json"]);
    let b = vltau(&["fusion", "check", "--report-format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["ok"], true);
    assert!(v["suites"][0].get("millis").is_none());
}

#[test]
fn timing_only_on_request() {
    let o = vltau(&["verify", "singular", "--timing", "--report-format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["suites"][0]["millis"].is_u64());
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("vltau-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = vltau_core::catalog::STRUCTURE_CONSTANTS.replace("K 5 K | 104 1", "K 5 K | 105 1");
    std::fs::write(dir.join("structure_constants.txt"), text).unwrap();
    let d = dir.to_str().unwrap();
    let o = vltau(&["verify", "structure", "--config", d]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    std::fs::write(dir.join("cards.json"), "[]").unwrap();
    assert_eq!(vltau(&["fusion", "check", "--config", d]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(vltau(&["verify", "nothing"]).status.code(), Some(2));
}
