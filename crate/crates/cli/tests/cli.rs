use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_p4surf"));
    c.env_remove("RUST_BACKTRACE");
    c
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    root().join("crates/core/fixtures").join(name)
}

fn certificate(name: &str) -> PathBuf {
    root().join("certificates").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn zero_trials_give_an_empty_summary() {
    let o = run(&["construct1", "--trials", "0"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["hits"], 0);
    assert_eq!(v["trials"], 0);
    assert_eq!(v["config"]["seed"], 42);
}

#[test]
fn construct1_records_replay_through_stats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["construct1", "--seed", "42", "--trials", "400", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let o = run(&["stats", out.join("trials.jsonl").to_str().unwrap()]);
    assert!(o.status.success());
    let stats: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(stats["trials"], 400);
    assert_eq!(stats["hits"], summary["hits"]);
    assert_eq!(stats["stages"], summary["stages"]);
}

#[test]
fn shipped_certificates_verify() {
    for name in ["construct1_f5_seed42_trial5520.json", "construct2_f5_family_i.json", "construct2_f3.json"] {
        let o = run(&["verify", certificate(name).to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stdout(&o));
        assert!(stdout(&o).ends_with("verified\n"));
    }
}

#[test]
fn replay_is_byte_identical() {
    let path = certificate("construct1_f5_seed42_trial5520.json");
    let o = run(&["construct1", "--replay", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("identical"));
}

fn tampered(edit: impl FnOnce(&mut serde_json::Value)) -> (tempfile::TempDir, PathBuf) {
    let text = std::fs::read_to_string(certificate("construct1_f5_seed42_trial5520.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    edit(&mut v);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    (dir, path)
}

#[test]
fn flipped_coefficient_fails_at_the_complex_check() {
    let (_dir, path) = tampered(|v| {
        // B[0][2] = e_0 is an entry of B_1; doubling it breaks B∘A = 0
        assert_eq!(v["b"]["entries"][0][2], "e_0");
        v["b"]["entries"][0][2] = "2e_0".into();
    });
    let o = run(&["verify", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("verification failed at complex"), "{}", stdout(&o));
}

#[test]
fn doctored_hilbert_polynomial_fails_at_the_polyring_stage() {
    let (_dir, path) = tampered(|v| v["hilbert_polynomial"] = "6t^2 - 6t + 2".into());
    let o = run(&["verify", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("verification failed at polyring"));
}

#[test]
fn construct2_family_i_has_n_114() {
    let a1 = fixture("a1_i_f5.json");
    let o = run(&["construct2", "--a1", a1.to_str().unwrap(), "--class", "i", "--seed", "2024"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("N = 114"));
    assert!(s.contains("r = 6"));
    assert!(s.contains("smoothness: smooth"));
}

#[test]
fn construct2_in_characteristic_three() {
    let a1 = fixture("a1_f3.json");
    let o = run(&["construct2", "--p", "3", "--a1", a1.to_str().unwrap(), "--class", "f3", "--seed", "2024"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("N = 113"));
    assert!(s.contains("r = 7"));
}

#[test]
fn construct2_rejects_a_malformed_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a1.json");
    std::fs::write(&path, "{\"p\": 5, \"source_twists\": [").unwrap();
    let o = run(&["construct2", "--a1", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("parsing"));
}

#[test]
fn intersect_f3_matrix_has_seven_points() {
    let o = run(&["intersect", "--a1", fixture("a1_f3.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("r = 7"));
}

#[test]
fn tangent_of_the_shipped_certificate() {
    let o = run(&["tangent", "--cert", certificate("construct2_f5_family_i.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("90 / 38 / 20\n"));
}

#[test]
fn adjunction_chain_reaches_the_degree_seven_del_pezzo() {
    let o = run(&["adjunction", "--class", "12L-2*4E-9*3E-3*2E-7*1E", "--six-secants", "1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("chain ends at degree 7 after 3 steps"));
    assert!(s.contains("Le Barz Some(true)"));
}

#[test]
fn printed_characteristic_three_class_fails_the_ledger() {
    let o = run(&["adjunction", "--class", "f3-printed"]);
    assert!(!o.status.success());
}
