use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mia-audit"));
    c.env_remove("MIA_AUDIT_SEED");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn ok(args: &[&str], dir: &Path) -> Output {
    let out = run(args, dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn synth(dir: &Path, name: &str, spec: &str) -> PathBuf {
    std::fs::write(dir.join(format!("{name}.input.json")), spec).unwrap();
    ok(
        &[
            "synth",
            "--spec",
            &format!("{name}.input.json"),
            "--out",
            &format!("{name}.jsonl"),
        ],
        dir,
    );
    dir.join(format!("{name}.jsonl"))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const TEMPORAL: &str = r#"{"n_member": 100, "n_nonmember": 100, "seed": 3,
  "temporal": {"member_years": {"from": 1990, "to": 2016},
               "nonmember_years": {"from": 2023, "to": 2024}, "p_date": 1.0}}"#;

fn row<'a>(report: &'a Value, attack: &str) -> &'a Value {
    report["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| &r["row"])
        .find(|r| r["attack"] == attack)
        .unwrap()
}

fn tpr_at(row: &Value, fpr: f64) -> f64 {
    row["tpr_at"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["fpr"].as_f64() == Some(fpr))
        .unwrap()["tpr"]
        .as_f64()
        .unwrap()
}

#[test]
fn temporal_date_audit_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "t", TEMPORAL);
    let out = ok(
        &[
            "audit",
            "--dataset",
            "t.jsonl",
            "--attack",
            "date",
            "--cutoff-year",
            "2023",
            "--json",
            "r.json",
        ],
        dir.path(),
    );
    let report = read_json(&dir.path().join("r.json"));
    let date = row(&report, "date");
    assert_eq!(date["auc"].as_f64(), Some(1.0));
    assert_eq!(tpr_at(date, 0.05), 1.0);
    assert_eq!(report["schema"], "mia-audit/1");
    assert_eq!(report["notes"]["no_date"]["date"], 0);
    assert_eq!(report["dataset"]["sha256"].as_str().unwrap().len(), 64);
    assert!(String::from_utf8_lossy(&out.stdout).contains("| t | date | 100.0 | 100.0 | 100.0 |"));
}

#[test]
fn bow_audit_is_deterministic_modulo_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "t", TEMPORAL);
    for name in ["a.json", "b.json"] {
        ok(
            &[
                "audit",
                "--dataset",
                "t.jsonl",
                "--attack",
                "bow",
                "--kfold",
                "10",
                "--seed",
                "0",
                "--json",
                name,
            ],
            dir.path(),
        );
    }
    let strip = |name: &str| -> String {
        std::fs::read_to_string(dir.path().join(name))
            .unwrap()
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip("a.json"), strip("b.json"));
    let report = read_json(&dir.path().join("a.json"));
    assert_eq!(report["runs"][0]["models"].as_array().unwrap().len(), 10);
}

#[test]
fn replay_reproduces_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "t", TEMPORAL);
    ok(
        &[
            "audit",
            "--dataset",
            "t.jsonl",
            "--attack",
            "bow,greedy-word",
            "--kfold",
            "4",
            "--json",
            "r.json",
        ],
        dir.path(),
    );
    let out = ok(&["audit", "--replay", "r.json"], dir.path());
    assert!(String::from_utf8_lossy(&out.stderr).contains("reproduced exactly"));

    let mut report = read_json(&dir.path().join("r.json"));
    report["runs"][0]["row"]["auc"] = Value::from(0.123);
    std::fs::write(dir.path().join("bad.json"), report.to_string()).unwrap();
    assert_eq!(
        run(&["audit", "--replay", "bad.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_env_override() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "t", TEMPORAL);
    let out = bin()
        .args([
            "audit",
            "--dataset",
            "t.jsonl",
            "--attack",
            "bow",
            "--kfold",
            "3",
            "--json",
            "r.json",
        ])
        .env("MIA_AUDIT_SEED", "17")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read_json(&dir.path().join("r.json"))["seed"], 17);
}

#[test]
fn synth_marker_count_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth(
        dir.path(),
        "m",
        r#"{"n_member": 500, "n_nonmember": 500, "seed": 0,
            "marker": {"text": "marker", "p_member": 0.3, "p_nonmember": 0.0}}"#,
    );
    let (mut members, mut nonmembers) = (0, 0);
    for line in std::fs::read_to_string(&path).unwrap().lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let has = v["text"]
            .as_str()
            .unwrap()
            .split(' ')
            .any(|t| t == "marker");
        match v["label"].as_str().unwrap() {
            "member" => members += usize::from(has),
            _ => nonmembers += usize::from(has),
        }
    }
    assert_eq!((members, nonmembers), (154, 0));
    let sidecar = read_json(&dir.path().join("m.spec.json"));
    assert_eq!(sidecar["marker"]["p_member"], 0.3);
    assert_eq!(sidecar["base_vocab_size"], 5000);
}

#[test]
fn synth_without_shift_has_no_dates() {
    let dir = tempfile::tempdir().unwrap();
    synth(
        dir.path(),
        "n",
        r#"{"n_member": 50, "n_nonmember": 50, "seed": 5}"#,
    );
    ok(
        &[
            "audit",
            "--dataset",
            "n.jsonl",
            "--attack",
            "date",
            "--kfold",
            "5",
            "--json",
            "r.json",
        ],
        dir.path(),
    );
    let report = read_json(&dir.path().join("r.json"));
    assert_eq!(report["notes"]["no_date"]["date"], 100);
    // Every sample gets the same no-date score.
    assert_eq!(row(&report, "date")["auc"].as_f64(), Some(0.5));
}

#[test]
fn report_merges_and_groups_by_dataset() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "alpha", TEMPORAL);
    synth(dir.path(), "beta", TEMPORAL);
    ok(
        &[
            "audit",
            "--dataset",
            "alpha.jsonl",
            "--attack",
            "date,bow",
            "--kfold",
            "5",
            "--json",
            "a.json",
        ],
        dir.path(),
    );
    ok(
        &[
            "audit",
            "--dataset",
            "beta.jsonl",
            "--attack",
            "bow",
            "--kfold",
            "5",
            "--json",
            "b.json",
        ],
        dir.path(),
    );

    let single = String::from_utf8(ok(&["report", "a.json"], dir.path()).stdout).unwrap();
    let lines: Vec<&str> = single.lines().collect();
    assert_eq!(
        lines[0],
        "| Dataset | Attack | Metric | Value (%) | Report |"
    );
    assert_eq!(lines.len(), 2 + 2 * 3);
    assert!(single.contains("| alpha | date | AUC | **100.0** | a.json |"));

    let merged = String::from_utf8(ok(&["report", "b.json", "a.json"], dir.path()).stdout).unwrap();
    let datasets: Vec<&str> = merged
        .lines()
        .skip(2)
        .map(|l| l.split('|').nth(1).unwrap().trim())
        .collect();
    let first_beta = datasets.iter().position(|d| *d == "beta").unwrap();
    assert!(datasets[..first_beta].iter().all(|d| *d == "alpha"));
    assert!(datasets[first_beta..].iter().all(|d| *d == "beta"));
}

#[test]
fn report_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["report"], dir.path()).status.code(), Some(1));
    std::fs::write(
        dir.path().join("old.json"),
        r#"{"schema": "mia-audit/0", "runs": []}"#,
    )
    .unwrap();
    let out = run(&["report", "old.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema mismatch"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(
        run(&["audit", "--bogus"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["audit", "--dataset", "x.jsonl"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(
            &["audit", "--dataset", "missing.jsonl", "--attack", "bow"],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
    std::fs::write(
        dir.path().join("bad.jsonl"),
        "{\"text\": \"a\", \"label\": \"maybe\"}\n",
    )
    .unwrap();
    assert_eq!(
        run(
            &["audit", "--dataset", "bad.jsonl", "--attack", "bow"],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn project_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "t", TEMPORAL);
    ok(
        &["project", "--dataset", "t.jsonl", "--out", "p.csv"],
        dir.path(),
    );
    let csv = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("id,label,x,y"));
    assert_eq!(lines.count(), 200);
}

#[test]
fn recipe_runs() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "t", TEMPORAL);
    ok(
        &[
            "audit",
            "--dataset",
            "t.jsonl",
            "--recipe",
            "wikimia",
            "--json",
            "r.json",
        ],
        dir.path(),
    );
    let report = read_json(&dir.path().join("r.json"));
    assert_eq!(report["config"]["recipe"], "wikimia");
    let attacks: Vec<&str> = report["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["row"]["attack"].as_str().unwrap())
        .collect();
    assert_eq!(attacks, ["date", "bow"]);
    assert_eq!(report["config"]["split"]["k"], 10);
}
