//! End-to-end checks of the command-line interface: record formats, exit
//! codes, determinism of emitted files.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blowup-moduli"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const HAND_PAIR: &str = concat!(
    "{\"j\":2,\"coeffs\":[{\"u\":1,\"z\":0,\"re\":\"1\",\"im\":\"0\"}]}\n",
    "{\"j\":2,\"coeffs\":[]}\n"
);

#[test]
fn gen_is_seed_deterministic() {
    let a = stdout_of(&run(&["gen", "--j", "2", "--pairs", "3", "--seed", "11"]));
    let b = stdout_of(&run(&["gen", "--j", "2", "--pairs", "3", "--seed", "11"]));
    let c = stdout_of(&run(&["gen", "--j", "2", "--pairs", "3", "--seed", "12"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.lines().count(), 3);
    for line in a.lines() {
        let record: Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["j"], 2);
        assert!(record["coeffs"].is_array());
    }
}

#[test]
fn iso_decides_pairs_and_flags_undecided() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.jsonl");
    write(&pair, HAND_PAIR);
    let pair_str = pair.to_str().unwrap();

    let decided = run(&["iso", pair_str]);
    let text = stdout_of(&decided);
    let record: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(record["pair"], 0);
    assert_eq!(record["verdict"], "CertifiedNonIso");

    // The minimum box without deepening leaves this pair open; the exit
    // code stays 0 unless the caller opts in.
    let open = run(&["iso", pair_str, "--U", "2", "--Z", "5", "--cap", "0"]);
    let text = stdout_of(&open);
    let record: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(record["verdict"], "Undecided");

    let strict = run(&[
        "iso",
        pair_str,
        "--U",
        "2",
        "--Z",
        "5",
        "--cap",
        "0",
        "--fail-on-undecided",
    ]);
    assert_eq!(strict.status.code(), Some(2));

    let odd = dir.path().join("odd.jsonl");
    write(&odd, "{\"j\":2,\"coeffs\":[]}\n");
    let failed = run(&["iso", odd.to_str().unwrap()]);
    assert_eq!(failed.status.code(), Some(1));
}

#[test]
fn phi_round_trips_and_rejects_non_images() {
    let dir = tempfile::tempdir().unwrap();
    let forms = dir.path().join("forms.jsonl");
    let up = dir.path().join("up.jsonl");
    let forms_str = forms.to_str().unwrap();
    let up_str = up.to_str().unwrap();

    stdout_of(&run(&[
        "gen", "--j", "2", "--pairs", "2", "--seed", "5", "--out", forms_str,
    ]));
    stdout_of(&run(&["phi", forms_str, "--out", up_str]));
    let back = stdout_of(&run(&["phi", up_str, "--inverse"]));
    assert_eq!(back, std::fs::read_to_string(&forms).unwrap());

    for line in std::fs::read_to_string(&up).unwrap().lines() {
        let record: Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["j"], 3);
        for coeff in record["coeffs"].as_array().unwrap() {
            let u = coeff["u"].as_i64().unwrap();
            assert!(u != 1 && u != 2);
        }
    }

    // A level-2 form with u^1 support has no preimage.
    let outside = dir.path().join("outside.jsonl");
    write(
        &outside,
        "{\"j\":2,\"coeffs\":[{\"u\":1,\"z\":0,\"re\":\"1\",\"im\":\"0\"}]}\n",
    );
    let failed = run(&["phi", outside.to_str().unwrap(), "--inverse"]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("not an embedded image"));
}

#[test]
fn verify_accepts_orbit_certificates_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let forms = dir.path().join("forms.jsonl");
    let certs = dir.path().join("certs.jsonl");
    let forms_str = forms.to_str().unwrap();
    let certs_str = certs.to_str().unwrap();

    stdout_of(&run(&[
        "gen", "--j", "2", "--pairs", "2", "--seed", "21", "--out", forms_str,
    ]));
    stdout_of(&run(&[
        "orbit", forms_str, "--seed", "3", "--out", certs_str,
    ]));
    let verified = run(&["verify", certs_str]);
    let text = stdout_of(&verified);
    for line in text.lines() {
        let record: Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["ok"], true);
    }

    // Swapping one certificate's claimed source form must break it.
    let stored = std::fs::read_to_string(&certs).unwrap();
    let mut lines: Vec<Value> = stored
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    let donor = lines[1]["p"].clone();
    lines[0]["p"] = donor;
    let tampered = dir.path().join("tampered.jsonl");
    write(&tampered, &format!("{}\n", lines[0]));
    let rejected = run(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(2));
    let text = String::from_utf8(rejected.stdout).unwrap();
    let record: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(record["ok"], false);
}

#[test]
fn campaign_writes_deterministic_artifacts_and_report_renders_csv() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("run.jsonl");
    let report_str = report.to_str().unwrap();
    let args = [
        "campaign", "--j", "2", "--pairs", "2", "--seed", "7", "--suites",
        "welldef,closedness", "--out", report_str,
    ];

    let first = run(&args);
    let stdout = stdout_of(&first);
    let stored = std::fs::read_to_string(&report).unwrap();
    assert_eq!(stdout, stored);

    let suites: Vec<String> = stored
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["suite"]
            .as_str()
            .unwrap()
            .to_string())
        .collect();
    assert_eq!(suites, ["welldef", "closedness"]);

    let certs = dir.path().join("run.certs.jsonl");
    let verified = run(&["verify", certs.to_str().unwrap()]);
    assert!(verified.status.success());

    let second = run(&args);
    stdout_of(&second);
    assert_eq!(std::fs::read_to_string(&report).unwrap(), stored);

    let csv = stdout_of(&run(&["report", report_str]));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "j,pairs,seed,U,Z,suite,checks,failures,iso,non_iso,undecided,certificates"
    );
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.contains(",welldef,"));
    assert!(csv.contains(",closedness,"));
}

#[test]
fn campaign_rejects_unknown_suites() {
    let failed = run(&["campaign", "--j", "2", "--pairs", "1", "--suites", "nonsense"]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("unknown suite"));
}
