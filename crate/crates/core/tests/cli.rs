use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use monotone_minplus::format::{InstanceFile, OutputFile};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn minplus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minplus"))
        .args(args)
        .output()
        .expect("spawn minplus")
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("diagnostic line");
    serde_json::from_str(line).expect("json diagnostic")
}

#[test]
fn gen_reproduces_golden_conv() {
    let o = minplus(&[
        "gen", "--kind", "conv", "--n", "4", "--bound", "4", "--seed", "0", "--family", "uniform-monotone",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), std::fs::read_to_string(golden("conv_n4_b4_s0.json")).unwrap());
}

#[test]
fn run_matches_golden_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for stem in ["conv_n4_b4_s0", "row_n3_b5_s1"] {
        let out = dir.path().join(format!("{stem}.out.json"));
        let o = minplus(&["run", s(&golden(&format!("{stem}.json"))), "-o", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(
            std::fs::read(&out).unwrap(),
            std::fs::read(golden(&format!("{stem}.out.json"))).unwrap()
        );
    }
}

#[test]
fn det_and_naive_payloads_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, n) in [("product-row", "9"), ("product-col", "9"), ("conv", "40")] {
        let inst = dir.path().join(format!("{kind}.json"));
        let o = minplus(&["gen", "--kind", kind, "--n", n, "--bound", "20", "--seed", "5", "-o", s(&inst)]);
        assert!(o.status.success());
        let mut outs = Vec::new();
        for engine in ["det", "naive"] {
            let out = dir.path().join(format!("{kind}.{engine}.json"));
            let o = minplus(&["run", s(&inst), "--engine", engine, "-o", s(&out), "--report", "/dev/null"]);
            assert!(o.status.success());
            outs.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(outs[0], outs[1], "{kind}");
    }
}

#[test]
fn rerun_gives_identical_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("v.json");
    assert!(minplus(&["gen", "--kind", "verify-row", "--n", "12", "--bound", "30", "--seed", "2", "-o", s(&inst)])
        .status
        .success());
    let mut reports = Vec::new();
    for i in 0..2 {
        let rep = dir.path().join(format!("r{i}.json"));
        assert!(minplus(&["run", s(&inst), "--report", s(&rep), "-o", "/dev/null"]).status.success());
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
        reports.push((v["checksum"].clone(), v["modulus"]["q_digest"].clone()));
    }
    assert!(reports[0].0.is_string());
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn check_passes_on_golden() {
    let o = minplus(&["check", s(&golden("row_n3_b5_s1.json"))]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS"));
    let o = minplus(&[
        "check",
        s(&golden("conv_n4_b4_s0.json")),
        "--candidate",
        s(&golden("conv_n4_b4_s0.out.json")),
    ]);
    assert!(o.status.success());
}

#[test]
fn corrupted_candidate_fails_with_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let mut out = OutputFile::read(&golden("row_n3_b5_s1.out.json")).unwrap();
    let mut rows = out.result.matrix().unwrap();
    rows.set(2, 1, rows.get(2, 1) + 1);
    out.result = (&rows).into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, out.to_canonical()).unwrap();
    let o = minplus(&["check", s(&golden("row_n3_b5_s1.json")), "--candidate", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL") && text.contains("[2, 1]"), "{text}");
}

#[test]
fn promise_violation_is_a_json_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let mut f = InstanceFile::read(&golden("row_n3_b5_s1.json")).unwrap();
    let mut b = f.b.matrix().unwrap();
    b.set(1, 2, 1);
    f.b = (&b).into();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, f.to_canonical()).unwrap();
    let o = minplus(&["run", s(&path)]);
    assert_eq!(o.status.code(), Some(2));
    let diag = stderr_json(&o);
    assert_eq!(diag["error"], "promise-violation");
    assert_eq!(diag["coord"], serde_json::json!([1, 2]));
}

#[test]
fn oracle_refuses_oversized_work() {
    let o = minplus(&["check", s(&golden("row_n3_b5_s1.json")), "--oracle-limit", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "oracle-limit");
}

#[test]
fn stats_on_zero_instance_has_no_false_positives() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(
        &path,
        r#"{"format": 1, "kind": "verify-row", "dims": [2, 2, 2], "entry_bound": 1, "m": 100,
            "a": [[0, 0], [0, 0]], "b": [[0, 0], [0, 0]], "c": [[0, 0], [0, 0]]}"#,
    )
    .unwrap();
    let o = minplus(&["stats", s(&path), "--brute"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["identity_holds"], true);
    for level in v["levels"].as_array().unwrap() {
        assert_eq!(level["brute"]["x"], 0);
        assert_eq!(level["active"], 0);
    }
}

#[test]
fn single_cell_product() {
    let o = minplus(&["gen", "--kind", "product-row", "--n", "1", "--bound", "3"]);
    let f = InstanceFile::parse(&stdout(&o)).unwrap();
    assert_eq!(f.dims, vec![1, 1, 1]);
    assert_eq!(f.a.matrix().unwrap().rows(), 1);
}

#[test]
fn golden_files_reserialize_identically() {
    for stem in ["conv_n4_b4_s0", "row_n3_b5_s1"] {
        let text = std::fs::read_to_string(golden(&format!("{stem}.json"))).unwrap();
        assert_eq!(InstanceFile::parse(&text).unwrap().to_canonical(), text);
        let text = std::fs::read_to_string(golden(&format!("{stem}.out.json"))).unwrap();
        assert_eq!(OutputFile::parse(&text).unwrap().to_canonical(), text);
    }
}

#[test]
fn unknown_engine_is_rejected() {
    let o = minplus(&["run", s(&golden("row_n3_b5_s1.json")), "--engine", "quantum"]);
    assert!(!o.status.success());
}

#[test]
fn golden_conv_det_equals_naive() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for engine in ["det", "naive"] {
        let out = dir.path().join(format!("{engine}.json"));
        let o = minplus(&["run", s(&golden("conv_n4_b4_s0.json")), "--engine", engine, "-o", s(&out), "--report", "/dev/null"]);
        assert!(o.status.success());
        outs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn check_passes_for_every_kind_and_family() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["product-row", "product-col", "conv", "verify-row", "verify-col", "verify-conv"] {
        for family in ["uniform-monotone", "bounded-difference", "staircase", "adversarial-ties"] {
            let path = dir.path().join(format!("{kind}-{family}.json"));
            let o = minplus(&[
                "gen", "--kind", kind, "--n", "7", "--bound", "13", "--seed", "3", "--family", family, "-o", s(&path),
            ]);
            assert!(o.status.success());
            let o = minplus(&["check", s(&path), "--strict-audit"]);
            assert!(o.status.success(), "{kind} {family}: {}", stdout(&o));
        }
    }
}

#[test]
fn stats_reports_the_cancellation_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    assert!(minplus(&["gen", "--kind", "verify-conv", "--n", "10", "--bound", "300", "--seed", "4", "-o", s(&path)])
        .status
        .success());
    let o = minplus(&["stats", s(&path), "--brute"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("X = Y - Z verified: true"), "{err}");
    assert!(err.contains("M <= Q <= M*R: true"), "{err}");
}
