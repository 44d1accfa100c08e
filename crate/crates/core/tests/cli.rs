use std::process::{Command, Output};

use serde_json::Value;

fn qtraj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtraj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qtraj(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(csv: &str) -> usize {
    csv.lines().count() - 1
}

#[test]
fn figure_row_counts_follow_the_grid() {
    assert_eq!(data_rows(&stdout(&["fig4a"])), 2 * 101);
    assert_eq!(data_rows(&stdout(&["fig4b", "--grid", "31"])), 2 * 31);
    assert_eq!(
        data_rows(&stdout(&["fig4a", "--d", "3", "--grid", "11"])),
        11
    );
    assert_eq!(data_rows(&stdout(&["fig5a"])), 101);
    assert_eq!(data_rows(&stdout(&["fig5b", "--grid", "7"])), 7);
    assert_eq!(data_rows(&stdout(&["fig6", "--grid", "21"])), 21 * 21);
    assert_eq!(data_rows(&stdout(&["trajectories"])), 8);
    assert_eq!(data_rows(&stdout(&["trajectories", "--d", "3"])), 27);
    assert_eq!(data_rows(&stdout(&["protocol"])), 1);
}

#[test]
fn headers() {
    let first = |args: &[&str]| stdout(args).lines().next().unwrap().to_string();
    assert_eq!(first(&["fig3"]), "panel,kind,value,probability");
    assert_eq!(
        first(&["fig4a", "--grid", "3"]),
        "d,Theta,var_qheat,avg_s_qu"
    );
    assert_eq!(first(&["fig4b", "--grid", "3"]), "d,t,var_qheat,avg_s_qu");
    assert_eq!(
        first(&["fig5a", "--grid", "3"]),
        "nonth,avg_s_cl,avg_q_cl_over_t,delta_s_cl,var_cl"
    );
    assert_eq!(
        first(&["fig5b", "--grid", "3"]),
        "coh,avg_s_qu,delta_s_qu,var_qu,avg_q_qu"
    );
    assert_eq!(first(&["fig6", "--grid", "3"]), "coh,nonth,avg_w_ext");
}

#[test]
fn fig6_origin_value() {
    let csv = stdout(&["fig6", "--grid", "11"]);
    let row = csv
        .lines()
        .find(|l| l.starts_with("0.00000000000e0,0.00000000000e0,"))
        .unwrap();
    let w: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((w - 0.147045).abs() < 1e-6);
}

#[test]
fn outputs_are_deterministic_across_workers() {
    let a = stdout(&[
        "trajectories",
        "--samples",
        "300000",
        "--seed",
        "7",
        "--threads",
        "1",
    ]);
    let b = stdout(&[
        "trajectories",
        "--samples",
        "300000",
        "--seed",
        "7",
        "--threads",
        "5",
    ]);
    assert_eq!(a, b);
    let c = stdout(&["trajectories", "--samples", "300000", "--seed", "8"]);
    assert_ne!(a, c);
    assert_eq!(
        stdout(&["fig4b", "--grid", "21"]),
        stdout(&["fig4b", "--grid", "21"])
    );
}

#[test]
fn json_document_shape() {
    let doc: Value = serde_json::from_str(&stdout(&["fig3", "--format", "json"])).unwrap();
    assert_eq!(doc["config"]["command"], "fig3");
    assert!(doc["rows"].as_array().unwrap().len() > 8);
    assert!(doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5b.csv");
    let out = qtraj(&["fig5b", "--grid", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(data_rows(&text), 5);
    assert!(!text.contains('\r'));
}

#[test]
fn exit_codes() {
    assert_eq!(qtraj(&["fig3", "--grid", "1"]).status.code(), Some(2));
    assert_eq!(qtraj(&["fig3", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(qtraj(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        qtraj(&["trajectories", "--p", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qtraj(&["protocol", "--quasistatic", "--N-steps", "4"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(
        qtraj(&["fig3", "--out", missing.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn validate_passes_and_catches_injected_fault() {
    let ok = qtraj(&["validate", "--samples", "100000"]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let report: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 12);
    let bad = qtraj(&["validate", "--samples", "100000", "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&bad.stdout).unwrap();
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(
        failed.iter().any(|n| n.contains("exp(-s_irr)")),
        "{failed:?}"
    );
}
