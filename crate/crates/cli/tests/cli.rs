use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bubble-tower"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(args: &[&str], dir: &Path) -> (i32, Value, String) {
    let path = dir.join("report.json");
    let mut all = args.to_vec();
    let p = path.to_str().unwrap();
    all.extend(["--json", p]);
    let out = run(&all);
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    let json = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json, text)
}

#[test]
fn schedule_table_and_report() {
    let out = run(&["schedule", "--dim", "7", "--k", "3"]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().nth(3).unwrap().trim_end().ends_with("50"), "{table}");

    let dir = tempfile::tempdir().unwrap();
    let (code, json, _) = report(&["schedule", "--dim", "7", "--k", "3"], dir.path());
    assert_eq!(code, 0);
    let theta: Vec<&str> =
        json["result"]["rows"].as_array().unwrap().iter().map(|r| r["theta"].as_str().unwrap()).collect();
    assert_eq!(theta, ["2", "10", "50"]);
    assert_eq!(json["tool"], "bubble-tower");
    assert_eq!(json["command"], "schedule");
}

#[test]
fn constants_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let (code, json, _) = report(&["constants", "--dim", "7"], dir.path());
    assert_eq!(code, 0);
    let r = &json["result"];
    assert!((r["kn_pow"].as_f64().unwrap() / 64343.75790222517 - 1.0).abs() < 1e-9);
    assert!((r["c0"].as_f64().unwrap() / 90483.40955000417 - 1.0).abs() < 1e-8);
    assert!(r["convention_note"].as_str().unwrap().contains("2.0000"));
}

#[test]
fn sweep_reports_are_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for threads in ["1", "3", "3"] {
        let path = dir.path().join(format!("s{}.json", texts.len()));
        let csv = dir.path().join("s.csv");
        let status = bin()
            .args(["sweep-interaction", "--profile", "quick", "--json", path.to_str().unwrap()])
            .args(["--csv", csv.to_str().unwrap()])
            .env("BUBBLE_TOWER_THREADS", threads)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        texts.push(std::fs::read(&path).unwrap());
        let table = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(table.lines().next().unwrap(), "eps,ratio,value_mantissa,value_log10,model_value");
        assert_eq!(table.lines().count(), 11);
    }
    assert!(texts.windows(2).all(|w| w[0] == w[1]));
    let json: Value = serde_json::from_slice(&texts[0]).unwrap();
    assert_eq!(json["pass"], true);
    let slope = json["result"]["fit"]["slope"].as_f64().unwrap();
    assert!((slope - 2.5).abs() < 0.05);
}

#[test]
fn error_sweep_order() {
    let dir = tempfile::tempdir().unwrap();
    let (code, json, _) = report(&["sweep-error", "--profile", "quick"], dir.path());
    assert_eq!(code, 0);
    assert!(json["result"]["fit"]["slope"].as_f64().unwrap() >= 2.15);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"dim": 9, "k": 2}"#).unwrap();
    let (code, json, _) = report(&["schedule", "--config", cfg.to_str().unwrap(), "--k", "4"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(json["config"]["dim"], 9);
    assert_eq!(json["config"]["k"], 4);
    assert_eq!(json["result"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn inline_manifold_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let entry = serde_json::json!({
        "manifold": {"description": "round S^5", "spec": {"kind": "sphere", "dim": 5, "radius": 1.0}, "samples": 3, "expect": "vanishing"}
    });
    std::fs::write(&cfg, entry.to_string()).unwrap();
    let (code, json, _) = report(&["weyl", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 0, "{json}");
    assert_eq!(json["pass"], true);
    assert!(json["result"]["max"].as_f64().unwrap() < 1e-6);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"dimension": 7}"#).unwrap();
    assert_eq!(run(&["constants", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["sweep-interaction", "--dim", "5"]).status.code(), Some(2));
    assert_eq!(run(&["sweep-interaction", "--d", "auto"]).status.code(), Some(2));
    assert_eq!(run(&["sweep-interaction", "--ell", "3"]).status.code(), Some(2));
    assert_eq!(run(&["maximize", "--weyl-sq", "0"]).status.code(), Some(2));
    assert_eq!(run(&["sweep-error", "--profile", "quick", "--per-decade", "8"]).status.code(), Some(2));
    assert_eq!(run(&["sweep-error", "--profile", "quick", "--k", "4", "--ell", "4"]).status.code(), Some(2));
    assert_eq!(run(&["weyl", "--manifold", "no_such"]).status.code(), Some(2));
    let threads = bin().args(["schedule"]).env("BUBBLE_TOWER_THREADS", "zero").output().unwrap().status;
    assert_eq!(threads.code(), Some(2));
}

#[test]
fn automatic_heights_follow_the_maximiser() {
    let dir = tempfile::tempdir().unwrap();
    let (_, max, _) = report(&["maximize", "--weyl-sq", "1", "--k", "2"], dir.path());
    assert_eq!(max["pass"], true);
    let d_star = max["result"]["d_star"].clone();
    let (code, json, _) =
        report(&["sweep-interaction", "--profile", "quick", "--d", "auto", "--weyl-sq", "1"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(json["config"]["d"], d_star);
}

#[test]
fn symmetry_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, json, _) = report(&["symmetry", "--manifold", "s7_graph"], dir.path());
    assert_eq!((code, json["pass"].clone()), (0, Value::Bool(true)));
    let (code, json, _) = report(&["symmetry", "--manifold", "s2_shear"], dir.path());
    assert_eq!((code, json["pass"].clone()), (1, Value::Bool(false)));
    assert_eq!(run(&["symmetry", "--manifold", "s2xs5"]).status.code(), Some(2));
}

#[test]
fn selected_acceptance_criteria() {
    let out = run(&["accept", "--profile", "quick", "--only", "2,8,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 3, "{text}");
    assert_eq!(run(&["accept", "--only", "12"]).status.code(), Some(2));
}

#[test]
fn catalog_dump_round_trips() {
    let out = run(&["catalog"]);
    let dumped: Value = serde_json::from_slice(&out.stdout).unwrap();
    let shipped: Value = serde_json::from_str(
        &std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../catalog/manifolds.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(dumped, shipped);
}
