use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kakeya-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data lines of a CSV report, header included.
fn csv_lines(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

#[test]
fn oracle_row() {
    let o = lab(&["oracle", "--quantity", "F", "--k", "2", "--N", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# version kakeya-lab "));
    assert!(text.lines().nth(1).unwrap().starts_with("# config {"));
    let lines = csv_lines(&o);
    assert_eq!(lines[1], "F,2,3,,,3,3,true,3,3,\"0,1,3\"");
}

#[test]
fn sharpness_entropy_report() {
    let o = lab(&["entropy", "--mt", "--p", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let h = v["result"]["difference_entropy"].as_f64().unwrap();
    assert!((h - 1.8 * 5f64.ln()).abs() < 1e-12);
    assert_eq!(v["config"]["common"]["p"], 5);
    assert_eq!(v["config"]["common"]["seed"], 0);
    assert!(v["version"].as_str().unwrap().starts_with("kakeya-lab"));
}

#[test]
fn exit_codes() {
    assert_eq!(lab(&["oracle", "--quantity", "F", "--bogus"]).status.code(), Some(2));
    assert_eq!(lab(&["construct", "--kind", "qr", "--k", "0"]).status.code(), Some(2));
    assert_eq!(lab(&["es", "--kind", "pattern", "--d", "1,2", "--x-max", "4"]).status.code(), Some(1));
}

#[test]
fn f_table_is_monotone() {
    let o = lab(&["table", "--quantity", "F"]);
    let lines = csv_lines(&o);
    assert_eq!(lines.len(), 9);
    let rows: Vec<Vec<String>> = lines[1..].iter().map(|l| l.split(',').map(String::from).collect()).collect();
    for r in &rows {
        assert_eq!(r[6], "true", "ordering fails in {r:?}");
        assert_eq!(r[7], "true", "monotonicity fails in {r:?}");
    }
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn field_table_values() {
    let o = lab(&["table", "--quantity", "f"]);
    let lines = csv_lines(&o);
    let values: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(values, ["2", "3", "5"]);
}

#[test]
fn exponent_table_reports_the_gap() {
    let o = lab(&["table", "--quantity", "exponent"]);
    let lines = csv_lines(&o);
    assert_eq!(lines.len(), 4);
    for l in &lines[2..] {
        let c_prime: f64 = l.split(',').nth(8).unwrap().parse().unwrap();
        assert!(c_prime > 0.0, "{l}");
    }
}

#[test]
fn degenerate_pipeline() {
    let o = lab(&["pipeline", "--preset", "point", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["pairs"], 1);
    assert!(v["result"]["compression"].is_null());
}

#[test]
fn seeded_runs_repeat() {
    let args = ["compress", "--kind", "linear", "--seed", "5"];
    assert_eq!(lab(&args).stdout, lab(&args).stdout);
    let other = lab(&["compress", "--kind", "linear", "--seed", "6"]);
    assert_ne!(lab(&args).stdout, other.stdout);
}

#[test]
fn report_to_file() {
    let path = std::env::temp_dir().join(format!("kakeya-lab-{}.csv", std::process::id()));
    let o = lab(&["oracle", "--quantity", "f", "--p", "3", "--k", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.contains("\nf,2,,3,1,2,"));
}
