use std::path::Path;
use std::process::{Command, Output};

fn wcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcs")).args(args).env_remove("WCS_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn costs_file_with_and_without_probs() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = write(dir.path(), "u.csv", "cost\n1\n5\n3\n");
    let o = wcs(&["sensitivity", "--family", "tv", "--costs-file", &uniform]);
    assert_eq!(stdout(&o), "{\"value\":2.0,\"family\":\"tv\",\"growth\":\"linear\"}\n");
    let weighted = write(dir.path(), "w.csv", "cost,prob\n0,0.5\n10,0.5\n");
    let o = wcs(&["worst-case", "--family", "budgeted", "--eps", "0.4", "--costs-file", &weighted]);
    assert_eq!(json(&o)["q"], serde_json::json!([0.3, 0.7]));
    let bad = write(dir.path(), "b.csv", "value\n1\n");
    let o = wcs(&["sensitivity", "--family", "tv", "--costs-file", &bad]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(wcs(&["sensitivity", "--family", "tv"]).status.code(), Some(2));
    assert_eq!(wcs(&["sensitivity", "--family", "nope", "--costs", "1"]).status.code(), Some(2));
    assert_eq!(wcs(&["worst-case", "--family", "tv", "--costs", "1,2"]).status.code(), Some(2));
    assert_eq!(wcs(&["sensitivity", "--family", "tv", "--costs", "1,x"]).status.code(), Some(2));
}

#[test]
fn domain_error_payload() {
    let o = wcs(&["worst-case", "--family", "tv", "--costs", "1,2", "--eps", "-1"]);
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["code"], "EpsOutOfRange");
    let o = wcs(&["sensitivity", "--family", "combo", "--alpha", "1.5", "--costs", "1,2"]);
    assert_eq!(serde_json::from_slice::<serde_json::Value>(&o.stderr).unwrap()["code"], "InvalidParameter");
}

#[test]
fn negative_costs_parse() {
    let o = wcs(&["sensitivity", "--family", "budgeted", "--costs", "-3,1"]);
    assert_eq!(json(&o)["value"], 2.0);
}

#[test]
fn frontier_csv_two_atom_instance() {
    let dir = tempfile::tempdir().unwrap();
    let demand = write(dir.path(), "d.csv", "demand\n10\n20\n");
    let out = dir.path().join("f.csv");
    let o = wcs(&[
        "frontier", "--family", "budgeted", "--eps-list", "0,1", "--demand-file", &demand, "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "eps,decision,nominal_mean,sensitivity");
    assert_eq!(lines[1], "0,20,-110,50");
    let cols: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((cols[1] - 90.0 / 7.0).abs() < 1e-9 && (cols[2] + 520.0 / 7.0).abs() < 1e-9 && cols[3].abs() < 1e-9);
}

#[test]
fn frontier_logreg_joins_weights() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "c.csv", "label,x1\n1,1\n-1,-1\n1,1\n-1,-1\n");
    let out = dir.path().join("f.csv");
    let o = wcs(&["frontier", "--family", "wasserstein", "--eps-geom", "0.5:1:2", "--data-file", &data, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), format!("0.5,0,{},0", 2f64.ln()));
    let o = wcs(&["frontier", "--family", "wasserstein", "--eps-list", "0.1", "--gen-class", "20,2,1,3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let row = std::fs::read_to_string(&out).unwrap().lines().nth(1).unwrap().to_string();
    assert_eq!(row.split(',').nth(1).unwrap().split(';').count(), 3);
}

#[test]
fn seed_from_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_wcs"));
        cmd.args(["solve-newsvendor", "--gen", "50,10,100,0.9"]);
        match seed {
            Some(s) => cmd.env("WCS_SEED", s),
            None => cmd.env_remove("WCS_SEED"),
        };
        stdout(&cmd.output().unwrap())
    };
    assert_eq!(run(None), run(Some("42")));
    assert_ne!(run(None), run(Some("43")));
    let explicit = wcs(&["solve-newsvendor", "--gen", "50,10,100,0.9,43"]);
    assert_eq!(stdout(&explicit), run(Some("43")));
}

#[test]
fn solve_commands() {
    let dir = tempfile::tempdir().unwrap();
    let demand = write(dir.path(), "d.csv", "demand,prob\n10,0.5\n20,0.5\n");
    let o = json(&wcs(&["solve-newsvendor", "--demand-file", &demand, "--family", "budgeted", "--eps", "1"]));
    assert!((o["order"].as_f64().unwrap() - 90.0 / 7.0).abs() < 1e-9);
    assert_eq!(o["saa_order"], 20.0);
    let data = write(dir.path(), "c.csv", "label,x1\n1,1\n-1,-1\n1,1\n-1,-1\n");
    let o = json(&wcs(&["solve-logreg", "--data-file", &data, "--eps", "0.5"]));
    assert_eq!(o["zero"], true);
    assert_eq!(o["weights"], serde_json::json!([0.0]));
}

#[test]
fn verify_passes_and_is_reproducible() {
    let a = wcs(&["verify", "--trials", "60", "--seed", "5"]);
    let b = wcs(&["verify", "--trials", "60", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["passed"], true);
}
