use std::io::Write;
use std::process::{Command, Output};

use msq_core::mean_square::{mean_square_even, mean_square_odd};
use msq_core::symbolic::ClosedForm;
use serde_json::Value;

fn msq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn closed_form_r5_latex() {
    let o = msq(&["closed-form", "--r", "5", "--format", "latex"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("187110"), "{s}");
    assert!(s.contains("J_{10}"), "{s}");
}

#[test]
fn closed_form_r6_json_round_trips() {
    let o = msq(&["closed-form", "--r", "6", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scalar"], "1/1277025750");
    assert_eq!(v["body"]["-12"]["12"], "691/1");
    let parsed = ClosedForm::from_json(&v).unwrap();
    assert_eq!(parsed, mean_square_even(6).unwrap().main);
}

#[test]
fn closed_form_r1_is_a_pair() {
    let o = msq(&["closed-form", "--r", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let items = v.as_array().expect("two forms");
    assert_eq!(items.len(), 2);
    let expected = mean_square_odd(1).unwrap();
    assert_eq!(ClosedForm::from_json(&items[0]).unwrap(), expected.main);
    assert_eq!(
        ClosedForm::from_json(&items[1]).unwrap(),
        expected.correction.unwrap()
    );
}

#[test]
fn closed_form_r2_rejected() {
    let o = msq(&["closed-form", "--r", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("h >= 2"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn missing_and_malformed_arguments() {
    assert_eq!(msq(&["closed-form"]).status.code(), Some(2));
    assert_eq!(msq(&["closed-form", "--r", "x"]).status.code(), Some(2));
    assert_eq!(
        msq(&["closed-form", "--r", "5", "--format", "yaml"]).status.code(),
        Some(2)
    );
    assert_eq!(msq(&["nonsense"]).status.code(), Some(2));
    assert_eq!(msq(&["verify", "--r", "5", "--k", "2..4"]).status.code(), Some(2));
    assert_eq!(msq(&["verify", "--r", "2", "--k", "3"]).status.code(), Some(2));
}

#[test]
fn sin_sum_outputs() {
    let o = msq(&["sin-sum", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2/945 J_6 + 1/45 J_4 + 8/45 J_2");

    let o = msq(&["sin-sum", "--n", "2", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("8/3"));

    let o = msq(&["sin-sum", "--n", "2", "--k", "3", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "8/3");
    assert_eq!(v["combo"]["2"], "1/3");

    assert_eq!(msq(&["sin-sum", "--n", "3"]).status.code(), Some(2));
}

fn verify_report(r: &str) -> (Option<i32>, Value) {
    let o = msq(&["verify", "--r", r, "--k", "3..7", "--tol", "1e-10"]);
    (o.status.code(), serde_json::from_str(&stdout(&o)).unwrap())
}

#[test]
fn verify_sweeps_pass() {
    for r in ["5", "6", "3,4"] {
        let (code, v) = verify_report(r);
        assert_eq!(code, Some(0), "r={r}");
        assert_eq!(v["summary"]["failed"], 0);
        assert_eq!(v["precision_bits"], 128);
        let cases = v["cases"].as_array().unwrap();
        assert_eq!(cases.len(), 5 * r.split(',').count());
        for c in cases {
            let rel: f64 = c["rel_error"].as_str().unwrap().parse().unwrap();
            assert_eq!(c["pass"].as_bool().unwrap(), rel <= 1e-10);
        }
    }
}

#[test]
fn verify_orders_cases() {
    let o = msq(&["verify", "--r", "4,3", "--k", "5,3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let order: Vec<(u64, u64)> = v["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["r"].as_u64().unwrap(), c["k"].as_u64().unwrap()))
        .collect();
    assert_eq!(order, vec![(3, 3), (3, 5), (4, 3), (4, 5)]);
}

#[test]
fn verify_reports_failure_with_exit_1() {
    // 53-bit evaluation cannot meet a 1e-40 tolerance everywhere
    let o = msq(&["verify", "--r", "3,5,7", "--k", "3..12", "--prec", "53", "--tol", "1e-40"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn identity_suites() {
    let o = msq(&["identity-check", "sigma-cancel", "--h-min", "1", "--h-max", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = msq(&["identity-check", "realjs", "--p-max", "4", "--q-max", "4", "--k-max", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["total"], 4 * 4 * 8);

    let o = msq(&["identity-check", "expsum", "--n-max", "3", "--k-max", "8"]);
    assert_eq!(o.status.code(), Some(0));

    let o = msq(&["identity-check", "sigma0", "--h-min", "0", "--h-max", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cases"][0]["value"], "1/2 J_1");

    assert_eq!(msq(&["identity-check", "bogus"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--r", "3,6", "--k", "3..6"];
    assert_eq!(msq(&args).stdout, msq(&args).stdout);
    let args = ["closed-form", "--r", "7", "--format", "json"];
    assert_eq!(msq(&args).stdout, msq(&args).stdout);
}

#[test]
fn pedantic_goes_to_stderr() {
    let plain = msq(&["closed-form", "--r", "6"]);
    let noisy = msq(&["--pedantic", "closed-form", "--r", "6"]);
    assert_eq!(plain.stdout, noisy.stdout);
    assert!(stderr(&plain).is_empty());
    let notes = stderr(&noisy);
    assert!(notes.contains("h0"), "{notes}");
    assert!(notes.contains("sigma1'"), "{notes}");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("msq-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("msq.toml");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "r = 5\nformat = \"latex\"").unwrap();
    drop(f);
    let path_s = path.to_str().unwrap();

    let o = msq(&["--config", path_s, "closed-form"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("187110"));

    // flags win over the file
    let o = msq(&["--config", path_s, "closed-form", "--r", "6", "--format", "text"]);
    assert!(stdout(&o).starts_with("1/1277025750"));

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "r = [").unwrap();
    let o = msq(&["--config", bad.to_str().unwrap(), "closed-form"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
