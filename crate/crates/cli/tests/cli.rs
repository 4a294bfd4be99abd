use std::process::{Command, Output};

use serde_json::Value;

fn selmer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selmer")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = selmer(args);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

#[test]
fn type_census_q5() {
    let (code, v) = json(&["census", "type", "--q", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["nonregular_total"], 125);
    assert_eq!(v["pass"], true);
    assert_eq!(v["config"]["command"]["which"]["q"], 5);
}

#[test]
fn origin_fiber_types() {
    let (code, v) = json(&["census", "fiber", "--q", "5", "--a", "0", "--b", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["types"].as_array().unwrap().len(), 3);
}

#[test]
fn dual_census_s_part() {
    // q^10 is over the exhaustive budget at q = 7; only the (a, b) part runs.
    let (code, v) = json(&["census", "dual", "--q", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["nonregular_v"], Value::Null);
}

#[test]
fn quartic_examples() {
    let (_, v) = json(&["quartic", "stabilizer", "0,1,0,-1,0"]);
    assert_eq!(v["result"]["type"], "(1,1,1,1)");
    assert_eq!(v["result"]["stabilizer"]["order"], 4);
    let (_, v) = json(&["quartic", "liedim", "0,0,1,0,0"]);
    assert_eq!(v["result"]["type"], "(2,2)");
    assert_eq!(v["result"]["lie_dim"], 1);
    let (_, v) = json(&["quartic", "liedim", "0,0,0,0,0"]);
    assert_eq!(v["result"]["type"], "Zero");
    assert_eq!(v["result"]["lie_dim"], 3);
    let (_, v) = json(&["quartic", "reduce", "0,1,0,2,3"]);
    assert_eq!(v["result"]["reduction"]["ext_degree"], 1);
    assert_eq!(v["result"]["reduction"]["h"].as_array().unwrap().len(), 4);
}

#[test]
fn unstable_reduction_is_an_error() {
    let out = selmer(&["quartic", "reduce", "0,0,1,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not stable"));
}

#[test]
fn family_with_b_zero() {
    let (code, v) = json(&["family", "--d", "1", "--a", "0,0,0,0,1", "--b", "0"]);
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["degenerate"], false);
    assert_eq!(r["transversal"], false);
    assert_eq!(r["two_torsion"], true);
    assert_eq!(r["minimal"], false);
}

#[test]
fn randomized_commands_need_a_seed() {
    let out = selmer(&["density", "regular", "--d", "2", "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    let out = selmer(&["average", "--d", "2", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(selmer(&["census", "type", "--q", "9"]).status.code(), Some(1));
    assert_eq!(selmer(&["quartic", "classify", "1,2"]).status.code(), Some(1));
    assert_eq!(selmer(&["nonsense"]).status.code(), Some(1));
    assert_eq!(selmer(&["--help"]).status.code(), Some(0));
}

#[test]
fn failed_check_exits_2() {
    // A negative tolerance makes the comparison impossible to meet.
    let out = selmer(&["density", "regular", "--d", "1", "--samples", "1000", "--seed", "1", "--tol=-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn results_do_not_depend_on_threads() {
    let args = |t: &'static str| {
        vec!["--threads", t, "density", "transversal", "--d", "1", "--samples", "2000", "--seed", "5"]
    };
    let (c1, a) = json(&args("1"));
    let (c2, b) = json(&args("3"));
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn bunmass_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mass.csv");
    let out = selmer(&["bunmass", "--q", "5", "--n", "40", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("limit.den,48"));
}

#[test]
fn average_csv_table() {
    let out = selmer(&["average", "--d", "2", "--samples", "200", "--seed", "3", "--transversal", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,dims,method,samples,regular_rate,ci_low,ci_high,mass,mass_low,mass_high");
    assert_eq!(lines.count(), 5);
}

#[test]
fn zeta_and_cases() {
    let (code, v) = json(&["density", "zeta", "--q", "5", "--factor", "regular", "--truncate", "30"]);
    assert_eq!(code, 0);
    assert!((v["result"]["closed_form"].as_f64().unwrap() - 0.768).abs() < 1e-12);
    let (code, v) = json(&["cases", "--d", "1", "--samples", "500", "--seed", "2"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["case2"]["contribution"], 1);
}
