use std::process::{Command, Output};

use serde_json::Value;

use redeilab::classify::canonicalize_orbit;
use redeilab::{Polynomial, PrimeCtx};

fn redeilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redeilab"))
        .args(args)
        .env_remove("REDEILAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = redeilab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn naive_classification_at_seven() {
    let v = json(&["classify", "--p", "7", "--strategy", "naive", "--no-timing"]);
    let r = &v["result"];
    assert_eq!(r["other_count"], 0);
    let families: Vec<&str> = r["orbits"].as_array().unwrap().iter().map(|o| o["family"].as_str().unwrap()).collect();
    assert!(families.contains(&"i") && families.contains(&"ii"));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"]["strategy"], "naive");
    assert!(v["ms"].is_null());
}

#[test]
fn range_sum_fourteen_at_seven() {
    let v = json(&["classify", "--p", "7", "--range-sum-multiple", "2"]);
    let ctx = PrimeCtx::new(7).unwrap();
    let keys: Vec<Vec<u64>> = v["result"]["orbits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| serde_json::from_value(o["coeffs"].clone()).unwrap())
        .collect();
    for add in [1, 2] {
        // (x - 1)(x - 2) + add = x^2 - 3x + 2 + add
        let q = Polynomial::from_signed(&ctx, &[2 + add, -3, 1]);
        let canon = canonicalize_orbit(&q).unwrap();
        assert!(keys.contains(&canon.coeffs().to_vec()), "missing orbit of {q}");
    }
    assert!(v["ms"].is_u64());
}

#[test]
fn exit_codes() {
    let out = redeilab(&["classify", "--p", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not an odd prime"));
    let out = redeilab(&["classify", "--p", "13", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("budget"));
    let out = redeilab(&["classify"]);
    assert_eq!(out.status.code(), Some(2));
    let out = redeilab(&["charsum", "scan", "--p", "101", "--threshold", "seven"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("malformed threshold"));
}

#[test]
fn paley_at_thirteen() {
    let v = json(&["charsum", "paley", "--p", "13"]);
    let classes = v["result"]["classes"].as_array().unwrap();
    let counts = |i: usize| -> Vec<u64> {
        let t = &classes[i]["table"];
        ["a_pp", "a_pm", "a_mp", "a_mm"].iter().map(|k| t[k].as_u64().unwrap()).collect()
    };
    assert_eq!(counts(0), vec![2, 3, 3, 3]);
    assert_eq!(counts(1), vec![3, 3, 3, 2]);
    assert_eq!(classes[0]["all_representatives_agree"], true);
}

#[test]
fn sign_patterns_outside_the_premise_are_reported() {
    let v = json(&["charsum", "weil", "--p", "101", "--shifts", "0,1,2"]);
    let r = &v["result"];
    assert_eq!(r["premise_holds"], false);
    let counts: Vec<u64> = r["patterns"].as_array().unwrap().iter().map(|s| s["count"].as_u64().unwrap()).collect();
    assert_eq!(counts.len(), 8);
    assert_eq!(counts.iter().sum::<u64>(), 98);
    assert!(v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn scan_of_the_squares() {
    let v = json(&["charsum", "scan", "--p", "101", "--subset", "qr"]);
    let r = &v["result"];
    assert_eq!(r["op"], "concentration_scan");
    assert_eq!(r["threshold"], "p/7");
    assert_eq!(r["asserted"], false);
    assert!(r["witnesses"].as_array().unwrap().contains(&serde_json::json!([0, 50])));
    let v = json(&["charsum", "scan", "--p", "101", "--subset", "random:5", "--seed", "9"]);
    assert_eq!(v["result"]["scans"].as_array().unwrap().len(), 5);
    assert_eq!(v["seed"], 9);
}

#[test]
fn half_axes_set_at_eleven() {
    let v = json(&["directions", "ls", "--p", "11"]);
    let r = &v["result"];
    assert_eq!(r["direction_count"], 7);
    let c = &r["census"];
    assert_eq!((c["constants"].as_u64(), c["family_ii"].as_u64(), c["family_i"].as_u64()), (Some(5), Some(2), Some(5)));
    let slopes = r["report"]["slopes"].as_array().unwrap();
    assert_eq!(slopes.last().unwrap()["slope"], "inf");
}

#[test]
fn random_sets_meet_the_degree_bound() {
    let v = json(&["directions", "check", "--p", "11", "--random", "50", "--seed", "42"]);
    assert_eq!(v["result"]["passed"], 50);
    assert_eq!(v["result"]["trials"], 50);
}

#[test]
fn point_files() {
    let dir = tempfile::tempdir().unwrap();
    let line = dir.path().join("line.txt");
    std::fs::write(&line, "p=7\n0,0\n1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n").unwrap();
    let v = json(&["directions", "analyze", "--points", line.to_str().unwrap()]);
    assert_eq!(v["result"]["report"]["direction_count"], 1);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "p=7\n0,0\n\n2 3\n").unwrap();
    let out = redeilab(&["directions", "analyze", "--points", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "p=7\n").unwrap();
    let out = redeilab(&["fourier", "--points", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("|S| = 0"));
}

#[test]
fn fourier_of_the_half_axes_set() {
    let v = json(&["fourier", "--ls", "--p", "13"]);
    let r = &v["result"];
    assert!(r["plancherel_residual"].as_f64().unwrap() < 1e-8 * 13.0);
    assert_eq!(r["gauss_count"]["m"], 6);
    assert_eq!(r["gauss_count"]["gap"], 2);
    assert_eq!(r["exploratory"], false);
    let d = &r["directions"][0];
    for key in ["slope", "class", "p_mag", "poly_lc"] {
        assert!(!d[key].is_null(), "{key}");
    }
    let v7 = json(&["fourier", "--ls", "--p", "7"]);
    assert_eq!(v7["result"]["exploratory"], true);
    assert_eq!(v7["result"]["gauss_count"]["asserted"], false);
}

#[test]
fn single_threaded_runs_are_byte_identical() {
    let args = ["directions", "ls", "--p", "13", "--threads", "1", "--no-timing"];
    let a = redeilab(&args);
    let b = redeilab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut multi: Value = json(&["directions", "ls", "--p", "13", "--threads", "2", "--no-timing"]);
    let mut single: Value = serde_json::from_slice(&a.stdout).unwrap();
    multi["config"]["global"]["threads"] = Value::Null;
    single["config"]["global"]["threads"] = Value::Null;
    assert_eq!(multi, single);
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_redeilab"))
        .args(["charsum", "paley", "--p", "7"])
        .env("REDEILAB_THREADS", "1")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["global"]["threads"], 1);
}

#[test]
fn csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.csv");
    let out = redeilab(&["directions", "census", "--p", "7", "--format", "csv", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "p,directions,constants,family_i,family_ii,other,holds\n7,5,3,3,2,0,true\n");
}

#[test]
fn polynomial_inspection() {
    let v = json(&["poly", "p=7; coeffs=[4,0,0,4]", "--mode", "report"]);
    let r = &v["result"];
    assert_eq!(r["family"], "ii");
    assert_eq!(r["range"]["range_sum"], 7);
    assert_eq!(r["checks"]["normalized_lc"], 3);
    assert_eq!(v["mode"], "report");
    let out = redeilab(&["poly", "p=7; coeffs=[1,x]"]);
    assert_eq!(out.status.code(), Some(2));
}
