use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn itermap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itermap"))
        .args(args)
        .output()
        .expect("failed to launch itermap")
}

fn json(args: &[&str]) -> Value {
    let out = itermap(args);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn sizes(v: &Value) -> Vec<u64> {
    v["image_sizes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect()
}

#[test]
fn analyze_small_fields() {
    let v = json(&["analyze", "--map", "p=5; num=1,0,1", "--n", "3"]);
    assert_eq!(sizes(&v), [4, 4, 4]);
    assert_eq!(v["max_tail_length"], 1);
    assert_eq!(v["bijective"], false);

    let v = json(&["analyze", "--map", "p=7; num=1,0,1", "--n", "3"]);
    assert_eq!(sizes(&v), [5, 4, 3]);
    assert_eq!(v["periodic_count"], 3);
}

#[test]
fn analyze_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = itermap(&[
        "analyze",
        "--map",
        "p=7; num=1,0,1",
        "--n",
        "2",
        "--format",
        "csv",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text, "n,image_size,affine_image_size\n1,5,4\n2,4,3\n");
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(
        itermap(&["analyze", "--map", "p=4; num=1,0,1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        itermap(&["analyze", "--map", "p=5; num=1,0,5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        itermap(&["indicatrix", "--family", "Q3"]).status.code(),
        Some(2)
    );
    assert_eq!(itermap(&["analyze"]).status.code(), Some(2));
}

#[test]
fn indicatrix_of_s3() {
    let v = json(&["indicatrix", "--family", "S3", "--n-max", "2"]);
    assert_eq!(v["indicatrix"]["text"], "1/3 + 1/2 x + 1/6 x^3");
    assert_eq!(v["fixed_point_free_element"], true);
    assert_eq!(v["fpp"][0]["exact"], "2/3");

    let enumerated = json(&[
        "indicatrix",
        "--family",
        "S3",
        "--enumerate",
        "--n-max",
        "2",
    ]);
    assert_eq!(enumerated["indicatrix"], v["indicatrix"]);
    assert_eq!(enumerated["elements"], 6);

    let generated = json(&[
        "indicatrix",
        "--generators",
        "(0 1 2);(0 1)",
        "--degree",
        "3",
    ]);
    assert_eq!(generated["indicatrix"], v["indicatrix"]);
}

#[test]
fn coset_without_derangement() {
    let v = json(&[
        "indicatrix",
        "--group",
        "A3",
        "--coset",
        "(0 1)",
        "--n-max",
        "2",
    ]);
    assert_eq!(v["indicatrix"]["text"], "x");
    assert_eq!(v["fixed_point_free_element"], false);
    assert_eq!(v["elements"], 3);
}

#[test]
fn cyclic_bounds_pass() {
    let out = itermap(&[
        "bounds", "--family", "C", "--d", "2", "--n-max", "20", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn compare_reports_rows() {
    let v = json(&[
        "compare",
        "--map",
        "p=5; num=1,0,1",
        "--hypothesis",
        "S2",
        "--n",
        "3",
    ]);
    assert_eq!(v["flags"]["hypothesis"], "[S2]^n");
    assert_eq!(v["flags"]["orbit_certified_to"], 3);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["ratio"], "2/3");
}

#[test]
fn family_thresholds() {
    let v = json(&[
        "family",
        "--family",
        "axd-plus-c",
        "--a",
        "1",
        "--c",
        "1",
        "--d",
        "2",
        "--n",
        "2",
    ]);
    assert_eq!(v["rows"][1]["prime_threshold"], "13122");
    assert_eq!(v["heights"]["B"], "3");
    assert!(v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["dominates"] == true));
}

fn sweep(dir: &Path, format: &str, jobs: &str) -> Output {
    itermap(&[
        "--jobs",
        jobs,
        "sweep",
        "--map-template",
        "num=1,0,1",
        "--primes",
        "100..200",
        "--filter",
        "1 mod 4",
        "--n",
        "3",
        "--out-dir",
        dir.to_str().unwrap(),
        "--format",
        format,
    ])
}

#[test]
fn sweep_empty_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = itermap(&[
        "sweep",
        "--map-template",
        "num=1,0,1",
        "--primes",
        "24..28",
        "--filter",
        "all",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(sweep(a.path(), "json", "1").status.success());
    assert!(sweep(b.path(), "json", "4").status.success());
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() > 2);
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
    }
}

#[test]
fn sweep_aggregate_matches_per_prime_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sweep(dir.path(), "json", "2").status.success());
    let agg: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("aggregate.json")).unwrap())
            .unwrap();
    let primes: Vec<u64> = agg["primes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["p"].as_u64().unwrap())
        .collect();
    assert_eq!(primes, [101, 109, 113, 137, 149, 157, 173, 181, 193, 197]);

    let reports: Vec<Value> = primes
        .iter()
        .map(|p| {
            serde_json::from_str(
                &fs::read_to_string(dir.path().join(format!("p{p}.json"))).unwrap(),
            )
            .unwrap()
        })
        .collect();
    for (i, row) in agg["rows"].as_array().unwrap().iter().enumerate() {
        let devs: Vec<f64> = reports
            .iter()
            .map(|r| r["rows"][i]["deviation"].as_f64().unwrap())
            .collect();
        let mean = devs.iter().sum::<f64>() / devs.len() as f64;
        let max = devs.iter().cloned().fold(0.0, f64::max);
        assert_eq!(row["primes"], primes.len());
        assert!((row["mean_deviation"].as_f64().unwrap() - mean).abs() < 1e-12);
        assert_eq!(row["max_deviation"].as_f64().unwrap(), max);
    }
}

#[test]
fn sweep_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sweep(dir.path(), "csv", "2").status.success());
    let agg = fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
    assert!(agg.starts_with("n,primes,fpp,mean_ratio,mean_deviation,max_deviation\n"));
    assert_eq!(agg.lines().count(), 4);
    assert!(dir.path().join("p101.csv").exists());
}
