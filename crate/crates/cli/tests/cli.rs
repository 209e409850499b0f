use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn latmoment(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latmoment")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Data rows of a CSV output (header comments and column line stripped).
fn csv_rows(s: &str) -> Vec<Vec<String>> {
    let body: String = s.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn poisson_third_moment() {
    let o = latmoment(&["poisson", "--n", "3", "--lambda", "1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("# latmoment-csv v1\n"));
    assert_eq!(csv_rows(&s), vec![vec!["3", "1", "5"]]);
}

#[test]
fn poisson_grid_is_sorted_and_exact() {
    let o = latmoment(&["poisson", "--n", "3,2", "--lambda", "2,1/2"]);
    let rows = csv_rows(&stdout(&o));
    let want = [["2", "1/2", "3/4"], ["2", "2", "6"], ["3", "1/2", "11/8"], ["3", "2", "22"]];
    assert_eq!(rows, want.map(|r| r.map(String::from).to_vec()).to_vec());
}

#[test]
fn t0_table_below_caps() {
    let o = latmoment(&["t0-table", "--k", "26,48,70,92,115", "--c0", "0.24"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    for (row, cap) in rows.iter().zip([27.0, 97.0, 213.0, 372.0, 576.0]) {
        let t0: f64 = row[5].parse().unwrap();
        let ceil: i64 = row[7].parse().unwrap();
        assert!(t0 < cap, "{row:?}");
        assert!(ceil as f64 <= cap && ceil as f64 >= t0);
    }
    assert_eq!(rows[0][7], "27");
    assert_eq!(rows[4][7], "576");
}

#[test]
fn verify_core_passes() {
    let o = latmoment(&["verify", "--suite", "core", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["all_pass"], true);
    let records = v["records"].as_array().unwrap();
    assert!(records.len() > 20);
    assert!(records.iter().all(|r| r["verdict"] == true));
}

#[test]
fn below_threshold_exits_2_with_t0() {
    let o = latmoment(&["second-moment", "--field", "Q(zeta,4)", "--t", "3", "--v", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t0 = 4.5"), "{}", stderr(&o));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(latmoment(&["field-info", "--field", "Q(sqrt,4)"]).status.code(), Some(2));
    assert_eq!(latmoment(&["field-info", "--field", "Q(foo)"]).status.code(), Some(2));
    assert_eq!(latmoment(&["poisson", "--n", "3"]).status.code(), Some(2));
    assert_eq!(latmoment(&["zeta", "--s", "0.5"]).status.code(), Some(2));
    assert_eq!(latmoment(&["bogus"]).status.code(), Some(2));
}

#[test]
fn every_numeric_cell_is_exact_or_has_error() {
    let o = latmoment(&["moment-bounds", "--field", "Q", "--t", "40", "--n", "3", "--v", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for row in csv_rows(&stdout(&o)) {
        let value_is_number = row[1].parse::<f64>().is_ok();
        if value_is_number {
            assert!(row[2].parse::<f64>().is_ok(), "{row:?}");
        }
    }
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("override.cfg");
    std::fs::write(&cfg, "# defaults\nfield = Q(zeta,4)\nt = 30\nv = 2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let rows = |extra: &[&str]| {
        let mut args = vec!["second-moment", "--config", cfg];
        args.extend_from_slice(extra);
        csv_rows(&stdout(&latmoment(&args)))
    };
    let base = rows(&[]);
    let v = |r: &Vec<Vec<String>>| r.iter().find(|x| x[0] == "v").unwrap()[1].clone();
    assert_eq!(v(&base), "2.0");
    assert_eq!(v(&rows(&["--v", "1"])), "1.0");
    std::fs::write(scratch("bad.cfg"), "colour = blue\n").unwrap();
    let o = latmoment(&["field-info", "--config", scratch("bad.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_files_are_byte_identical() {
    let a = scratch("empirical_a.csv");
    let b = scratch("empirical_b.csv");
    let run = |path: &PathBuf, threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_latmoment"))
            .args(["empirical", "--t", "10", "--v", "1,2", "--p", "101", "--samples", "200", "--seed", "5"])
            .arg("--output")
            .arg(path)
            .env("LATMOMENT_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    };
    run(&a, "1");
    run(&b, "4");
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn json_tables_carry_schema() {
    let o = latmoment(&["field-info", "--field", "Q(sqrt,5)", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "field-info");
    let disc = v["rows"].as_array().unwrap().iter().find(|r| r["quantity"] == "abs_discriminant").unwrap();
    assert_eq!(disc["value"], "5");
}

#[test]
fn heights_and_zeta() {
    let o = latmoment(&["height", "--field", "Q(sqrt,5)", "--x", "0:1"]);
    let rows = csv_rows(&stdout(&o));
    let h: f64 = rows.iter().find(|r| r[0] == "weil_height").unwrap()[1].parse().unwrap();
    assert!((h - 0.2406).abs() < 5e-5);
    let o = latmoment(&["gr-height", "--field", "Q(zeta,4)", "--rows", "1,0,1:1;0,1,1/2"]);
    let rows = csv_rows(&stdout(&o));
    let get = |k: &str| rows.iter().find(|r| r[0] == k).unwrap()[1].parse::<f64>().unwrap();
    assert!((get("gr_height") - get("det_lattice") * get("frak_d")).abs() < 1e-9 * get("gr_height"));
    let o = latmoment(&["zeta", "--field", "Q", "--s", "2"]);
    let rows = csv_rows(&stdout(&o));
    let z = rows.iter().find(|r| r[0] == "zeta").unwrap();
    let (mid, pm): (f64, f64) = (z[1].parse().unwrap(), z[2].parse().unwrap());
    assert!((mid - std::f64::consts::PI.powi(2) / 6.0).abs() <= pm);
}
