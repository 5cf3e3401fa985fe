use std::process::{Command, Output};

fn cknsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cknsym"))
        .args(args)
        .env_remove("CKNSYM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses a CSV with a header row into (header, rows).
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn value_of(o: &Output) -> f64 {
    let (h, rows) = csv(&stdout(o));
    rows[0][column(&h, "value")].parse().unwrap()
}

#[test]
fn constants_examples() {
    let o = cknsym(&["constants", "--ckn", "--theta", "1", "--p", "4", "--lambda", "1"]);
    assert!(o.status.success());
    assert!((value_of(&o) - 3f64.sqrt() / 4.0).abs() < 1e-15);

    let o = cknsym(&["constants", "--wlh", "--gamma", "0.25", "--d", "1"]);
    assert!((value_of(&o) - 0.058_549_831_524_319).abs() < 1e-12);

    let o = cknsym(&["constants", "--ls", "--d", "2"]);
    assert!((value_of(&o) - 0.117_099_663_048_638).abs() < 1e-12);
}

#[test]
fn csv_has_seventeen_significant_digits() {
    let o = cknsym(&["constants", "--ls", "--d", "2"]);
    let (h, rows) = csv(&stdout(&o));
    let v = &rows[0][column(&h, "value")];
    let mantissa = v.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{v}");
}

#[test]
fn invalid_parameters_exit_2() {
    let cases: [&[&str]; 5] = [
        &["constants", "--ckn", "--theta", "1", "--p", "1.5", "--lambda", "1"],
        &["classify", "--d", "2", "--p", "4", "--theta", "0.1", "--a", "-1"],
        &["classify", "--d", "2", "--p", "4", "--theta", "1", "--a", "0.5"],
        &["minimize", "--d", "3", "--theta", "1", "--p", "7", "--lambda", "1"],
        &["sweep", "--d", "2", "--x", "p=3:4:2", "--y", "p=3:4:2"],
    ];
    for args in cases {
        let o = cknsym(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn classify_reports_mechanisms() {
    let o = cknsym(&["classify", "--d", "2", "--p", "4", "--theta", "1", "--a", "-1"]);
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(rows[0][column(&h, "verdict")], "BrokenProven");
    assert_eq!(rows[0][column(&h, "mechanisms")], "LinearInstability");

    let o = cknsym(&["classify", "--wlh", "--d", "2", "--gamma", "1", "--lambda", "4"]);
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(rows[0][column(&h, "verdict")], "BrokenProven");
    assert!(rows[0][column(&h, "mechanisms")].contains("LsComparison"));
}

#[test]
fn degenerate_sweep_equals_classify() {
    let c = cknsym(&["classify", "--d", "3", "--p", "3", "--theta", "0.8", "--a", "-0.5"]);
    let s = cknsym(&["sweep", "--d", "3", "--theta", "0.8", "--x", "p=3:3:1", "--y", "a=-0.5:-0.5:1"]);
    assert!(c.status.success() && s.status.success());
    assert_eq!(c.stdout, s.stdout);
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let args = ["sweep", "--d", "5", "--x", "p=2.1:3.2:12", "--y", "theta_frac=0:1:9", "--a", "0.5"];
    let one = Command::new(env!("CARGO_BIN_EXE_cknsym"))
        .args(args)
        .env("CKNSYM_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_cknsym"))
        .args(args)
        .env("CKNSYM_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(csv(&stdout(&one)).1.len(), 12 * 9);

    let bad = Command::new(env!("CARGO_BIN_EXE_cknsym"))
        .args(args)
        .env("CKNSYM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn figure_one_matches_sweep_rows() {
    let fig = cknsym(&["figure", "1", "--points", "5"]);
    let sw = cknsym(&["sweep", "--d", "5", "--x", "p=2.1:3.2:12", "--y", "theta_frac=0:1:5"]);
    let (fh, frows) = csv(&stdout(&fig));
    let (sh, srows) = csv(&stdout(&sw));
    assert_eq!(frows.len(), srows.len());
    for (f, s) in frows.iter().zip(&srows) {
        for name in ["p", "theta", "a0", "a_bar", "a_c"] {
            assert_eq!(f[column(&fh, name)], s[column(&sh, name)], "{name}");
        }
    }
}

#[test]
fn figure_two_starts_at_one() {
    let (h, rows) = csv(&stdout(&cknsym(&["figure", "2", "--points", "21"])));
    let (di, pi, li) = (column(&h, "d"), column(&h, "p"), column(&h, "big_l"));
    for d in 3..=10 {
        let curve: Vec<&Vec<String>> = rows.iter().filter(|r| r[di] == d.to_string()).collect();
        assert_eq!(curve.len(), 21);
        let p0: f64 = curve[0][pi].parse().unwrap();
        let l0: f64 = curve[0][li].parse().unwrap();
        assert!(p0 - 2.0 < 1e-5 && (l0 - 1.0).abs() < 1e-4, "d={d}: L({p0}) = {l0}");
        assert!(curve.iter().skip(1).any(|r| r[li].parse::<f64>().unwrap() < 1.0));
    }
}

#[test]
fn figure_three_ratio_below_one() {
    let (h, rows) = csv(&stdout(&cknsym(&["figure", "3"])));
    let (di, ri) = (column(&h, "d"), column(&h, "ratio"));
    let mut checked = 0;
    for r in rows {
        let d: f64 = r[di].parse().unwrap();
        if d >= 3.0 {
            assert!(r[ri].parse::<f64>().unwrap() < 1.0, "d={d}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn figure_four_crosses_twice_in_dimension_two() {
    let (h, rows) = csv(&stdout(&cknsym(&["figure", "4", "--d", "2", "--points", "400"])));
    let ri = column(&h, "ratio");
    let above: Vec<bool> = rows.iter().map(|r| r[ri].parse::<f64>().unwrap() > 1.0).collect();
    let crossings = above.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(crossings, 2);
}

#[test]
fn minimize_radial_and_broken() {
    let o = cknsym(&["minimize", "--d", "2", "--theta", "1", "--p", "4", "--lambda", "1", "--grid-ns", "2048"]);
    assert!(o.status.success());
    assert!((value_of(&o) - 2.309_401_1).abs() < 0.005 * 2.309_401_1);

    let o = cknsym(&[
        "minimize", "--d", "2", "--theta", "1", "--p", "4", "--lambda", "1", "--grid-ns", "256",
        "--grid-nphi", "16",
    ]);
    let (h, rows) = csv(&stdout(&o));
    let af: f64 = rows[0][column(&h, "angular_fraction")].parse().unwrap();
    assert!(af > 0.01, "{af}");
}

#[test]
fn minimize_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let prof = dir.path().join("w.csv");
    let out = dir.path().join("r.json");
    let o = cknsym(&[
        "minimize", "--wlh", "--d", "3", "--gamma", "0.75", "--lambda", "1", "--grid-ns", "128",
        "--profile", prof.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&prof).unwrap();
    let (h, rows) = csv(&text);
    assert_eq!(h, ["s", "phi", "w"]);
    assert_eq!(rows.len(), 128);
    let rec: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let v = rec["value"].as_f64().unwrap();
    assert!((v - 1.0 / 0.060_342).abs() < 0.01 * v, "{v}");
    assert_eq!(rec["family"], "wlh");
}

#[test]
fn nonconvergence_exits_4_with_output() {
    let o = cknsym(&[
        "minimize", "--d", "2", "--theta", "1", "--p", "4", "--lambda", "1", "--grid-ns", "256",
        "--grid-nphi", "16", "--max-iter", "2",
    ]);
    assert_eq!(o.status.code(), Some(4));
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(rows[0][column(&h, "converged")], "false");
}

#[test]
fn io_failure_exits_3() {
    let o = cknsym(&["figure", "3", "--out", "/nonexistent-dir/fig.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let o = cknsym(&["constants", "--config", "/nonexistent-dir/c.json", "--ls", "--d", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"family":"ckn","params":{"d":2,"theta":1.0,"p":4.0,"lambda":4.0},"format":"json"}"#,
    )
    .unwrap();
    let o = cknsym(&["constants", "--ckn", "--config", cfg.to_str().unwrap(), "--lambda", "1"]);
    assert!(o.status.success());
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert!((rec["value"].as_f64().unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-15);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["minimize", "--d", "2", "--theta", "1", "--p", "4", "--lambda", "1", "--grid-ns", "128", "--grid-nphi", "8"];
    assert_eq!(cknsym(&args).stdout, cknsym(&args).stdout);
}
