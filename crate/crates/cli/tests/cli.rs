use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_percolimit"));
    c.env_remove("PERCOLIMIT_SEED");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&read(path)).unwrap()
}

#[test]
fn simulate_iic_cond_writes_tree_and_manifest() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "simulate", "--model", "iic-cond", "--sigma", "2", "--height", "1000", "--seed", "7", "--out", "run",
        ],
    );
    let pt = read(d.path().join("run/tree.pt"));
    let header = pt.lines().next().unwrap();
    let n: usize = header.strip_prefix("pt1 ").unwrap().parse().unwrap();
    assert!(n > 1000);
    assert_eq!(pt.lines().nth(1).unwrap().split(' ').count(), n);
    let m = json(d.path().join("run/manifest.json"));
    assert_eq!(m["seed"], 7);
    assert_eq!(m["sigma"], 2);
    assert_eq!(m["model"], "iic-cond");
    assert_eq!(m["params"]["height"], 1000);
    assert_eq!(m["n_replicas"], 1);
    assert!(m["version"].is_string());
}

#[test]
fn simulate_is_deterministic() {
    let d = TempDir::new().unwrap();
    for out in ["a", "b"] {
        ok(
            d.path(),
            &[
                "simulate", "--model", "iic", "--height", "200", "--seed", "11", "--out", out,
            ],
        );
    }
    for f in ["tree.pt", "left.pt", "right.pt", "manifest.json"] {
        assert_eq!(
            read(d.path().join("a").join(f)),
            read(d.path().join("b").join(f)),
            "{f}"
        );
    }
}

#[test]
fn simulate_envelope_csv() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "simulate", "--model", "envelope", "--tmin", "0.001", "--tmax", "50", "--seed", "3", "--out", "env",
        ],
    );
    let csv = read(d.path().join("env/envelope.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t_min,initial_value,t_max"));
    let head: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!((head[0], head[2]), (0.001, 50.0));
    assert_eq!(lines.next(), Some("t_jump,value"));
    let mut prev = (head[0], head[1]);
    for l in lines {
        let (t, v) = l.split_once(',').unwrap();
        let (t, v): (f64, f64) = (t.parse().unwrap(), v.parse().unwrap());
        assert!(t > prev.0 && t <= 50.0 && v < prev.1 && v > 0.0);
        prev = (t, v);
    }
}

#[test]
fn seed_from_environment_and_missing_seed() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["simulate", "--model", "envelope", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    let status = bin()
        .current_dir(d.path())
        .env("PERCOLIMIT_SEED", "5")
        .args(["simulate", "--model", "envelope", "--out", "e1"])
        .status()
        .unwrap();
    assert!(status.success());
    ok(
        d.path(),
        &["simulate", "--model", "envelope", "--seed", "5", "--out", "e2"],
    );
    assert_eq!(
        read(d.path().join("e1/envelope.csv")),
        read(d.path().join("e2/envelope.csv"))
    );
}

#[test]
fn sde_reuses_given_envelope() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "simulate", "--model", "envelope", "--tmin", "0.0001", "--tmax", "20", "--seed", "1", "--out", "env",
        ],
    );
    ok(
        d.path(),
        &[
            "simulate",
            "--model",
            "sde",
            "--envelope",
            "env/envelope.csv",
            "--dt",
            "0.001",
            "--seed",
            "2",
            "--out",
            "sde",
        ],
    );
    assert_eq!(
        read(d.path().join("env/envelope.csv")),
        read(d.path().join("sde/envelope.csv"))
    );
    assert_eq!(
        json(d.path().join("sde/manifest.json"))["params"]["envelope"],
        "envelope.csv"
    );
    let path = read(d.path().join("sde/path.csv"));
    assert_eq!(path.lines().next(), Some("t,Y,Ymin"));
    assert_eq!(path.lines().count(), 1 + 1001);
    for l in path.lines().skip(1) {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[2] <= v[1] && v[2] <= 0.0);
    }
}

#[test]
fn gw_overflow_names_the_cap() {
    let d = TempDir::new().unwrap();
    let out = run(
        d.path(),
        &[
            "simulate", "--model", "gw", "--sigma", "3", "--w", "0.9", "--cap", "100", "--seed", "1", "--out", "g",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cap"));
}

#[test]
fn encode_cherry() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("cherry.pt"), "pt1 3\n2 0 0\n").unwrap();
    ok(d.path(), &["encode", "--input", "cherry.pt", "--out", "l.csv"]);
    assert_eq!(read(d.path().join("l.csv")), "t,value\n0,0\n1,1\n2,0\n3,-1\n");
    ok(
        d.path(),
        &[
            "encode",
            "--input",
            "cherry.pt",
            "--encoding",
            "height",
            "--out",
            "h.csv",
        ],
    );
    assert_eq!(read(d.path().join("h.csv")), "t,value\n0,0\n1,1\n2,1\n");
    ok(
        d.path(),
        &[
            "encode",
            "--input",
            "cherry.pt",
            "--encoding",
            "contour",
            "--out",
            "c.csv",
        ],
    );
    assert_eq!(read(d.path().join("c.csv")), "t,value\n0,0\n1,1\n2,0\n3,1\n4,0\n");
    // contour time runs at 2k²
    ok(
        d.path(),
        &[
            "encode",
            "--input",
            "cherry.pt",
            "--encoding",
            "contour",
            "--k",
            "2",
            "--out",
            "cs.csv",
        ],
    );
    assert_eq!(
        read(d.path().join("cs.csv")),
        "t,value\n0,0\n0.125,0.5\n0.25,0\n0.375,0.5\n0.5,0\n"
    );
}

#[test]
fn encode_decode_round_trip() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "simulate", "--model", "ztheta", "--height", "30", "--w", "0.4", "--seed", "9", "--out", "z",
        ],
    );
    ok(d.path(), &["encode", "--input", "z/tree.pt", "--out", "l.csv"]);
    assert_eq!(
        read(d.path().join("l.csv")),
        read(d.path().join("z/tree_lukaciewicz.csv"))
    );
    ok(
        d.path(),
        &["encode", "--decode", "--input", "l.csv", "--out", "back.pt"],
    );
    assert_eq!(read(d.path().join("back.pt")), read(d.path().join("z/tree.pt")));
}

#[test]
fn malformed_tree_reports_location() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("bad.pt"), "pt1 3\n2 x 0\n").unwrap();
    let out = run(d.path(), &["encode", "--input", "bad.pt", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("bad.pt") && err.contains("line 2") && err.contains("column 3"),
        "{err}"
    );
    let out = run(d.path(), &["encode", "--input", "missing.pt", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compare_dry_run_prints_plan() {
    let d = TempDir::new().unwrap();
    let plan = ok(
        d.path(),
        &["compare", "--experiment", "levels-cross", "--seed", "1", "--dry-run"],
    );
    assert!(plan.contains("levels-cross") && plan.contains("10000"), "{plan}");
    assert!(!d.path().join("out").exists());
    let out = run(d.path(), &["compare", "--experiment", "levels-cross", "--dry-run"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(
        d.path(),
        &["compare", "--experiment", "nope", "--seed", "1", "--dry-run"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_writes_report_and_samples() {
    let d = TempDir::new().unwrap();
    let stdout = ok(
        d.path(),
        &[
            "--workers",
            "1",
            "compare",
            "--experiment",
            "levels",
            "--seed",
            "4",
            "--k",
            "60",
            "--replicas",
            "400",
            "--threshold",
            "0.2",
            "--out",
            "cmp",
        ],
    );
    assert!(stdout.starts_with("PASS levels"), "{stdout}");
    let r = json(d.path().join("cmp/report.json"));
    assert_eq!(r["experiment"], "levels");
    assert_eq!(r["n_A"], 400);
    assert_eq!(r["n_B"], 400);
    assert_eq!(r["pass"], true);
    for key in ["ks_stat", "p_value", "threshold", "wall_time_s"] {
        assert!(r[key].is_number(), "{key}");
    }
    assert_eq!(r["manifest"], json(d.path().join("cmp/manifest.json")));
    let a = read(d.path().join("cmp/sample_a.csv"));
    assert_eq!(a.lines().next(), Some("replica,value"));
    assert_eq!(a.lines().count(), 401);
    assert_eq!(read(d.path().join("cmp/sample_b.csv")).lines().count(), 401);
}

#[test]
fn compare_failure_exits_one() {
    let d = TempDir::new().unwrap();
    let out = run(
        d.path(),
        &[
            "compare",
            "--experiment",
            "iic-height",
            "--seed",
            "4",
            "--k",
            "10",
            "--replicas",
            "200",
            "--threshold",
            "0.000001",
            "--out",
            "cmp",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("FAIL"));
    assert_eq!(json(d.path().join("cmp/report.json"))["pass"], false);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let d = TempDir::new().unwrap();
    std::fs::write(
        d.path().join("cfg.json"),
        r#"{"experiment": "volume", "seed": 8, "k": 50, "n_a": 20, "n_b": 30, "workers": 1}"#,
    )
    .unwrap();
    let plan = ok(d.path(), &["--config", "cfg.json", "compare", "--k", "70", "--dry-run"]);
    assert!(
        plan.contains("seed 8") && plan.contains("k = 70") && plan.contains("x 30"),
        "{plan}"
    );
    std::fs::write(
        d.path().join("bad.json"),
        r#"{"experiment": "volume", "seed": 8, "bogus": 1}"#,
    )
    .unwrap();
    let out = run(d.path(), &["--config", "bad.json", "compare", "--dry-run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    let out = run(d.path(), &["--config", "absent.json", "compare", "--dry-run"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn level_stats_of_a_tree() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("t.pt"), "pt1 6\n2 2 0 0 1 0\n").unwrap();
    let csv = ok(d.path(), &["level-stats", "--input", "t.pt"]);
    assert_eq!(csv, "level,count,volume\n0,1,1\n1,2,3\n2,3,6\n");
    ok(
        d.path(),
        &["level-stats", "--input", "t.pt", "--max-level", "4", "--out", "l.csv"],
    );
    assert!(read(d.path().join("l.csv")).ends_with("4,0,6\n"));
}

#[test]
fn level_stats_given_an_envelope() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "simulate", "--model", "envelope", "--tmin", "0.000001", "--tmax", "5", "--seed", "6", "--out", "env",
        ],
    );
    ok(
        d.path(),
        &[
            "level-stats",
            "--envelope",
            "env/envelope.csv",
            "--seed",
            "3",
            "--replicas",
            "4000",
            "--out",
            "lv",
        ],
    );
    let s = json(d.path().join("lv/summary.json"));
    assert_eq!(s["n"], 4000);
    let (mean, closed) = (
        s["sample_mean"].as_f64().unwrap(),
        s["closed_form_mean"].as_f64().unwrap(),
    );
    let values: Vec<f64> = read(d.path().join("lv/level_limit.csv"))
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3999.0).sqrt();
    assert!((mean - closed).abs() < 4.0 * sd / 4000f64.sqrt(), "{mean} vs {closed}");
    assert_eq!(json(d.path().join("lv/manifest.json"))["model"], "level-limit");
    assert_eq!(
        read(d.path().join("lv/envelope.csv")),
        read(d.path().join("env/envelope.csv"))
    );
}

#[test]
fn two_sided_sde_with_either_coupling() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "simulate",
            "--model",
            "sde",
            "--two-sided",
            "--dt",
            "0.01",
            "--seed",
            "2",
            "--out",
            "shared",
        ],
    );
    ok(
        d.path(),
        &[
            "simulate",
            "--model",
            "sde",
            "--two-sided",
            "--coupling",
            "independent",
            "--dt",
            "0.01",
            "--seed",
            "2",
            "--out",
            "indep",
        ],
    );
    assert!(!d.path().join("shared/envelope_right.csv").exists());
    assert!(d.path().join("indep/envelope_right.csv").exists());
    for dir in ["shared", "indep"] {
        let m = json(d.path().join(dir).join("manifest.json"));
        assert_eq!(m["params"]["variant"], "half");
        assert_ne!(
            read(d.path().join(dir).join("path_left.csv")),
            read(d.path().join(dir).join("path_right.csv"))
        );
    }
    assert_eq!(
        read(d.path().join("shared/path_left.csv")),
        read(d.path().join("indep/path_left.csv"))
    );
    assert_eq!(
        json(d.path().join("indep/manifest.json"))["params"]["coupling"],
        "independent"
    );
}
