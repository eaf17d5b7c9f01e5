//! The `tqft-volume` binary: exit codes, determinism, config merging and output formats.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tqft-volume"));
    c.env_remove("TQFT_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tqft-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn specfun_values() {
    let o = run(&[
        "specfun",
        "--fn",
        "bloch-wigner",
        "--x",
        "0.5",
        "--y",
        "0.8660254037844386",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // D(e^{iπ/3}), the volume of the regular ideal tetrahedron
    assert!((json(&o)["value"].as_f64().unwrap() - 1.0149416064096536).abs() < 1e-12);

    let o = run(&["specfun", "--fn", "faddeev", "--x", "0", "--b", "0.8"]);
    let v = &json(&o)["value"];
    let want = std::f64::consts::PI * (0.64 + 1.0 / 0.64) / 24.0;
    assert!((v[0].as_f64().unwrap() - want.cos()).abs() < 1e-12);
    assert!((v[1].as_f64().unwrap() - want.sin()).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["specfun", "--fn", "gamma", "--x", "1"]).status.code(), Some(2));
    assert_eq!(run(&["angles", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["angles", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["saddle", "--t-index", "9"]).status.code(), Some(2));
    assert_eq!(run(&["angles", "--rel-tol", "-1"]).status.code(), Some(2));
    let o = bin().args(["angles"]).env("TQFT_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    // t₁ = −1 has no stationary point: numerical failure with a JSON diagnostic
    let o = run(&["saddle", "--t-index", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let d: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(d["status"], "error");
    assert_eq!(d["command"], "saddle");
    assert_eq!(d["kind"], "domain");

    // the knot edge of the H-triangulation forces a zero angle, so there is no interior point
    let o = run(&["angles", "--builtin", "h73"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        serde_json::from_slice::<Value>(&o.stderr).unwrap()["kind"],
        "infeasible"
    );
}

#[test]
fn saddle_t5_matches_the_volume() {
    let o = run(&["saddle", "--t-index", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["f"][1].as_f64().unwrap() + tqft_volume::VOL_7_3).abs() < 1e-8);
    assert_eq!(v["classification"]["admissible"], true);
}

#[test]
fn json_is_byte_identical_across_runs_and_thread_counts() {
    for args in [
        &["gluing"][..],
        &["saddle"][..],
        &[
            "integrate",
            "sweep",
            "--method",
            "2d",
            "--b",
            "0.5,0.45,0.4",
            "--threads",
            "4",
        ][..],
    ] {
        let a = bin().args(args).env("TQFT_THREADS", "1").output().unwrap();
        let b = bin().args(args).env("TQFT_THREADS", "4").output().unwrap();
        let c = bin().args(args).output().unwrap();
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stdout, c.stdout, "{args:?}");
    }
}

#[test]
fn sweep_csv_and_json_mirror() {
    let out = scratch("sweep.csv");
    let o = run(&[
        "integrate",
        "sweep",
        "--method",
        "2d",
        "--b",
        "0.5,0.45,0.4",
        "--format",
        "csv",
        "--json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("b,hbar,log_abs_J,volume_estimate,err_bound"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    let mirror: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    for (row, m) in rows.iter().zip(mirror["rows"].as_array().unwrap()) {
        assert_eq!(row[0], m["b"].as_f64().unwrap());
        assert_eq!(row[3], m["volume_estimate"].as_f64().unwrap());
        let hbar = (row[0] + 1.0 / row[0]).powi(-2);
        assert!((row[1] - hbar).abs() < 1e-15);
        assert!((row[3] - 2.0 * std::f64::consts::PI * hbar * row[2]).abs() < 1e-12);
    }

    // an impossible error-bound tolerance is a numerical failure
    let o = run(&[
        "integrate",
        "sweep",
        "--method",
        "2d",
        "--b",
        "0.5,0.45,0.4",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let d: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(d["status"], "tolerance");
}

#[test]
fn flags_override_the_config_file() {
    let cfg = scratch("run.toml");
    std::fs::write(&cfg, "b = 0.7\nabs_tol = 1e-12\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = json(&run(&["--config", c, "specfun", "--fn", "log-faddeev", "--x", "0.3"]));
    assert_eq!(from_file["b"].as_f64(), Some(0.7));
    let flagged = json(&run(&[
        "--config",
        c,
        "specfun",
        "--fn",
        "log-faddeev",
        "--x",
        "0.3",
        "--b",
        "0.9",
    ]));
    assert_eq!(flagged["b"].as_f64(), Some(0.9));
    assert_ne!(from_file["value"], flagged["value"]);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(run(&["--config", c, "angles"]).status.code(), Some(2));
    std::fs::write(&cfg, "b = [0.5, 0.4]\n").unwrap();
    assert_eq!(run(&["--config", c, "integrate", "single"]).status.code(), Some(2));
}

#[test]
fn two_and_three_dimensional_integrals_agree() {
    let est = |m: &str| {
        let o = run(&["integrate", "single", "--b", "0.4", "--method", m]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        json(&o)["volume_estimate"].as_f64().unwrap()
    };
    let (a, b) = (est("2d"), est("3d"));
    // |J| is the same; each carries a relative error of at most the default 1e-6
    assert!((a - b).abs() < 2.0 * std::f64::consts::PI * 0.13 * 2e-6, "{a} vs {b}");
}

#[test]
fn full_pipeline_passes() {
    let out = scratch("full.json");
    let o = run(&["full", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(s["pass"], true);
    assert!((s["max_volume"].as_f64().unwrap() - 4.592125697).abs() < 1e-6);
    assert_eq!(s["roots"].as_array().unwrap().len(), 7);
    assert_eq!(s["sweep"]["rows"].as_array().unwrap().len(), 5);
}
