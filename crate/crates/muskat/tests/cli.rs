mod common;

use common::{cli, fixture, stage};
use muskat::manifest::RunManifest;
use muskat_core::field::biot_savart;

fn arg(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("simulate"));
    let (code, _, err) = cli(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    let (code, _, _) = cli(&["simulate"]);
    assert_eq!(code, 2);
}

#[test]
fn invalid_config_exits_with_usage_code() {
    let (code, _, err) = cli(&["simulate", "--config", arg(&fixture("odd_n.toml"))]);
    assert_eq!(code, 2);
    assert!(err.contains("N must be even"), "{err}");
    let (code, _, err) = cli(&["check-rt", "--config", arg(&fixture("slow_decay.toml"))]);
    assert_eq!(code, 2);
    assert!(err.contains("gaussian"), "{err}");
    let (code, _, _) = cli(&["simulate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(code, 2);
}

#[test]
fn simulate_writes_into_the_requested_directory() {
    let dir = tempfile::tempdir().unwrap();
    let [cfg] = stage(dir.path(), &["minimal.toml"]).try_into().unwrap();
    let target = dir.path().join("elsewhere");
    let (code, out, _) = cli(&["simulate", "--config", arg(&cfg), "--out", arg(&target)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("completed"), "{out}");
    let m = RunManifest::read(&target.join("manifest.json")).unwrap();
    assert_eq!(m.config.output_dir, target);
    for e in &m.snapshots {
        assert!(target.join(&e.file).is_file());
    }
    assert!(!dir.path().join("output").exists());

    let again = dir.path().join("again");
    let (code, _, _) = cli(&["simulate", "--config", arg(&target.join("manifest.json")), "--out", arg(&again)]);
    assert_eq!(code, 0);
    let last = &m.snapshots.last().unwrap().file;
    assert_eq!(std::fs::read(target.join(last)).unwrap(), std::fs::read(again.join(last)).unwrap());
}

#[test]
fn simulate_refusal_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let [cfg] = stage(dir.path(), &["unstable.toml"]).try_into().unwrap();
    let (code, out, _) = cli(&["simulate", "--config", arg(&cfg)]);
    assert_eq!(code, 1);
    assert!(out.starts_with("rt_breakdown"), "{out}");
    assert!(dir.path().join("output/manifest.json").is_file());
}

#[test]
fn check_rt_reports_json() {
    let (code, out, _) = cli(&["check-rt", "--config", arg(&fixture("flat_stable.toml"))]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["in_O"], true);
    // flat interface: a_RT = c_rho_mu = b_mu * theta = 1.5
    assert!((v["infimum"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(v["c_rho_mu"].as_f64().unwrap(), 1.5);

    let (code, out, _) = cli(&["check-rt", "--config", arg(&fixture("unstable.toml"))]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["in_O"], false);
    assert!(v["infimum"].as_f64().unwrap() < 0.0);
}

#[test]
fn dispersion_prints_rates() {
    let (code, out, _) = cli(&["dispersion", "--sigma", "0", "--k", "1,2,4"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["k,rate", "1,0.5", "2,1", "4,2"]);

    // sigma = 0.5, theta = 1, b = 1: rate (1/2)(0.5 k^3 + k)
    let (code, out, _) = cli(&["dispersion", "--sigma", "0.5", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().nth(1), Some("2,3"));

    let (code, out, _) = cli(&["dispersion", "--sigma", "0", "--theta", "-1", "--k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().nth(1), Some("3,-1.5"));

    let (code, _, _) = cli(&["dispersion", "--sigma", "-1", "--k", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn dispersion_measurement_matches() {
    let (code, out, _) = cli(&["dispersion", "--sigma", "0", "--k", "2", "--measure"]);
    assert_eq!(code, 0, "{out}");
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let predicted: f64 = row[1].parse().unwrap();
    let measured: f64 = row[2].parse().unwrap();
    assert!((measured - predicted).abs() <= 0.03 * predicted.abs());
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let (code, _, err) = cli(&["verify", "--suite", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("rt-gate"), "{err}");
}

#[test]
fn verify_single_suite() {
    let (code, out, _) = cli(&["verify", "--suite", "rellich"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("all checks passed\n"));
}

#[test]
fn reconstruct_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let [cfg] = stage(dir.path(), &["minimal.toml"]).try_into().unwrap();
    let (code, _, _) = cli(&["simulate", "--config", arg(&cfg)]);
    assert_eq!(code, 0);
    let snap = dir.path().join("output/snapshot_00000.csv");
    let points = fixture("points.csv");
    let (code, out, err) = cli(&["reconstruct", "--snapshot", arg(&snap), "--points", arg(&points)]);
    assert_eq!(code, 0, "{err}");
    let data = muskat::read_snapshot(&snap).unwrap();
    let pts = muskat::cli::read_points(&points).unwrap();
    let expected = biot_savart(&data.f, &data.omega, &pts).unwrap();
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(out.lines().next(), Some("x,y,side,u,v,pressure"));
    assert_eq!(rows.len(), 3);
    for (row, s) in rows.iter().zip(&expected) {
        assert_eq!(row[2], s.side.as_str());
        assert_eq!(row[3].parse::<f64>().unwrap(), s.velocity.0);
        assert_eq!(row[4].parse::<f64>().unwrap(), s.velocity.1);
        assert_eq!(row[5], "");
    }
    assert_eq!(rows[1][2], "below");

    let near = dir.path().join("near.csv");
    std::fs::write(&near, "x,y\n-3.0,0.1\n").unwrap();
    let (code, _, err) = cli(&["reconstruct", "--snapshot", arg(&snap), "--points", arg(&near)]);
    assert_eq!(code, 1);
    assert!(err.contains("guard band"), "{err}");

    let csv = dir.path().join("field.csv");
    let (code, out, _) = cli(&[
        "reconstruct",
        "--snapshot",
        arg(&snap),
        "--points",
        arg(&points),
        "--config",
        arg(&cfg),
        "--out",
        arg(&csv),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    for line in text.lines().skip(1) {
        let p: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(p.is_finite());
    }
}
