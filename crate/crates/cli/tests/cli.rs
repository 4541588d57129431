use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use siet_cli::CliError;

fn siet(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siet"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn coverage_rows_and_closed_column() {
    let dir = tempfile::tempdir().unwrap();
    let o = siet(dir.path(), &["coverage", "--T", "1"]);
    assert!(o.status.success());
    let r = rows(&read(dir.path(), "coverage.csv"));
    assert_eq!(r[0], ["T", "P_c_analytic", "P_c_closed"]);
    assert_eq!(num(&r[1][0]), 1.0);
    assert!((num(&r[1][1]) - 0.560_099).abs() < 1e-5);
    assert!((num(&r[1][1]) - num(&r[1][2])).abs() < 1e-6);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), read(dir.path(), "coverage.csv"));

    let o = siet(dir.path(), &["coverage", "--sigma2", "1e-13", "--T", "0.5,1"]);
    assert!(o.status.success());
    let r = rows(&read(dir.path(), "coverage.csv"));
    assert_eq!(r[0], ["T", "P_c_analytic"]);
    assert_eq!(r.len(), 3);
}

#[test]
fn empty_grid_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = siet(dir.path(), &["coverage", "--T", ""]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty grid"));
}

#[test]
fn eeh_units_and_clamp() {
    let dir = tempfile::tempdir().unwrap();
    let o = siet(dir.path(), &["eeh", "--theta", "1mW"]);
    assert!(o.status.success());
    let r = rows(&read(dir.path(), "eeh.csv"));
    assert_eq!(r[0], ["theta_w", "P_eeh_analytic", "P_eeh_closed"]);
    assert_eq!(num(&r[1][0]), 1e-3);
    assert!((num(&r[1][1]) - num(&r[1][2])).abs() < 1e-6);

    let o = siet(dir.path(), &["eeh", "--sigma2", "2mW", "--theta", "1mW,3mW"]);
    assert!(o.status.success());
    let r = rows(&read(dir.path(), "eeh.csv"));
    assert_eq!(r[0].len(), 2);
    assert_eq!(num(&r[1][1]), 1.0);
    assert!(num(&r[2][1]) < 1.0);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["coverage", "--alpha", "2"][..],
        &["eeh", "--rho", "1.2"],
        &["eeh", "--theta", "1MW"],
        &["coverage", "--set", "system.nope=1"],
        &["figures", "5"],
        &["bogus"],
    ] {
        assert_eq!(siet(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn error_kinds_map_to_exit_codes() {
    use siet_core::numerics::NumericsError;
    let numerical: CliError = siet_core::Error::Numerics(NumericsError::Divergent { alpha: 2.0 }).into();
    assert_eq!(numerical.exit_code(), 3);
    let config: CliError = siet_core::Error::InvalidInput("x".into()).into();
    assert_eq!(config.exit_code(), 2);
    assert_eq!(CliError::Disagreement(1).exit_code(), 4);
}

#[test]
fn montecarlo_agrees_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["montecarlo", "--strict", "--trials", "100000", "--seed", "11"];
    let oa = siet(a.path(), &args);
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stdout));
    let ob = siet(b.path(), &args);
    assert!(ob.status.success());
    let csv = read(a.path(), "montecarlo.csv");
    assert_eq!(csv, read(b.path(), "montecarlo.csv"));
    let r = rows(&csv);
    assert_eq!(r[0], ["quantity", "analytic", "mc_value", "ci_halfwidth", "agree"]);
    assert_eq!(r[1][0], "coverage T=1");
    assert!(r[1..].iter().all(|row| row[4] == "true"));
}

#[test]
fn montecarlo_small_sample_is_honest() {
    let dir = tempfile::tempdir().unwrap();
    let o = siet(dir.path(), &["montecarlo", "--trials", "10", "--T", "0.5,1,2,4,8", "--theta", "1mW"]);
    assert!(o.status.success());
    let r = rows(&read(dir.path(), "montecarlo.csv"));
    for row in &r[1..] {
        let (a, m, ci) = (num(&row[1]), num(&row[2]), num(&row[3]));
        assert!(ci > 0.05);
        assert_eq!(row[4] == "true", (a - m).abs() <= 1.5 * ci);
    }
}

#[test]
fn strict_disagreement_exits_4() {
    // a one-point window cannot reproduce the analytic coverage
    let dir = tempfile::tempdir().unwrap();
    let o = siet(
        dir.path(),
        &[
            "montecarlo",
            "--strict",
            "--trials",
            "20000",
            "--theta",
            "",
            "--set",
            "sim.window_radius=6",
            "--set",
            "sim.compensate_tail=false",
        ],
    );
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(read(dir.path(), "montecarlo.csv").contains("false"));
    let lax = siet(dir.path(), &["montecarlo", "--trials", "20000", "--theta", "", "--set", "sim.window_radius=6", "--set", "sim.compensate_tail=false"]);
    assert!(lax.status.success());
}

#[test]
fn figure_two_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/figs");
    let o = siet(&out, &["figures", "2"]);
    assert!(o.status.success());
    let csv = read(&out, "fig2.csv");
    let r = rows(&csv);
    assert_eq!(r[0], ["lambda_sqrt_p", "rho=0.1", "rho=0.5", "rho=0.9"]);
    assert_eq!(r[1][1..], ["0", "0", "0"]);
    let plot = read(&out, "fig2.plot");
    assert!(plot.contains("'fig2.csv'"));
    assert!(plot.contains("# epsilon = 0.3"));
    assert!(plot.contains("# theta_w = 0.001"));
}

#[test]
fn figure_three_and_four_defaults() {
    let dir = tempfile::tempdir().unwrap();
    assert!(siet(dir.path(), &["figures", "3"]).status.success());
    let r3 = rows(&read(dir.path(), "fig3.csv"));
    assert_eq!(r3[0].len(), 5);
    assert!(r3[0].contains(&"lambda_max=0.01 eta=0.6".to_string()));
    assert_eq!(num(&r3[1][0]), 0.01);
    assert_eq!(num(&r3.last().unwrap()[0]), 2.0);

    assert!(siet(dir.path(), &["figures", "4"]).status.success());
    let r4 = rows(&read(dir.path(), "fig4.csv"));
    let header = &r4[0];
    assert_eq!(header.len(), 7);
    assert!(header.iter().any(|h| h.starts_with("eta=0.3")));
    assert!(header.iter().any(|h| h.starts_with("eta=0.6")));
    assert!(read(dir.path(), "fig4.plot").contains("set logscale y"));
}

fn feasibility_rows(dir: &Path) -> Vec<Vec<String>> {
    rows(&read(dir, "feasibility.csv"))
}

#[test]
fn feasibility_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = siet(dir.path(), &["feasibility", "--density-max", "1e-4", "--eta", "0.3,0.6"]);
    assert!(o.status.success());
    let r = feasibility_rows(dir.path());
    assert_eq!(r[0][9], "feasible");
    assert_eq!(r.len(), 1 + 2 * 3);
    assert!(r[1..].iter().all(|row| row[9] == "false"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("infeasible"));

    assert!(siet(dir.path(), &["feasibility", "--density-max", "1e-2", "--eta", "0.6"]).status.success());
    let r = feasibility_rows(dir.path());
    let level1 = r.iter().find(|row| row[2] == "secondary-battery").unwrap();
    assert_eq!(level1[9], "true");

    assert!(siet(
        dir.path(),
        &["feasibility", "--density-max", "0.1", "--eta", "0.3", "--zeta", "1", "--target", "0.8"]
    )
    .status
    .success());
    let r = feasibility_rows(dir.path());
    assert_eq!(r.len(), 2);
    assert_eq!(r[1][2], "basic-system");
    assert!((num(&r[1][7]) - 0.0964).abs() < 1e-3);
    assert!(num(&r[1][8]) > 0.9 && num(&r[1][8]) < 1.0);
    assert_eq!(r[1][9], "true");
}

#[test]
fn precedence_flags_over_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "system.lambda = 0.05\nsystem.rho = 0.4\nthresholds.theta = 2mW\n").unwrap();
    let out = dir.path().join("o");
    let o = siet(&out, &["eeh", "--config", conf.to_str().unwrap(), "--lambda", "0.02"]);
    assert!(o.status.success());
    let eff = read(&out, "effective.conf");
    assert!(eff.contains("system.lambda = 0.02\n"));
    assert!(eff.contains("system.rho = 0.4\n"));
    assert!(eff.contains("thresholds.theta = 0.002\n"));
    assert!(eff.contains("system.epsilon = 0.3\n"));
}

#[test]
fn effective_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let args = [
        "montecarlo",
        "--trials",
        "3000",
        "--seed",
        "99",
        "--alpha",
        "3.5",
        "--theta",
        "1mW,40uW",
        "--T",
        "0.5,2",
        "--rho",
        "0.25",
    ];
    assert!(siet(&first, &args).status.success());
    let eff = first.join("effective.conf");
    let o = Command::new(env!("CARGO_BIN_EXE_siet"))
        .args(["--config", eff.to_str().unwrap(), "--out", second.to_str().unwrap(), "montecarlo"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(read(&first, "montecarlo.csv"), read(&second, "montecarlo.csv"));
    let a = read(&first, "effective.conf").replace(first.to_str().unwrap(), "");
    let b = read(&second, "effective.conf").replace(second.to_str().unwrap(), "");
    assert_eq!(a, b);
}
