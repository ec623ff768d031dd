use std::fs;
use std::process::{Command, Output};

use fpb_cli::{curves_csv, parse_config, povm_report, Measure, SweepSpec, CURVES_HEADER};

fn fpb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpb")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn curves_are_deterministic_and_ordered() {
    let args = ["curves", "--steps", "7", "--xi", "0", "--xi", "0.5", "--order", "2", "--order", "inf", "--measure", "v1"];
    let a = fpb(&args);
    let b = fpb(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CURVES_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7 * 2 * 2);
    assert_eq!(&rows[0][1..4], ["0.0000000000000000e0", "v1", "2"]);
    assert_eq!(&rows[1][1..4], ["0.0000000000000000e0", "v1", "inf"]);
    assert_eq!(&rows[2][1..4], ["5.0000000000000000e-1", "v1", "2"]);
    // 17 significant digits
    let mantissa = rows[0][4].split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
}

#[test]
fn conclusive_rows_of_v1_equal_std() {
    let spec = SweepSpec {
        xi_values: vec![0.0],
        measures: vec![Measure::Std, Measure::V1],
        steps: 40,
        ..SweepSpec::default_curves()
    };
    let csv = curves_csv(&spec).unwrap();
    let vals: Vec<f64> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    for pair in vals.chunks(2) {
        assert!((pair[0] - pair[1]).abs() < 1e-10);
    }
}

#[test]
fn p_correct_measure_is_a_probability() {
    let spec = SweepSpec { measures: vec![Measure::PCorrect], steps: 20, ..SweepSpec::default_curves() };
    for line in curves_csv(&spec).unwrap().lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[2], "p_correct");
        let v: f64 = f[4].parse().unwrap();
        assert!((0.5..=1.0).contains(&v), "{line}");
    }
}

#[test]
fn argument_errors_exit_with_two() {
    assert_eq!(fpb(&["curves", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(fpb(&["curves", "--p-e-max", "0.5"]).status.code(), Some(2));
    assert_eq!(fpb(&["curves", "--xi", "1.5"]).status.code(), Some(2));
    assert_eq!(fpb(&["curves", "--measure", "v2", "--order", "inf"]).status.code(), Some(2));
    assert_eq!(fpb(&["curves", "--order", "-1"]).status.code(), Some(2));
    assert_eq!(fpb(&["bounds", "--variable", "p-e", "--xi", "0", "--xi", "1"]).status.code(), Some(2));
    assert_eq!(fpb(&["povm"]).status.code(), Some(2));
    assert_eq!(fpb(&["povm", "--theta", "1.0"]).status.code(), Some(2));
    assert_eq!(fpb(&["simulate", "--p-e", "0.4"]).status.code(), Some(2));
    assert_eq!(fpb(&["nonsense"]).status.code(), Some(2));
    let o = fpb(&["curves", "--steps", "1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("steps"));
    assert_eq!(fpb(&["--help"]).status.code(), Some(0));
}

#[test]
fn io_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("out.csv");
    assert_eq!(fpb(&["bounds", "--out", bad.to_str().unwrap()]).status.code(), Some(3));
    let cfg = dir.path().join("absent.cfg");
    assert_eq!(fpb(&["--config", cfg.to_str().unwrap(), "bounds"]).status.code(), Some(3));
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("curves.csv");
    fs::write(
        &cfg,
        format!("# sweep\nsteps = 4\nxi = 0, 1\nmeasure = std\np-e-max = 0.2\nout = {}\n", out.display()),
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(fpb(&["--config", c, "curves"]).status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 2);
    assert!(text.lines().last().unwrap().starts_with("2.0000000000000001e-1,"));

    // flags win over the config file; "-" is standard output
    let o = fpb(&["--config", c, "curves", "--steps", "3", "--out", "-"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 3 * 2);

    fs::write(&cfg, "steps: 4\n").unwrap();
    assert_eq!(fpb(&["--config", c, "curves"]).status.code(), Some(2));
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(fpb(&["--config", c, "curves"]).status.code(), Some(2));
}

#[test]
fn config_parser_handles_comments_and_overrides() {
    let m = parse_config("# c\n\n seed = 7 \nseed=9\nrounds = 10\n").unwrap();
    assert_eq!(m["seed"], "9");
    assert_eq!(m["rounds"], "10");
    assert!(parse_config("seed\n").is_err());
}

#[test]
fn bounds_default_grid_contains_knots() {
    let o = fpb(&["bounds"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 501);
    assert!(text.contains("\n2.0000000000000001e-1,"));
    assert!(text.contains("\n5.0000000000000000e-1,"));
    assert!(!text.contains('\r'));
}

#[test]
fn simulate_report_is_reproducible() {
    let args = ["simulate", "--rounds", "20000", "--seed", "123456789", "--p-e", "0.2", "--xi", "0.25"];
    let a = fpb(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, fpb(&args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 123456789u64);
    assert_eq!(v["config"]["rounds"], 20000u64);
    assert_eq!(v["joint"].as_array().unwrap().len(), 6);
    let analytic = v["mutual_information_analytic"].as_f64().unwrap();
    let theta = fpb_core::probe::theta_from_error_rate(&fpb_core::probe::ProbeConfig::new(0.2).unwrap());
    let q = fpb_core::discrimination::outcome_probs(
        &fpb_core::discrimination::DiscriminationConfig::from_xi(theta, 0.25).unwrap(),
    );
    assert_eq!(analytic, fpb_core::entropy::closed_form_i_std(&q));
}

#[test]
fn povm_report_matches_library() {
    let helstrom = povm_report(0.3, 1.0).unwrap();
    assert!(helstrom.m_inconclusive.iter().flatten().all(|z| z == &[0.0, 0.0]));
    assert_eq!(helstrom.q_inconclusive, 0.0);
    let r = povm_report(0.3, 0.4).unwrap();
    assert!(r.completeness_residual < 1e-10);
    assert!((r.q_error - r.error_lower_bound).abs() < 1e-10);
    let o = fpb(&["povm", "--theta", "0.3", "--xi", "0.4"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["q_success"].as_f64().unwrap(), r.q_success);
}
