use std::fs;
use std::process::Command;

use magnus_lab::harness::{run_experiment, simulate, ExperimentConfig, ExperimentKind};
use magnus_lab::randpath::{sample_brownian, TimeGrid};
use magnus_lab::spdegrid::{solve_spde, Mesh, SpdeMethod, SpdeProblem};

fn small(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(kind);
    cfg.samples = 8;
    cfg.t_final = 0.5;
    cfg.report_times = vec![0.25, 0.5];
    cfg.dt_euler = 1e-3;
    cfg
}

#[test]
fn output_files_have_the_expected_headers() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(ExperimentKind::SdeConst);
    cfg.output_dir = dir.path().to_path_buf();
    cfg.dump_paths = true;
    let outcome = run_experiment(&cfg).unwrap();

    let errors = fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    let mut lines = errors.lines();
    assert_eq!(lines.next(), Some("method,t,mean_err_percent,n_samples"));
    // three Magnus orders at two times
    assert_eq!(lines.count(), 6);
    assert_eq!(outcome.errors.len(), 6);

    let cdf = fs::read_to_string(dir.path().join("cdf_m2_t0.5.csv")).unwrap();
    assert_eq!(cdf.lines().next(), Some("err,cum_prob"));
    assert_eq!(cdf.lines().count(), 1 + cfg.samples);
    let last: Vec<f64> = cdf.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[1], 1.0);

    let timings = fs::read_to_string(dir.path().join("timings.csv")).unwrap();
    assert_eq!(timings.lines().next(), Some("method,log_s,expm_s,total_s"));
    assert!(timings.lines().any(|l| l.starts_with("euler,")));

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(json["experiment"], "sde-const");
    assert_eq!(json["samples"], 8);
    assert!(dir.path().join("paths/path_0.csv").exists());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut one = small(ExperimentKind::SdeTriangular);
    one.extra_euler_dts.clear();
    one.threads = Some(1);
    let mut four = one.clone();
    four.threads = Some(4);
    let (a, b) = (simulate(&one).unwrap(), simulate(&four).unwrap());
    for (x, y) in a.errors.iter().zip(&b.errors) {
        assert_eq!(x.method, y.method);
        assert_eq!(x.samples, y.samples);
    }
}

#[test]
fn seeds_change_the_sample() {
    let cfg = small(ExperimentKind::SdeConst);
    let mut other = cfg.clone();
    other.seed += 1;
    let (a, b) = (simulate(&cfg).unwrap(), simulate(&other).unwrap());
    assert_ne!(a.errors[0].samples, b.errors[0].samples);
}

#[test]
fn invalid_configuration_is_rejected() {
    let mut cfg = small(ExperimentKind::SdeConst);
    cfg.report_times = vec![0.123];
    assert!(simulate(&cfg).is_err());
}

#[test]
fn cli_runs_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_magnus-lab"))
        .args(["moments", "--samples", "4", "--dt-euler", "1e-3", "--orders", "1,3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(dir.path().join("moments.csv").exists());
    let bad = Command::new(env!("CARGO_BIN_EXE_magnus-lab")).arg("nonsense").output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn spde_solution_is_linear_in_the_initial_data() {
    let mesh = Mesh::new(-2.0, 2.0, 20).unwrap();
    let problem = SpdeProblem::heat(0.2, 0.15, mesh.clone());
    let grid = TimeGrid::with_step(0.1, 1e-3).unwrap();
    let path = sample_brownian(grid, 1, 1, 0);
    let u: Vec<f64> = mesh.interior().iter().map(|x| (-x * x).exp()).collect();
    let v: Vec<f64> = mesh.interior().iter().map(|x| x.sin()).collect();
    let uv: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 2.0 * a - b).collect();
    for method in [SpdeMethod::Euler, SpdeMethod::Magnus(3)] {
        let su = solve_spde(&problem, &u, method, &path).unwrap();
        let sv = solve_spde(&problem, &v, method, &path).unwrap();
        let suv = solve_spde(&problem, &uv, method, &path).unwrap();
        let k = grid.n_steps();
        for i in 0..20 {
            assert!((suv[k][i] - (2.0 * su[k][i] - sv[k][i])).abs() < 1e-12);
        }
    }
}

#[test]
fn spde_methods_agree_without_noise() {
    // σ = 0: the Magnus logarithm is exactly A^d t, so order one is already exact
    let mesh = Mesh::new(-1.0, 1.0, 15).unwrap();
    let problem = SpdeProblem::heat(0.3, 0.0, mesh.clone());
    let grid = TimeGrid::with_step(0.2, 1e-4).unwrap();
    let path = sample_brownian(grid, 1, 9, 0);
    let u: Vec<f64> = mesh.interior().iter().map(|x| 1.0 - x * x).collect();
    let k = grid.n_steps();
    let m1 = solve_spde(&problem, &u, SpdeMethod::Magnus(1), &path).unwrap();
    let m3 = solve_spde(&problem, &u, SpdeMethod::Magnus(3), &path).unwrap();
    let eu = solve_spde(&problem, &u, SpdeMethod::Euler, &path).unwrap();
    for i in 0..15 {
        assert!((m1[k][i] - m3[k][i]).abs() < 1e-12);
        assert!((m1[k][i] - eu[k][i]).abs() < 1e-3);
    }
}

#[test]
fn documented_problem_file_parses() {
    let p = SpdeProblem::from_toml_str(
        r#"
domain = [-2.0, 2.0]
d = 100
a = { kind = "constant", value = 0.2 }
sigma = { kind = "polynomial", coeffs = [0.1, 0.0, 0.05] }
"#,
    )
    .unwrap();
    assert_eq!(p.mesh.d(), 100);
    assert!(p.heat_parameters().is_none());
    assert!((p.sigma.eval(0.0, 1.0) - 0.15).abs() < 1e-15);
}
