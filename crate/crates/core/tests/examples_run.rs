//! Every example runs to completion and produces sensible numbers.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(matrix_exp_log, "matrix_exp_log.rs");
example!(lie_operators, "lie_operators.rs");
example!(brownian_paths, "brownian_paths.rs");
example!(magnus_const, "magnus_const.rs");
example!(magnus_triangular, "magnus_triangular.rs");
example!(recursion_general, "recursion_general.rs");
example!(euler_reference, "euler_reference.rs");
example!(spde_heat, "spde_heat.rs");
example!(tau_monitor, "tau_monitor.rs");
example!(experiment_harness, "experiment_harness.rs");

#[test]
fn exp_log_round_trip() {
    assert!(matrix_exp_log::run_example().unwrap() < 1e-12);
}

#[test]
fn lie_identities() {
    assert!(lie_operators::run_example().unwrap() < 1e-12);
}

#[test]
fn ito_formula_on_a_path() {
    // the quadratic-variation error is O(√dt) with dt = 1e-4
    assert!(brownian_paths::run_example().unwrap() < 0.05);
}

#[test]
fn constant_orders_improve() {
    let e = magnus_const::run_example().unwrap();
    assert!(e[2] < e[0] && e[1] < e[0], "{e:?}");
    assert!(e[2] < 0.02);
}

#[test]
fn triangular_orders_improve() {
    let e = magnus_triangular::run_example().unwrap();
    assert!(e[2] < e[1] && e[1] < e[0], "{e:?}");
}

#[test]
fn recursion_is_accurate() {
    assert!(recursion_general::run_example().unwrap() < 0.01);
}

#[test]
fn euler_error_shrinks() {
    let e = euler_reference::run_example().unwrap();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
}

#[test]
fn heat_equation_error_is_small() {
    assert!(spde_heat::run_example().unwrap() < 0.08);
}

#[test]
fn exit_probability_is_a_probability() {
    let p = tau_monitor::run_example().unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn harness_writes_reports() {
    let dir = experiment_harness::run_example().unwrap();
    for f in ["errors.csv", "timings.csv", "config.json", "cdf_m3_t1.csv"] {
        assert!(dir.join(f).exists(), "{f}");
    }
}
