// Running a small Monte Carlo experiment and writing the CSV reports.
use magnus_lab::harness::{run_experiment, ExperimentConfig, ExperimentKind};

pub fn run_example() -> magnus_lab::Result<std::path::PathBuf> {
    let mut cfg = ExperimentConfig::defaults(ExperimentKind::SdeConst);
    cfg.samples = 20;
    cfg.t_final = 1.0;
    cfg.report_times = vec![0.5, 1.0];
    cfg.output_dir = std::env::temp_dir().join("magnus-lab-example");
    let outcome = run_experiment(&cfg)?;
    for s in &outcome.errors {
        println!("{:<6} t = {:<4} mean error {:.4}%", s.method, s.t, s.mean_percent());
    }
    for t in &outcome.timings {
        println!("{:<6} log {:.4}s expm {:.4}s total {:.4}s", t.method, t.log_s, t.expm_s, t.total_s);
    }
    println!("reports in {}", cfg.output_dir.display());
    Ok(cfg.output_dir)
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
