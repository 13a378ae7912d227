use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use magnus_lab::harness::{run_experiment, ExperimentConfig, ExperimentKind};

/// Monte Carlo comparison of truncated stochastic Magnus expansions with Euler–Maruyama.
#[derive(Debug, Parser)]
#[command(name = "magnus-lab", version)]
struct Cli {
    /// sde-const, sde-triangular, sde-triangular-normalized, spde-heat or moments
    experiment: ExperimentKind,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    dt_euler: Option<f64>,
    #[arg(long)]
    dt_magnus: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated Magnus orders, e.g. 1,2,3
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
    /// Interior grid points of the SPDE discretisation
    #[arg(long)]
    d: Option<usize>,
    /// SPDE interval as LO:HI
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    domain: Option<[f64; 2]>,
    /// Diffusivity of the stochastic heat equation
    #[arg(long)]
    a: Option<f64>,
    /// Noise intensity of the stochastic heat equation
    #[arg(long)]
    sigma: Option<f64>,
    /// Central rows entering the SPDE error (default d/2)
    #[arg(long)]
    kappa: Option<usize>,
    /// TOML file describing a general SPDE problem
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Comma-separated report times
    #[arg(long, value_delimiter = ',')]
    report_times: Option<Vec<f64>>,
    /// Comma-separated steps of additional, coarser Euler runs
    #[arg(long, value_delimiter = ',')]
    extra_euler_dt: Option<Vec<f64>>,
    /// Constant case without drift, compared with its explicit solution
    #[arg(long)]
    zero_drift: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the first Brownian paths to OUT/paths
    #[arg(long)]
    dump_paths: bool,
}

fn parse_domain(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}"));
    Ok([parse(lo)?, parse(hi)?])
}

impl Cli {
    fn into_config(self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(self.experiment);
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(
            t_final => cfg.t_final,
            dt_euler => cfg.dt_euler,
            dt_magnus => cfg.dt_magnus,
            samples => cfg.samples,
            seed => cfg.seed,
            orders => cfg.orders,
            report_times => cfg.report_times,
            extra_euler_dt => cfg.extra_euler_dts,
            d => cfg.spde.d,
            domain => cfg.spde.domain,
            a => cfg.spde.a,
            sigma => cfg.spde.sigma,
        );
        cfg.spde.kappa = self.kappa;
        cfg.spde.problem = self.problem;
        cfg.zero_drift = self.zero_drift;
        cfg.output_dir = self.out;
        cfg.threads = self.threads;
        cfg.dump_paths = self.dump_paths;
        cfg
    }
}

fn main() -> ExitCode {
    let cfg = Cli::parse().into_config();
    match run_experiment(&cfg) {
        Ok(outcome) => {
            for s in &outcome.errors {
                println!("{:<14} t={:<6} E[Err] = {:.4}%", s.method, s.t, s.mean_percent());
            }
            println!("results written to {}", cfg.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("magnus-lab: {e}");
            ExitCode::FAILURE
        }
    }
}
