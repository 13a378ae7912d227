//! Monte Carlo driver for the benchmark experiments.
//!
//! Every sample draws one Brownian path on the fine (Euler) grid. The Magnus
//! methods see its restriction to the coarse grid, and coarser Euler variants
//! see their own restrictions, so all methods within a sample are driven by
//! the same noise. Per-sample results are collected in sample order, which
//! keeps every statistic independent of the thread count.

mod run;
mod stats;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::Matrix;
use crate::randpath::TimeGrid;

pub use run::{run_experiment, simulate, write_outputs, ExperimentOutcome, MomentRow};
pub use stats::{
    empirical_cdf, err_t, relative_error, running_err, timing_split, ErrorStats, MethodTimer,
    TimingReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Constant `A`, `B` with Euler as reference.
    SdeConst,
    /// `A_t = [[2, t], [0, -1]]`, `B = 0` against its explicit solution.
    SdeTriangular,
    /// The triangular case divided by `‖A_t‖₂`, through the general recursion.
    SdeTriangularNormalized,
    /// Finite-difference stochastic heat equation against the Gaussian kernel.
    SpdeHeat,
    /// Element-wise moments of `X_1` for the constant case.
    Moments,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::SdeConst,
        ExperimentKind::SdeTriangular,
        ExperimentKind::SdeTriangularNormalized,
        ExperimentKind::SpdeHeat,
        ExperimentKind::Moments,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SdeConst => "sde-const",
            ExperimentKind::SdeTriangular => "sde-triangular",
            ExperimentKind::SdeTriangularNormalized => "sde-triangular-normalized",
            ExperimentKind::SpdeHeat => "spde-heat",
            ExperimentKind::Moments => "moments",
        }
    }

    /// Whether errors are averaged over `[0, t]` or taken at `t` alone.
    pub fn time_averaged(self) -> bool {
        !matches!(self, ExperimentKind::SpdeHeat | ExperimentKind::Moments)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Settings of the SPDE experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpdeSettings {
    pub d: usize,
    pub domain: [f64; 2],
    pub a: f64,
    pub sigma: f64,
    /// Central rows in the error; `⌊d/2⌋` when absent.
    pub kappa: Option<usize>,
    /// TOML problem file replacing the heat equation; Euler becomes the reference.
    pub problem: Option<PathBuf>,
}

impl Default for SpdeSettings {
    fn default() -> Self {
        Self {
            d: 100,
            domain: [-2.0, 2.0],
            a: 0.2,
            sigma: 0.15,
            kappa: None,
            problem: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub t_final: f64,
    pub dt_euler: f64,
    pub dt_magnus: f64,
    pub samples: usize,
    pub seed: u64,
    pub orders: Vec<usize>,
    pub report_times: Vec<f64>,
    /// Additional Euler runs on coarser grids, driven by restrictions of the same path.
    pub extra_euler_dts: Vec<f64>,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
    /// Write the Brownian paths of the first samples to `paths/`.
    pub dump_paths: bool,
    /// Constant case only: drop the drift so the explicit solution is the reference.
    pub zero_drift: bool,
    pub spde: SpdeSettings,
}

/// Samples whose paths are written by `dump_paths`.
pub const DUMPED_PATHS: usize = 10;

impl ExperimentConfig {
    /// Defaults reproducing the published setting of each experiment.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let sde_times = vec![0.25, 0.5, 0.75, 1.0, 2.0, 3.0];
        let base = Self {
            experiment,
            t_final: 3.0,
            dt_euler: 1e-4,
            dt_magnus: 1e-2,
            samples: 1000,
            seed: 2024,
            orders: vec![1, 2, 3],
            report_times: sde_times.clone(),
            extra_euler_dts: Vec::new(),
            output_dir: PathBuf::from("out"),
            threads: None,
            dump_paths: false,
            zero_drift: false,
            spde: SpdeSettings::default(),
        };
        match experiment {
            ExperimentKind::SdeConst => base,
            ExperimentKind::SdeTriangular => Self {
                extra_euler_dts: vec![1e-3],
                ..base
            },
            ExperimentKind::SdeTriangularNormalized => Self {
                t_final: 10.0,
                report_times: vec![0.25, 0.5, 0.75, 1.0, 2.0, 3.0, 10.0],
                extra_euler_dts: vec![1e-3],
                ..base
            },
            ExperimentKind::SpdeHeat => Self {
                t_final: 0.5,
                dt_magnus: 1e-4,
                samples: 50,
                orders: vec![1, 3],
                report_times: vec![0.1, 0.2, 0.3, 0.4, 0.5],
                ..base
            },
            ExperimentKind::Moments => Self {
                t_final: 1.0,
                report_times: vec![1.0],
                ..base
            },
        }
    }

    pub fn fine_grid(&self) -> Result<TimeGrid> {
        TimeGrid::with_step(self.t_final, self.dt_euler)
    }

    pub fn magnus_grid(&self) -> Result<TimeGrid> {
        TimeGrid::with_step(self.t_final, self.dt_magnus)
    }

    pub fn kappa(&self) -> usize {
        self.spde.kappa.unwrap_or(self.spde.d / 2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("need at least one sample".into()));
        }
        if self.orders.is_empty() || self.orders.iter().any(|n| !(1..=3).contains(n)) {
            return Err(Error::Config(format!(
                "orders must be a nonempty subset of 1,2,3, got {:?}",
                self.orders
            )));
        }
        let fine = self.fine_grid()?;
        let coarse = self.magnus_grid()?;
        fine.stride_to(&coarse)?;
        for &dt in &self.extra_euler_dts {
            let g = TimeGrid::with_step(self.t_final, dt)?;
            fine.stride_to(&g)?;
            g.stride_to(&coarse)?;
        }
        if self.report_times.is_empty() {
            return Err(Error::Config("no report times".into()));
        }
        for &t in &self.report_times {
            if !(t > 0.0) || coarse.index_of(t).is_none() {
                return Err(Error::Config(format!(
                    "report time {t} is not a positive point of the Magnus grid"
                )));
            }
        }
        if self.zero_drift && self.experiment != ExperimentKind::SdeConst {
            return Err(Error::Config("zero_drift applies to sde-const only".into()));
        }
        if self.experiment == ExperimentKind::SpdeHeat {
            let kappa = self.kappa();
            if kappa == 0 || kappa > self.spde.d {
                return Err(Error::Config(format!("kappa {kappa} out of range")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }
}

/// The constant diffusion and drift of the published constant-coefficient benchmark.
pub fn constant_benchmark() -> (Matrix, Matrix) {
    let a = Matrix::from_rows(&[[0.335302, -0.645492], [-0.264419, 0.634641]]).expect("2x2");
    let b = Matrix::from_rows(&[[-0.0572262, 0.0493763], [-0.665366, 0.742744]]).expect("2x2");
    (a, b)
}

/// `A_t = [[2, t], [0, -1]]`.
pub fn triangular_diffusion(t: f64) -> Matrix {
    Matrix::from_row_major(2, vec![2.0, t, 0.0, -1.0]).expect("2x2")
}

/// Closed-form spectral norm of [`triangular_diffusion`].
pub fn triangular_norm(t: f64) -> f64 {
    let t2 = t * t;
    (0.5 * (t2 + (t2 * t2 + 10.0 * t2 + 9.0).sqrt() + 5.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::spectral_norm;

    #[test]
    fn kinds_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
        assert!("sde".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn closed_form_norm() {
        for t in [0.0, 0.3, 1.0, 4.0, 10.0] {
            let exact = spectral_norm(&triangular_diffusion(t)).unwrap();
            assert!((triangular_norm(t) - exact).abs() < 1e-9 * exact, "t = {t}");
        }
        assert_eq!(triangular_norm(0.0), 2.0);
    }

    #[test]
    fn defaults_are_valid() {
        for k in ExperimentKind::ALL {
            ExperimentConfig::defaults(k).validate().unwrap();
        }
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::SdeConst);
        cfg.dt_magnus = 1.5e-4;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::SdeConst);
        cfg.report_times = vec![0.255];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::SdeConst);
        cfg.orders = vec![4];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::SdeTriangular);
        cfg.extra_euler_dts = vec![0.05];
        assert!(cfg.validate().is_err());
    }
}
