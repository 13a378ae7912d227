use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{relative_error, running_err, timing_split, MethodTimer};
use super::{
    constant_benchmark, triangular_diffusion, triangular_norm, ErrorStats, ExperimentConfig,
    ExperimentKind, TimingReport, DUMPED_PATHS,
};
use crate::error::{Error, Result};
use crate::magnus::{
    assemble, recursion_terms, terms_const_at, terms_general, terms_triangular, Coefficient,
    LinearSde, MagnusConfig, MagnusTerms,
};
use crate::matkit::Matrix;
use crate::randpath::{path_integrals, sample_brownian, subsample, BrownianPath, TimeGrid};
use crate::refsolve::{
    euler_maruyama, exact_const_diffusion, exact_triangular, exact_upper_triangular, EulerConfig,
};
use crate::spdegrid::{
    discretize, fundamental_integral_matrix, spde_error, DiscretizedSystem, Mesh, SpdeProblem,
};

/// Everything an experiment produces, before it is written to disk.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub errors: Vec<ErrorStats>,
    pub timings: Vec<TimingReport>,
    /// Element-wise moments at the last report time (moments experiment only).
    pub moments: Vec<MomentRow>,
}

impl ExperimentOutcome {
    pub fn stats(&self, method: &str, t: f64) -> Option<&ErrorStats> {
        self.errors
            .iter()
            .find(|s| s.method == method && (s.t - t).abs() < 1e-12)
    }

    pub fn timing(&self, method: &str) -> Option<&TimingReport> {
        self.timings.iter().find(|r| r.method == method)
    }

    /// `E[(X_t)_{ij}^k]` for one method, indices 1-based.
    pub fn moment(&self, method: &str, k: u32, i: usize, j: usize) -> Option<f64> {
        self.moments
            .iter()
            .find(|m| m.method == method && m.k == k && m.i == i && m.j == j)
            .map(|m| m.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub method: String,
    pub k: u32,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

enum Problem {
    Const { a: Matrix, b: Matrix, sde: LinearSde },
    Triangular { sde: LinearSde },
    Normalized { sde: LinearSde },
    Spde { system: DiscretizedSystem, heat: Option<(f64, f64)>, kappa: usize },
}

impl Problem {
    fn sde(&self) -> &LinearSde {
        match self {
            Problem::Const { sde, .. } | Problem::Triangular { sde } | Problem::Normalized { sde } => sde,
            Problem::Spde { system, .. } => &system.sde,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Reference {
    Euler,
    ExactConst,
    ExactTriangular,
    ExactNormalized,
    HeatKernel,
}

#[derive(Debug, Clone)]
enum Method {
    Magnus(usize),
    Euler { dt: f64 },
}

struct Plan {
    fine: TimeGrid,
    magnus: TimeGrid,
    stride: usize,
    report_idx: Vec<usize>,
    eval_idx: Vec<usize>,
    time_averaged: bool,
    reference: Reference,
    methods: Vec<(String, Method)>,
    problem: Problem,
}

fn euler_label(cfg: &ExperimentConfig, dt: f64) -> String {
    if dt == cfg.dt_euler {
        "euler".to_string()
    } else {
        format!("euler_dt{dt}")
    }
}

fn normalized_sde() -> Result<LinearSde> {
    LinearSde::new(
        2,
        Coefficient::Constant(Matrix::zeros(2)),
        vec![Coefficient::time_dependent(|t| {
            triangular_diffusion(t).scaled(1.0 / triangular_norm(t))
        })],
    )
}

fn build_problem(cfg: &ExperimentConfig) -> Result<Problem> {
    Ok(match cfg.experiment {
        ExperimentKind::SdeConst | ExperimentKind::Moments => {
            let (a, mut b) = constant_benchmark();
            if cfg.zero_drift {
                b = Matrix::zeros(2);
            }
            let sde = LinearSde::constant(b.clone(), a.clone())?;
            Problem::Const { a, b, sde }
        }
        ExperimentKind::SdeTriangular => Problem::Triangular {
            sde: LinearSde::new(
                2,
                Coefficient::Constant(Matrix::zeros(2)),
                vec![Coefficient::time_dependent(triangular_diffusion)],
            )?,
        },
        ExperimentKind::SdeTriangularNormalized => Problem::Normalized { sde: normalized_sde()? },
        ExperimentKind::SpdeHeat => {
            let s = &cfg.spde;
            let problem = match &s.problem {
                Some(file) => SpdeProblem::from_toml_file(file)?,
                None => SpdeProblem::heat(s.a, s.sigma, Mesh::new(s.domain[0], s.domain[1], s.d)?),
            };
            let kappa = cfg.spde.kappa.unwrap_or(problem.mesh.d() / 2);
            if kappa == 0 || kappa > problem.mesh.d() {
                return Err(Error::Config(format!("kappa {kappa} out of range")));
            }
            Problem::Spde {
                heat: problem.heat_parameters(),
                system: discretize(&problem)?,
                kappa,
            }
        }
    })
}

fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    cfg.validate()?;
    let fine = cfg.fine_grid()?;
    let magnus = cfg.magnus_grid()?;
    let stride = fine.stride_to(&magnus)?;
    let mut report_idx: Vec<usize> = cfg
        .report_times
        .iter()
        .map(|&t| magnus.index_of(t).expect("validated"))
        .collect();
    report_idx.sort_unstable();
    report_idx.dedup();
    let time_averaged = cfg.experiment.time_averaged();
    let horizon = *report_idx.last().expect("validated");
    let eval_idx = if time_averaged {
        (0..=horizon).collect()
    } else {
        report_idx.clone()
    };

    let problem = build_problem(cfg)?;
    let reference = match &problem {
        Problem::Const { .. } if cfg.zero_drift => Reference::ExactConst,
        Problem::Const { .. } => Reference::Euler,
        Problem::Triangular { .. } => Reference::ExactTriangular,
        Problem::Normalized { .. } => Reference::ExactNormalized,
        Problem::Spde { heat: Some(_), .. } => Reference::HeatKernel,
        Problem::Spde { heat: None, .. } => Reference::Euler,
    };

    let mut methods = Vec::new();
    if reference != Reference::Euler {
        methods.push(("euler".to_string(), Method::Euler { dt: cfg.dt_euler }));
    }
    for &dt in &cfg.extra_euler_dts {
        methods.push((euler_label(cfg, dt), Method::Euler { dt }));
    }
    let mut orders = cfg.orders.clone();
    orders.sort_unstable();
    orders.dedup();
    for n in orders {
        methods.push((format!("m{n}"), Method::Magnus(n)));
    }
    Ok(Plan {
        fine,
        magnus,
        stride,
        report_idx,
        eval_idx,
        time_averaged,
        reference,
        methods,
        problem,
    })
}

struct SampleOutput {
    // errors[m][r]: method m at report time r
    errors: Vec<Vec<f64>>,
    // one timer per method, then one for an Euler reference
    timers: Vec<MethodTimer>,
    // X at the last report time: reference first, then each method
    terminal: Vec<Matrix>,
}

fn magnus_terms(plan: &Plan, path: &BrownianPath, max_order: usize) -> Result<MagnusTerms> {
    let ints = || path_integrals(path);
    match &plan.problem {
        Problem::Const { a, b, .. } => terms_const_at(a, b, path, &ints(), &plan.eval_idx),
        Problem::Triangular { .. } => terms_triangular(path, &ints()),
        Problem::Normalized { sde } => recursion_terms(sde, path, max_order),
        Problem::Spde { system, .. } => {
            if system.sde.is_constant() {
                let (drift, diffusion) = system.generators(0.0)?;
                terms_const_at(&diffusion, &drift, path, &ints(), &plan.eval_idx)
            } else if max_order <= 2 {
                terms_general(&system.sde, path, max_order)
            } else {
                recursion_terms(&system.sde, path, max_order)
            }
        }
    }
}

fn run_euler(plan: &Plan, fine_path: &BrownianPath, dt: f64) -> Result<Vec<Matrix>> {
    let grid = TimeGrid::with_step(plan.fine.t_final(), dt)?;
    let sub = plan.fine.stride_to(&grid)?;
    let per_magnus = grid.stride_to(&plan.magnus)?;
    let owned;
    let path = if sub == 1 {
        fine_path
    } else {
        owned = subsample(fine_path, sub)?;
        &owned
    };
    let out: Vec<usize> = plan.eval_idx.iter().map(|&k| k * per_magnus).collect();
    euler_maruyama(plan.problem.sde(), path, &EulerConfig::new(grid, out)?)
}

fn pick(traj: &[Matrix], idx: &[usize], stride: usize) -> Vec<Matrix> {
    idx.iter().map(|&k| traj[k * stride].clone()).collect()
}

fn reference_trajectory(
    plan: &Plan,
    fine_path: &BrownianPath,
    magnus_path: &BrownianPath,
    timer: &mut MethodTimer,
) -> Result<Vec<Matrix>> {
    match plan.reference {
        Reference::Euler => {
            let start = Instant::now();
            let out = run_euler(plan, fine_path, plan.fine.dt())?;
            timer.total += start.elapsed();
            Ok(out)
        }
        Reference::ExactConst => {
            let Problem::Const { a, .. } = &plan.problem else { unreachable!() };
            exact_const_diffusion(a, magnus_path, &plan.eval_idx)
        }
        Reference::ExactTriangular => {
            Ok(pick(&exact_triangular(fine_path)?, &plan.eval_idx, plan.stride))
        }
        Reference::ExactNormalized => {
            let traj = exact_upper_triangular(
                |t| 2.0 / triangular_norm(t),
                |t| t / triangular_norm(t),
                |t| -1.0 / triangular_norm(t),
                fine_path,
            )?;
            Ok(pick(&traj, &plan.eval_idx, plan.stride))
        }
        Reference::HeatKernel => {
            let Problem::Spde { system, heat: Some((a, sigma)), .. } = &plan.problem else {
                unreachable!()
            };
            plan.eval_idx
                .iter()
                .map(|&k| {
                    let t = plan.magnus.time(k);
                    fundamental_integral_matrix(*a, *sigma, t, magnus_path.value(0, k), &system.mesh)
                })
                .collect()
        }
    }
}

fn errors_at_reports(plan: &Plan, reference: &[Matrix], approx: &[Matrix]) -> Result<Vec<f64>> {
    if plan.time_averaged {
        let rel: Vec<f64> = reference
            .iter()
            .zip(approx)
            .map(|(r, a)| relative_error(r, a))
            .collect();
        let running = running_err(&rel);
        // eval_idx is 0..=horizon, so positions coincide with grid indices
        Ok(plan.report_idx.iter().map(|&k| running[k]).collect())
    } else {
        // eval_idx equals report_idx
        reference
            .iter()
            .zip(approx)
            .map(|(r, a)| match &plan.problem {
                Problem::Spde { kappa, .. } => spde_error(a, r, *kappa),
                _ => Ok(relative_error(r, a)),
            })
            .collect()
    }
}

fn run_sample(cfg: &ExperimentConfig, plan: &Plan, index: u64) -> Result<SampleOutput> {
    let fine_path = sample_brownian(plan.fine, 1, cfg.seed, index);
    let magnus_path = subsample(&fine_path, plan.stride)?;
    let mut timers = vec![MethodTimer::default(); plan.methods.len() + 1];
    let reference = reference_trajectory(plan, &fine_path, &magnus_path, &mut timers[plan.methods.len()])?;

    let max_order = plan
        .methods
        .iter()
        .filter_map(|(_, m)| match m {
            Method::Magnus(n) => Some(*n),
            Method::Euler { .. } => None,
        })
        .max();
    let mut terms = None;
    let mut log_time = Default::default();
    if let Some(order) = max_order {
        let start = Instant::now();
        terms = Some(magnus_terms(plan, &magnus_path, order)?);
        log_time = start.elapsed();
    }

    let mut errors = Vec::with_capacity(plan.methods.len());
    let mut terminal = vec![reference.last().expect("nonempty").clone()];
    for (m, (_, method)) in plan.methods.iter().enumerate() {
        let approx = match method {
            Method::Magnus(n) => {
                let terms = terms.as_ref().expect("built above");
                let start = Instant::now();
                let xs = assemble(terms, &MagnusConfig::new(*n, plan.magnus, plan.eval_idx.clone())?)?;
                let expm = start.elapsed();
                timers[m] = MethodTimer {
                    logarithm: log_time,
                    exponential: expm,
                    total: log_time + expm,
                };
                xs
            }
            Method::Euler { dt } => {
                let start = Instant::now();
                let xs = run_euler(plan, &fine_path, *dt)?;
                timers[m].total = start.elapsed();
                xs
            }
        };
        errors.push(errors_at_reports(plan, &reference, &approx)?);
        terminal.push(approx.last().expect("nonempty").clone());
    }
    Ok(SampleOutput {
        errors,
        timers,
        terminal,
    })
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every sample of the experiment and reduces the results in sample order.
pub fn simulate(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let plan = plan(cfg)?;
    let outputs: Vec<SampleOutput> = with_pool(cfg.threads, || {
        (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| run_sample(cfg, &plan, i))
            .collect::<Result<Vec<_>>>()
    })??;

    let mut errors = Vec::new();
    for (m, (label, _)) in plan.methods.iter().enumerate() {
        for (r, &k) in plan.report_idx.iter().enumerate() {
            let samples = outputs.iter().map(|o| o.errors[m][r]).collect();
            errors.push(ErrorStats::new(label.clone(), plan.magnus.time(k), samples)?);
        }
    }

    let mut timings = Vec::new();
    if plan.reference == Reference::Euler {
        timings.push(reduce_timer(&outputs, plan.methods.len(), "euler"));
    }
    for (m, (label, _)) in plan.methods.iter().enumerate() {
        timings.push(reduce_timer(&outputs, m, label));
    }

    let mut moments = Vec::new();
    if cfg.experiment == ExperimentKind::Moments {
        let ref_label = match plan.reference {
            Reference::Euler => "euler".to_string(),
            _ => "exact".to_string(),
        };
        let all_labels =
            std::iter::once(ref_label).chain(plan.methods.iter().map(|(l, _)| l.clone()));
        for (slot, label) in all_labels.enumerate() {
            let d = outputs[0].terminal[slot].dim();
            for k in 1..=3u32 {
                for i in 0..d {
                    for j in 0..d {
                        let sum: f64 = outputs
                            .iter()
                            .map(|o| o.terminal[slot][(i, j)].powi(k as i32))
                            .sum();
                        moments.push(MomentRow {
                            method: label.clone(),
                            k,
                            i: i + 1,
                            j: j + 1,
                            value: sum / outputs.len() as f64,
                        });
                    }
                }
            }
        }
    }
    Ok(ExperimentOutcome {
        errors,
        timings,
        moments,
    })
}

fn reduce_timer(outputs: &[SampleOutput], slot: usize, label: &str) -> TimingReport {
    let mut acc = MethodTimer::default();
    for o in outputs {
        acc += o.timers[slot];
    }
    timing_split(label, &acc)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(dir.join(name))?))
}

/// Writes `errors.csv`, the CDF files, `timings.csv`, `config.json` and, when present, `moments.csv`.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &ExperimentOutcome) -> Result<()> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;

    let mut f = create(dir, "errors.csv")?;
    writeln!(f, "method,t,mean_err_percent,n_samples")?;
    for s in &outcome.errors {
        writeln!(f, "{},{},{:e},{}", s.method, s.t, s.mean_percent(), s.samples.len())?;
    }
    f.flush()?;

    for s in &outcome.errors {
        let mut f = create(dir, &format!("cdf_{}_t{}.csv", s.method, s.t))?;
        writeln!(f, "err,cum_prob")?;
        for (e, p) in s.cdf() {
            writeln!(f, "{e:e},{p}")?;
        }
        f.flush()?;
    }

    let mut f = create(dir, "timings.csv")?;
    writeln!(f, "method,log_s,expm_s,total_s")?;
    for r in &outcome.timings {
        writeln!(f, "{},{},{},{}", r.method, r.log_s, r.expm_s, r.total_s)?;
    }
    f.flush()?;

    if !outcome.moments.is_empty() {
        let mut f = create(dir, "moments.csv")?;
        writeln!(f, "method,k,i,j,value")?;
        for m in &outcome.moments {
            writeln!(f, "{},{},{},{},{}", m.method, m.k, m.i, m.j, m.value)?;
        }
        f.flush()?;
    }

    let json = serde_json::to_string_pretty(cfg).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(dir.join("config.json"), json + "\n")?;

    if cfg.dump_paths {
        let paths = dir.join("paths");
        fs::create_dir_all(&paths)?;
        let fine = cfg.fine_grid()?;
        for i in 0..cfg.samples.min(DUMPED_PATHS) as u64 {
            let path = sample_brownian(fine, 1, cfg.seed, i);
            path.write_csv(create(&paths, &format!("path_{i}.csv"))?)?;
        }
    }
    Ok(())
}

/// [`simulate`] followed by [`write_outputs`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let outcome = simulate(cfg)?;
    write_outputs(cfg, &outcome)?;
    Ok(outcome)
}
