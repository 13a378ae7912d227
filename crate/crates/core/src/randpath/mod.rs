//! Seeded Brownian paths on uniform grids and left-point quadrature of path functionals.
//!
//! Paths are keyed by `(seed, sample_index)` through a ChaCha stream, so a
//! sample can be regenerated on any thread without replaying earlier ones.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Uniform grid `t_k = k * t_final / n_steps`, `k = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::Config(format!("t_final must be positive, got {t_final}")));
        }
        if n_steps == 0 {
            return Err(Error::Config("grid needs at least one step".into()));
        }
        Ok(Self { t_final, n_steps })
    }

    /// Grid on `[0, t_final]` with step `dt`; `dt` must divide `t_final`.
    pub fn with_step(t_final: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        let n = (t_final / dt).round();
        if n < 1.0 || ((n * dt) - t_final).abs() > 1e-9 * t_final.max(1.0) {
            return Err(Error::Config(format!(
                "step {dt} does not divide the horizon {t_final}"
            )));
        }
        Self::new(t_final, n as usize)
    }

    #[inline]
    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t_final * k as f64 / self.n_steps as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(move |k| self.time(k))
    }

    /// Index of the grid point at time `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = (t / self.dt()).round();
        if k < 0.0 || k > self.n_steps as f64 {
            return None;
        }
        let k = k as usize;
        ((self.time(k) - t).abs() <= 1e-9 * self.t_final.max(1.0)).then_some(k)
    }

    /// Ratio `coarse.dt / self.dt` when the coarse grid is nested in this one.
    pub fn stride_to(&self, coarse: &TimeGrid) -> Result<usize> {
        let ratio = coarse.dt() / self.dt();
        let stride = ratio.round();
        if stride < 1.0 || (ratio - stride).abs() > 1e-9 * ratio {
            return Err(Error::Config(format!(
                "grid step {} is not an integer multiple of {}",
                coarse.dt(),
                self.dt()
            )));
        }
        if self.n_steps % stride as usize != 0 {
            return Err(Error::Config("coarse grid does not cover the same horizon".into()));
        }
        Ok(stride as usize)
    }
}

/// A `q`-channel Brownian trajectory sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    grid: TimeGrid,
    values: Vec<Vec<f64>>,
    seed: u64,
    sample_index: u64,
}

impl BrownianPath {
    /// Wraps explicit channel values, e.g. a deterministic test path.
    ///
    /// Every channel must have `n_steps + 1` entries and start at zero.
    pub fn from_values(grid: TimeGrid, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("a path needs at least one channel".into()));
        }
        for ch in &values {
            if ch.len() != grid.n_steps() + 1 {
                return Err(Error::LengthMismatch {
                    expected: grid.n_steps() + 1,
                    got: ch.len(),
                });
            }
            if ch[0] != 0.0 {
                return Err(Error::Domain("path must start at zero".into()));
            }
        }
        Ok(Self {
            grid,
            values,
            seed: 0,
            sample_index: 0,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.values.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample_index(&self) -> u64 {
        self.sample_index
    }

    /// `W^j` on the grid.
    pub fn channel(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    #[inline]
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[j][k]
    }

    /// `W^j_{t_{k+1}} - W^j_{t_k}`
    #[inline]
    pub fn increment(&self, j: usize, k: usize) -> f64 {
        self.values[j][k + 1] - self.values[j][k]
    }

    /// CSV dump with columns `k,t,W1..Wq`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "k,t")?;
        for j in 0..self.channels() {
            write!(out, ",W{}", j + 1)?;
        }
        writeln!(out)?;
        for k in 0..=self.grid.n_steps() {
            write!(out, "{},{}", k, self.grid.time(k))?;
            for j in 0..self.channels() {
                write!(out, ",{}", self.values[j][k])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Draws a `q`-channel path whose increments are independent `N(0, dt)`.
///
/// The output depends only on `(grid, q, seed, sample_index)`.
pub fn sample_brownian(grid: TimeGrid, q: usize, seed: u64, sample_index: u64) -> BrownianPath {
    assert!(q >= 1, "need at least one Brownian channel");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    let n = grid.n_steps();
    let sqrt_dt = grid.dt().sqrt();
    let mut values = vec![vec![0.0; n + 1]; q];
    for k in 0..n {
        for ch in values.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            ch[k + 1] = ch[k] + sqrt_dt * z;
        }
    }
    BrownianPath {
        grid,
        values,
        seed,
        sample_index,
    }
}

/// Restriction of `path` to every `stride`-th grid point.
pub fn subsample(path: &BrownianPath, stride: usize) -> Result<BrownianPath> {
    let n = path.grid.n_steps();
    if stride == 0 || n % stride != 0 {
        return Err(Error::Config(format!(
            "stride {stride} does not divide {n} steps"
        )));
    }
    let grid = TimeGrid::new(path.grid.t_final(), n / stride)?;
    let values = path
        .values
        .iter()
        .map(|ch| ch.iter().step_by(stride).copied().collect())
        .collect();
    Ok(BrownianPath {
        grid,
        values,
        seed: path.seed,
        sample_index: path.sample_index,
    })
}

/// Running left-point integrals of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelIntegrals {
    /// `∫₀^{t_k} W_s ds`
    pub w: Vec<f64>,
    /// `∫₀^{t_k} s W_s ds`
    pub sw: Vec<f64>,
    /// `∫₀^{t_k} W_s² ds`
    pub w2: Vec<f64>,
    /// `∫₀^{t_k} W_s³ ds`
    pub w3: Vec<f64>,
}

/// Lebesgue integrals of Brownian functionals for every channel of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathIntegrals {
    channels: Vec<ChannelIntegrals>,
}

impl PathIntegrals {
    pub fn channel(&self, j: usize) -> &ChannelIntegrals {
        &self.channels[j]
    }

    pub fn channels(&self) -> usize {
        self.channels.len()
    }
}

/// Left-endpoint Riemann sums `I_k = I_{k-1} + f(t_{k-1}, W_{t_{k-1}}) dt`.
pub fn path_integrals(path: &BrownianPath) -> PathIntegrals {
    let grid = path.grid();
    let n = grid.n_steps();
    let dt = grid.dt();
    let channels = (0..path.channels())
        .map(|j| {
            let w = path.channel(j);
            let mut out = ChannelIntegrals {
                w: vec![0.0; n + 1],
                sw: vec![0.0; n + 1],
                w2: vec![0.0; n + 1],
                w3: vec![0.0; n + 1],
            };
            for k in 1..=n {
                let (s, x) = (grid.time(k - 1), w[k - 1]);
                out.w[k] = out.w[k - 1] + x * dt;
                out.sw[k] = out.sw[k - 1] + s * x * dt;
                out.w2[k] = out.w2[k - 1] + x * x * dt;
                out.w3[k] = out.w3[k - 1] + x * x * x * dt;
            }
            out
        })
        .collect();
    PathIntegrals { channels }
}

/// Running left-point Itô sum `S_k = S_{k-1} + f_{k-1} (W_{t_k} - W_{t_{k-1}})`.
pub fn ito_integral(integrand: &[f64], path: &BrownianPath, channel: usize) -> Result<Vec<f64>> {
    let n = path.grid().n_steps();
    if integrand.len() != n + 1 {
        return Err(Error::LengthMismatch {
            expected: n + 1,
            got: integrand.len(),
        });
    }
    if channel >= path.channels() {
        return Err(Error::Config(format!("channel {channel} out of range")));
    }
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + integrand[k - 1] * path.increment(channel, k - 1);
    }
    Ok(out)
}
