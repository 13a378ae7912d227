// Euler-Maruyama converges at strong order one half on a solvable case.
use magnus_lab::harness::{constant_benchmark, relative_error};
use magnus_lab::magnus::LinearSde;
use magnus_lab::randpath::{sample_brownian, subsample, TimeGrid};
use magnus_lab::refsolve::{euler_maruyama, exact_const_diffusion, EulerConfig};
use magnus_lab::Matrix;

pub fn run_example() -> magnus_lab::Result<Vec<f64>> {
    let (a, _) = constant_benchmark();
    let sde = LinearSde::constant(Matrix::zeros(2), a.clone())?;
    let finest = TimeGrid::with_step(1.0, 1e-4)?;
    let samples = 200;
    let mut mean = vec![0.0; 3];
    for s in 0..samples {
        let path = sample_brownian(finest, 1, 99, s);
        let exact = exact_const_diffusion(&a, &path, &[finest.n_steps()])?.remove(0);
        for (i, dt) in [1e-2, 1e-3, 1e-4].into_iter().enumerate() {
            let grid = TimeGrid::with_step(1.0, dt)?;
            let sub = subsample(&path, finest.stride_to(&grid)?)?;
            let x = euler_maruyama(&sde, &sub, &EulerConfig::new(grid, vec![grid.n_steps()])?)?.remove(0);
            mean[i] += relative_error(&exact, &x) / samples as f64;
        }
    }
    for (dt, e) in [1e-2, 1e-3, 1e-4].iter().zip(&mean) {
        println!("dt = {dt:e}: mean terminal error {:.4}%", 100.0 * e);
    }
    Ok(mean)
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
