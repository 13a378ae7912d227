// Exit time of a trajectory from the ball `‖X - I‖_F < 1 - e^{-π}`.
//
// Paths of the driftless constant case are followed until they first leave
// the ball, inside which the matrix logarithm series is guaranteed to converge.
use magnus_lab::harness::constant_benchmark;
use magnus_lab::magnus::{tau_monitor, StoppingTime, TAU_THRESHOLD};
use magnus_lab::randpath::{sample_brownian, TimeGrid};
use magnus_lab::refsolve::exact_const_diffusion;

pub fn run_example() -> magnus_lab::Result<f64> {
    let (a, _) = constant_benchmark();
    let grid = TimeGrid::with_step(0.5, 1e-3)?;
    let all: Vec<usize> = (0..=grid.n_steps()).collect();
    let samples = 200;
    let mut exits = 0;
    for s in 0..samples {
        let path = sample_brownian(grid, 1, 42, s);
        let xs = exact_const_diffusion(&a, &path, &all)?;
        if let StoppingTime::Exit(t) = tau_monitor(&xs, &grid)? {
            exits += 1;
            if exits <= 3 {
                println!("sample {s} exits at t = {t:.3}");
            }
        }
    }
    let p = exits as f64 / samples as f64;
    println!("threshold {TAU_THRESHOLD:.5}; P(tau <= 0.5) ≈ {p:.3}");
    Ok(p)
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
