// The general recursion reproduces the closed forms for arbitrary coefficients.
//
// Here the diffusion is normalised to unit spectral norm, a case with no
// closed-form logarithm, and the recursion is compared with the explicit
// Itô solution scaled accordingly.
use magnus_lab::harness::{err_t, triangular_diffusion, triangular_norm};
use magnus_lab::magnus::{assemble, recursion_terms, terms_general, Coefficient, LinearSde, MagnusConfig};
use magnus_lab::randpath::{sample_brownian, TimeGrid};
use magnus_lab::refsolve::exact_upper_triangular;
use magnus_lab::Matrix;

pub fn run_example() -> magnus_lab::Result<f64> {
    let normalized = |t: f64| triangular_diffusion(t).scaled(1.0 / triangular_norm(t));
    let sde = LinearSde::new(
        2,
        Coefficient::Constant(Matrix::zeros(2)),
        vec![Coefficient::time_dependent(normalized)],
    )?;
    let grid = TimeGrid::with_step(1.0, 1e-3)?;
    let path = sample_brownian(grid, 1, 5, 0);
    let exact = exact_upper_triangular(
        |t| 2.0 / triangular_norm(t),
        |t| t / triangular_norm(t),
        |t| -1.0 / triangular_norm(t),
        &path,
    )?;

    let second = assemble(&terms_general(&sde, &path, 2)?, &MagnusConfig::all_times(2, grid)?)?;
    let third = assemble(&recursion_terms(&sde, &path, 3)?, &MagnusConfig::all_times(3, grid)?)?;
    let (e2, e3) = (err_t(&exact, &second)?, err_t(&exact, &third)?);
    println!("explicit order 2: {:.4}%, recursion order 3: {:.4}%", 100.0 * e2, 100.0 * e3);
    Ok(e3)
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
