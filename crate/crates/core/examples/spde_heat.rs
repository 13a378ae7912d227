// Stochastic heat equation `du = a/2 u_xx dt + σ u_x dW` on a finite-difference mesh.
//
// The order-3 Magnus solution is compared with the cell masses of the
// Gaussian fundamental solution on the central half of the mesh.
use magnus_lab::magnus::{assemble, MagnusConfig};
use magnus_lab::randpath::{sample_brownian, TimeGrid};
use magnus_lab::spdegrid::{
    default_kappa, discretize, fundamental_integral_matrix, spde_error, system_terms, Mesh, SpdeProblem,
};

pub fn run_example() -> magnus_lab::Result<f64> {
    let (a, sigma, d, t) = (0.2, 0.15, 50, 0.5);
    let mesh = Mesh::new(-2.0, 2.0, d)?;
    let system = discretize(&SpdeProblem::heat(a, sigma, mesh))?;
    let grid = TimeGrid::with_step(t, 1e-3)?;
    let path = sample_brownian(grid, 1, 3, 0);

    let terms = system_terms(&system, &path, 3)?;
    let x = assemble(&terms, &MagnusConfig::new(3, grid, vec![grid.n_steps()])?)?.remove(0);
    let exact = fundamental_integral_matrix(a, sigma, t, path.value(0, grid.n_steps()), &system.mesh)?;
    let err = spde_error(&x, &exact, default_kappa(d))?;
    println!("d = {d}, W_t = {:.4}: central error {:.3}%", path.value(0, grid.n_steps()), 100.0 * err);
    Ok(err)
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
