// Seeded Brownian paths: reproducibility, subsampling and path integrals.
use magnus_lab::randpath::{ito_integral, path_integrals, sample_brownian, subsample, TimeGrid};

pub fn run_example() -> magnus_lab::Result<f64> {
    let fine = TimeGrid::with_step(1.0, 1e-4)?;
    let coarse = TimeGrid::with_step(1.0, 1e-2)?;
    let path = sample_brownian(fine, 1, 7, 0);
    assert_eq!(path, sample_brownian(fine, 1, 7, 0), "same seed and index, same path");

    let restricted = subsample(&path, fine.stride_to(&coarse)?)?;
    let n = fine.n_steps();
    println!("W_1 on fine grid {:.6}, on coarse grid {:.6}", path.value(0, n), restricted.value(0, 100));

    // Itô's formula: ∫ W dW = (W_1² - 1)/2 up to the quadratic-variation error
    let w = path.channel(0).to_vec();
    let ito = ito_integral(&w, &path, 0)?[n];
    let closed = 0.5 * (path.value(0, n).powi(2) - 1.0);
    println!("∫W dW = {ito:.5}, (W_1² - 1)/2 = {closed:.5}");
    println!("∫W ds = {:.5}", path_integrals(&path).channel(0).w[n]);
    Ok((ito - closed).abs())
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
