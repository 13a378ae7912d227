// Matrix exponential and logarithm round trip, plus the logarithm norm bound.
use magnus_lab::matkit::{log_norm_bound, mat_exp, mat_log, spectral_norm, Matrix, SeriesConfig};

pub fn run_example() -> magnus_lab::Result<f64> {
    let m = Matrix::from_rows(&[[1.2, 0.3, 0.0], [-0.1, 0.9, 0.2], [0.0, 0.1, 1.1]])?;
    let cfg = SeriesConfig::new(200, 1e-16)?;
    let log = mat_log(&m, &cfg)?;
    let back = mat_exp(&log)?;
    let gap = (&back - &m).max_abs();
    println!("log M =\n{log:?}");
    println!("max |exp(log M) - M| = {gap:.2e}");
    println!("‖log M‖₂ = {:.4} <= bound {:.4}", spectral_norm(&log)?, log_norm_bound(&m)?);
    Ok(gap)
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
