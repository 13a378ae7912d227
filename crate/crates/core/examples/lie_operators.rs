// Commutators and the derivative-of-exponential operators.
//
// `dexp_Σ(M)` is the derivative of `exp` at `Σ` in direction `M` (right
// trivialised), and `dexp_inv` undoes it through the Bernoulli series.
use magnus_lab::matkit::{bernoulli, commutator, ddexp, dexp, dexp_inv, frobenius_norm, Matrix, SeriesConfig};

pub fn run_example() -> magnus_lab::Result<f64> {
    let sigma = Matrix::from_rows(&[[0.2, 0.5], [-0.3, 0.1]])?;
    let m = Matrix::from_rows(&[[1.0, 0.0], [0.4, -1.0]])?;
    let n = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]])?;
    let cfg = SeriesConfig::new(60, 0.0)?;

    println!("[Σ, M] = {:?}", commutator(&sigma, &m)?);
    let d = dexp(&sigma, &m, &cfg)?;
    let round_trip = frobenius_norm(&(&dexp_inv(&sigma, &d, &cfg)? - &m));
    println!("dexp_inv(dexp(M)) - M: {round_trip:.2e}");
    let asym = frobenius_norm(&(&ddexp(&sigma, &m, &n, &cfg)? - &ddexp(&sigma, &n, &m, &cfg)?));
    println!("ddexp(M, N) - ddexp(N, M): {asym:.2e}");
    let table: Vec<f64> = (0..=6).map(bernoulli).collect::<Result<_, _>>()?;
    println!("B_0..B_6 = {table:?}");
    Ok(round_trip.max(asym))
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
