// Time-dependent diffusion `A_t = [[2, t], [0, -1]]` against its explicit solution.
use magnus_lab::harness::err_t;
use magnus_lab::magnus::{assemble, terms_triangular, MagnusConfig};
use magnus_lab::randpath::{path_integrals, sample_brownian, subsample, TimeGrid};
use magnus_lab::refsolve::exact_triangular;

pub fn run_example() -> magnus_lab::Result<Vec<f64>> {
    let fine = TimeGrid::with_step(0.25, 1e-4)?;
    let coarse = TimeGrid::with_step(0.25, 1e-2)?;
    let path = sample_brownian(fine, 1, 11, 3);
    let stride = fine.stride_to(&coarse)?;
    let exact: Vec<_> = exact_triangular(&path)?.into_iter().step_by(stride).collect();

    let coarse_path = subsample(&path, stride)?;
    let terms = terms_triangular(&coarse_path, &path_integrals(&coarse_path))?;
    let mut errs = Vec::new();
    for order in 1..=3 {
        let approx = assemble(&terms, &MagnusConfig::all_times(order, coarse)?)?;
        let e = err_t(&exact, &approx)?;
        println!("order {order}: time-averaged error on [0, 0.25] is {:.4}%", 100.0 * e);
        errs.push(e);
    }
    Ok(errs)
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
