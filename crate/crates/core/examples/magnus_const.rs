// Constant-coefficient Magnus approximations of orders 1 to 3 against Euler.
use magnus_lab::harness::{constant_benchmark, relative_error};
use magnus_lab::magnus::{assemble, terms_const, LinearSde, MagnusConfig};
use magnus_lab::randpath::{path_integrals, sample_brownian, subsample, TimeGrid};
use magnus_lab::refsolve::{euler_maruyama, EulerConfig};

pub fn run_example() -> magnus_lab::Result<Vec<f64>> {
    let (a, b) = constant_benchmark();
    let fine = TimeGrid::with_step(0.5, 1e-4)?;
    let coarse = TimeGrid::with_step(0.5, 1e-2)?;
    let path = sample_brownian(fine, 1, 2024, 0);
    let sde = LinearSde::constant(b.clone(), a.clone())?;
    let reference = euler_maruyama(&sde, &path, &EulerConfig::new(fine, vec![fine.n_steps()])?)?.remove(0);

    let coarse_path = subsample(&path, fine.stride_to(&coarse)?)?;
    let terms = terms_const(&a, &b, &coarse_path, &path_integrals(&coarse_path))?;
    let mut errs = Vec::new();
    for order in 1..=3 {
        let x = assemble(&terms, &MagnusConfig::new(order, coarse, vec![coarse.n_steps()])?)?.remove(0);
        let e = relative_error(&reference, &x);
        println!("order {order}: relative error at t = 0.5 is {:.4}%", 100.0 * e);
        errs.push(e);
    }
    Ok(errs)
}

fn main() -> magnus_lab::Result<()> {
    run_example().map(|_| ())
}
