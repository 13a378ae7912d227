//! Stochastic Magnus expansion for linear matrix-valued Itô SDEs
//!
//! ```text
//!     dX_t = B_t X_t dt + Σ_j A^(j)_t X_t dW^j_t,     X_0 = I
//! ```
//!
//! The solution is approximated as `X_t ≈ exp(Y1_t + … + Yn_t)` with the
//! logarithm terms built from iterated integrals of nested commutators. The
//! crate is organised in layers:
//!
//! - [`matkit`]: dense matrices, commutators, `exp`/`log`, and the
//!   derivative-of-exponential operators with their Bernoulli inverse.
//! - [`randpath`]: seeded Brownian paths, subsampling, and left-point
//!   quadrature of path functionals.
//! - [`magnus`]: closed-form and recursive Magnus terms, assembly, and the
//!   stopping-time monitor.
//! - [`refsolve`]: Euler-Maruyama and the explicit benchmark solutions.
//! - [`spdegrid`]: finite-difference reduction of parabolic SPDEs to a
//!   matrix SDE, with the heat-kernel reference.
//! - [`harness`]: Monte Carlo experiment driver writing CSV reports.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory.

pub mod error;
pub mod harness;
pub mod magnus;
pub mod matkit;
pub mod randpath;
pub mod refsolve;
pub mod spdegrid;

pub use error::{Error, Result};
pub use matkit::{Matrix, SeriesConfig};
pub use randpath::{BrownianPath, PathIntegrals, TimeGrid};
