//! Monte Carlo zeros of one-variable Gaussian random polynomials.

mod ensemble;
mod roots;

pub use ensemble::{
    complex_gaussian, estimate_density, sample_poly, trial_rng, DensityHistogram, EnsembleConfig,
    EnsembleReport, Window, MAX_WINDOW, MIN_TRIALS,
};
pub use roots::{find_roots, passes_gate, scaled_residual, RESIDUAL_TOL, TRAILING_ZERO};
