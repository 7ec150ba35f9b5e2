//! Exact finite-degree partial Szegő kernels on complete Reinhardt boundaries.

mod indices;
mod kernel;
mod norms;

pub use indices::{enumerate_indices, graded_lex_rank, index_count, MultiIndex, MAX_INDICES};
pub use kernel::{
    empirical_constant, empirical_constant_at_degree, kernel_jet, kernel_jet_at_degree, scaled_ratio,
    scaled_ratio_limit, EmpiricalConstant, KernelJet,
};
pub use norms::{
    compute_norms, compute_norms_weighted, quadrature_norms, sphere_norms, NormTable, RadialWeight,
    DEFAULT_QUAD_ORDER,
};
