//! Normalized Hermite polynomials, Gauss-Hermite quadrature for the Gaussian
//! measure, expansion arithmetic and chaos projections.

mod expansion;
mod grid;
mod multiplier;

pub use expansion::{
    chaos_project, expansion_eval, hermite_eval, hermite_table, pi0, HermiteExpansion, MultiIndex,
};
pub use grid::{
    gauss_hermite_grid, inner_product_gamma, lp_norm_gamma, GaussHermiteGrid, InnerProduct,
    DEFAULT_MAX_NODES_PER_AXIS,
};
pub(crate) use grid::{check_p, lp_norm_of_samples};
pub use multiplier::SpectralMultiplier;
