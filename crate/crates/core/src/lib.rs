//! Numerical Gaussian harmonic analysis on finite Hermite expansions.
//!
//! - [`hermite`]: basis, quadrature, norms, chaos projections.
//! - [`quadrature`]: log-substituted rules for singular integrals over `(0, ∞)`.
//! - [`semigroups`]: Ornstein-Uhlenbeck and Poisson-Hermite semigroups.
//! - [`fractional`]: Riesz/Bessel potentials and fractional derivatives.
//! - [`besov`]: Gaussian Besov-Lipschitz norms, Hardy inequalities, decay reports.
//! - [`harness`]: seeded experiment families, the experiment registry and reports.

pub mod besov;
pub mod error;
pub mod fractional;
pub mod harness;
pub mod hermite;
pub mod quadrature;
pub mod semigroups;

pub use error::{Error, Result};
pub use hermite::{GaussHermiteGrid, HermiteExpansion, MultiIndex};
