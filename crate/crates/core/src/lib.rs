//! Taylor-Abel-Poisson means `A_{rho,r}` and related block multipliers for
//! multivariate trigonometric polynomials on the torus `T^d`.
//!
//! Functions are stored as sparse coefficient lists ([`SpectralFunction`]);
//! every operator scales the ℓ1-degree blocks `|k|_1 = nu` by a common
//! factor. On top of that the crate provides K-functionals, the realization
//! quantity `M_p`, modulus checks, multiplier norm estimates and rate
//! experiments.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod operators;
pub mod quadrature;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use operators::{
    apply_block_multiplier, falling_factorial, lambda_coeff, lambda_tail, leis_mean, poisson_mean,
    poisson_rho_derivative, radial_derivative, tap_mean, taylor_form, y_kernel_poisson_mean,
    y_poisson_kernel, BlockMultiplier, TapParameters,
};
pub use spectral::{
    analyze, box_indices, lp_norm, synthesize, LpExponent, MultiIndex, SampleField,
    SpectralFunction,
};
