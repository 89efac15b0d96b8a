//! Numerical machinery for low-singularity nonlocal operators
//! `ℒu(x) = ∫ (u(x+z) − u(x)) a(x,z) J(z) dz` whose Lévy exponent `ψ(ξ) = φ(|ξ|²)` is
//! slowly varying (the gamma subordinator is the model case).
//!
//! * [`orlicz`]: N-functions, conjugates and Luxemburg norms.
//! * [`symbols`]: Laplace and Lévy exponents, jump kernels, potential densities.
//! * [`fields`]: periodic grid fields, ψ-dyadic blocks and the associated function-space norms.
//! * [`operator`]: the generator by quadrature and by Fourier multiplier, resolvent solvers.
//! * [`montecarlo`]: simulation of the jump process and Feynman–Kac type estimators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod montecarlo;
pub mod numeric;
pub mod operator;
pub mod orlicz;
pub mod symbols;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/orlicz.md")]
    mod orlicz {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/operator.md")]
    mod operator {}
    #[doc = include_str!("../../../book/src/montecarlo.md")]
    mod montecarlo {}
    #[doc = include_str!("../../../book/src/counterexample.md")]
    mod counterexample {}
}
