//! Casimir interaction between magnetized mirrors.
//!
//! Everything here is evaluated on the imaginary frequency axis, where the
//! dielectric tensor of a passive mirror is real and the reflection matrices
//! entering the Lifshitz-type energy are real 2x2 matrices. The crate
//! computes the full zero-temperature Casimir energy and force between two
//! mirrors, the magnetization-dependent part `E_AF - E_FM` (exactly and to
//! lowest order in the magneto-optical coefficients), the closed-form
//! asymptotic limits of that difference, and the sphere-plate quantities
//! used to judge whether the effect can be measured.
//!
//! The crate is `no_std` and only needs `alloc` (for adaptive quadrature
//! panel lists and tabulated spectra). Units are Gaussian-cgs unless a
//! [`units::PhysicalConstants`] value with another convention is passed in
//! through [`casimir::QuadratureConfig`].

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// quadrature nodes are kept at full published precision
#![allow(clippy::excessive_precision)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod casimir;
mod error;
pub mod experiment;
pub mod materials;
pub mod quadrature;
pub mod reflectivity;
pub mod units;

pub use error::{Error, Result};
