//! Covariograms, θ-convolution bodies, Ball's bodies and polar projection
//! bodies of convex polytopes, with numerical checks of the Brunn-Minkowski
//! type inequalities and inclusions that relate them.
//!
//! Modules, bottom-up:
//! - [`geometry`]: exact polytope kernel and spherical cubature.
//! - [`covariogram`]: `g_{K,L}(z) = |K ∩ (z - L)|`, its maximum and the
//!   normalized handle used by everything downstream.
//! - [`bodies`]: radial functions of super-level sets, θ-convolution bodies,
//!   Ball's bodies, the limiting body and the polar projection body.
//! - [`verify`]: inequality and inclusion reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod covariogram;
pub mod error;
pub mod geometry;
mod linalg;
pub mod optimize;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
