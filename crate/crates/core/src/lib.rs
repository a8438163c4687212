//! Eigenvalues of the degenerate, singular problem
//!
//! ```text
//! -div(|x|^alpha grad u) = lambda g(x) u,   x in R^N,  N >= 3,  0 < alpha < 2
//! ```
//!
//! on truncated domains, computed as the successive constrained minimizers of
//! the energy `<u,u>_alpha = int |x|^alpha |grad u|^2` subject to
//! `int g u^2 = 1` and energy-orthogonality to the previously found
//! eigenfunctions.
//!
//! The crate is organized bottom-up:
//!
//! - [`weights`]: the power coefficient, the weight catalogue with its
//!   `g = g1 + g2 - g_minus` splits and a sampled integrability/decay checker.
//! - [`mesh`]: graded radial meshes on `[0, R]` and uniform 3D grids.
//! - [`assembly`]: stiffness, mass and Hardy matrices plus volume quadrature.
//! - [`eigensolve`]: dense congruence oracle and the successive
//!   (deflated) maximization of `u^T B u / u^T A u`.
//! - [`inequalities`]: Hardy, Sobolev and general radial CKN quotient checks.
//! - [`oracle`]: an independent radial shooting solver.
//! - [`config`], [`report`], [`cli`]: configuration, report emission and the
//!   command-line surface.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod cli;
pub mod config;
pub mod eigensolve;
pub mod error;
pub mod inequalities;
pub mod linalg;
pub mod mesh;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod weights;

pub use error::{Error, Result};
