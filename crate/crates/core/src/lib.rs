//! Two-sided bounds on the joint spectral radius of finite sets of complex
//! matrices, together with numerical checks of the norm and trace
//! inequalities that relate it to spectral radii of products.
//!
//! Module map:
//! - [`matcore`]: eigenvalues, singular values, characteristic polynomials.
//! - [`norms`]: vector and operator norms, set norms, ellipsoidal descent.
//! - [`semigroup`]: product enumeration and branch-and-bound JSR bounds.
//! - [`invariants`]: permutations, trace words and the trace identity.
//! - [`inequalities`]: ratio checkers and seeded ensemble estimators.

// `!(x <= tol)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod invariants;
pub mod exec;
pub mod inequalities;
pub mod matcore;
pub mod matrix;
pub mod norms;
pub mod random;
pub mod semigroup;

pub use error::{Error, Result};
pub use matrix::{mat_mul, CMatrix, MatrixSet, C64};
