//! Pattern maps: polynomials, root and linear conjugators, thresholds.

pub mod affine;
pub mod conjugate;
pub mod multivariate;
mod parse;
pub mod polynomial;

pub use affine::{conjugate_bilipschitz, AffineMap};
pub use conjugate::{choose_conjugator, compute_threshold, g_forward, g_inverse, ConjugatedMap, Conjugator};
pub use multivariate::{reduce_multivariate, MultiPolynomial};
pub use polynomial::Polynomial;
