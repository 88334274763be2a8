//! Exact rational arithmetic and certified enclosures.

pub mod elementary;
pub mod interval;
pub mod rational;
pub mod roots;

pub use interval::{iv_add, iv_div, iv_mul, iv_sub, RationalInterval};
pub use rational::{Dyadic, Rational};
pub use roots::{iv_nth_root, monotone_inverse, monotone_inverse_inner, MonotoneMap};
