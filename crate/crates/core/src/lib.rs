//! Certified finite-depth constructions of small closed sets that contain
//! every finite polynomial (or affine) pattern, together with replayable
//! witness certificates and per-level covering bounds.

pub mod cli;
pub mod construction;
pub mod dimfun;
pub mod error;
pub mod maps;
pub mod numerics;
pub mod witness;

pub use error::{Error, Result};
