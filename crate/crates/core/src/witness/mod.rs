//! Witness search, certificate replay and covering bounds.

pub mod certificate;
pub mod cover;
pub mod pattern;
pub mod search;
pub mod verify;

pub use certificate::{Step, Tolerances, WitnessCertificate};
pub use cover::{certify_measure_decay, CoverCertificate};
pub use pattern::{Mode, PatternMap, PatternSpec};
pub use search::{search, search_image_pattern, search_preimage_pattern};
pub use verify::{verify_certificate, VerifyReport};
