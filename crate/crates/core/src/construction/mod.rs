//! Scale sequences, grid levels, level schedules and truncated K-sets.

pub mod checker;
pub mod delta;
pub mod enumeration;
pub mod grid;
pub mod kset;
pub mod schedule;

pub use delta::{build_delta_sequence, DeltaSequence};
pub use grid::{grid_level, GridLevel};
pub use kset::kset_intervals;
pub use schedule::{check_nesting_fit, schedule, ScheduleEntry};
