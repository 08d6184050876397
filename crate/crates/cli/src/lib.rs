//! Job files and pipeline runner behind the `pdivgen` binary.

pub mod job;
pub mod run;
