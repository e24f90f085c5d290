//! Instance files, generators, experiment drivers and verification suites.

pub mod bench;
pub mod generate;
pub mod instance_file;
pub mod solve;
pub mod verify;

pub use instance_file::{InstanceFile, SetSpec};
