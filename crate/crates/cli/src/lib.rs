//! Benchmark harness for the `chiquad` integrators: error tables, figure
//! data and single integrals.

pub mod figures;
pub mod integrate;
pub mod registry;
pub mod report;
pub mod tables;
