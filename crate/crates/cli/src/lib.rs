//! Library half of the benchmark harness: configuration, the experiment
//! runner, and the comparison report. The `proxbench` binary is a thin
//! wrapper over these.

pub mod config;
pub mod report;
pub mod runner;
