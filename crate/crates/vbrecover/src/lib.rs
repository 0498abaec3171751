//! Experiment harness: configuration, seeded parallel execution and
//! artifact writing for the `vbrecover` CLI.

pub mod config;
pub mod runner;
