//! Experiment runner, artifact formats, the independent artifact checker
//! and the multipartite counterexample report behind the `acychrom` CLI.

pub mod artifacts;
pub mod config;
pub mod demo;
pub mod experiment;
pub mod verify;
