//! Experiment runner for the `sand-core` discovery simulator: the network
//! file format, configuration, CSV outputs and orchestration behind the
//! `sand` command.

pub mod config;
pub mod netfile;
pub mod output;
pub mod runner;
