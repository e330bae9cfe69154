//! Library side of the `planar-qec` command-line tool.

pub mod calibration;
pub mod config;
pub mod error;
pub mod output;
pub mod run;
