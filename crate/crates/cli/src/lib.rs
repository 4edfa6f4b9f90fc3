//! Command-line experiment runner for `mimo-aging`: configuration files,
//! the reference figures, custom sweeps and CSV output.

pub mod config;
pub mod csv;
pub mod experiment;
