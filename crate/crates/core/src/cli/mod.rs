//! Command implementations, run configuration, and file formats for the
//! `qram-rr` binary.

pub mod commands;
pub mod config;
pub mod csv;
pub mod presets;
pub mod svg;

pub use commands::{
    cmd_circuit_demo, cmd_resource, cmd_verify, cmd_yield, CliError, EXIT_CONFIG, EXIT_IO, EXIT_OK,
    EXIT_VERIFY,
};
pub use config::{CircuitDemoConfig, RunConfig};
