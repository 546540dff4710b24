//! Command-line front end and calibration service.

pub mod args;
pub mod commands;
pub mod compare;
pub mod server;

pub use args::{Cli, Command, Globals};
pub use compare::{run_compare, CompareInputs, CompareReport, CompareSettings, MethodEdr};
pub use server::{router, AppState};
