//! JSON formats and the `cepgeo` command line on top of `cepgeo-core`.

pub mod cli;
pub mod number;
pub mod report;
pub mod schema;
pub mod table;

pub use cli::{run, run_with};
