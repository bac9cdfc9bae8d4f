//! File formats, configuration and the command-line pipeline around
//! `vmwe-core`.

pub mod cli;
pub mod config;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod stages;
