//! Command-line front end for `qwalk-nm`: argument parsing, run configs,
//! deterministic CSV/JSON/SVG output and the checksummed run manifest.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod plot;
