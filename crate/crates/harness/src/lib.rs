//! Command-line front end for `lowsing`: configuration, verification suites, reports.

pub mod cli;
pub mod commands;
pub mod config;
pub mod report;
pub mod suites;
