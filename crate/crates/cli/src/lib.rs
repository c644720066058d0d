//! Library surface of the command-line front end, reused by the
//! integration and acceptance suites.

pub mod commands;
pub mod config;
