//! Command-line front end for the `symspace` library: configuration layering
//! and JSON/CSV emission.

pub mod commands;
pub mod config;
