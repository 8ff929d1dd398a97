//! CLI surface for the Ranking matching toolkit: argument parsing,
//! experiment configuration, and the subcommand implementations.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
