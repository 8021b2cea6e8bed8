//! Scenario runner for evolving population codes: loads JSON scenario
//! configurations, optimizes with restarts and writes results, CSV tables
//! and SVG/DOT figures.

pub mod config;
mod error;
pub mod report;
pub mod runner;
pub mod svg;

pub use config::{ScenarioConfig, Selection};
pub use error::{CliError, Result};
pub use runner::{analyze, run, sweep_alphabet, RunOutput, SavedCodes, SweepRow};
