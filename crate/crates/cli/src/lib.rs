//! Scenario runner for the optomechanics models: JSON config in, CSV plus a
//! JSON sidecar out.

pub mod config;
pub mod csv;
pub mod error;
pub mod scenario;

pub use config::{load_config, ScenarioConfig, ScenarioKind};
pub use error::CliError;
pub use scenario::{compute, run_scenario};
