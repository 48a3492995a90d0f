//! Scenario runner for the `lvfront` library: TOML configs in, reports and
//! CSV artifacts out.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod plots;

pub use config::{load_config, ScenarioConfig};
pub use error::CliError;
pub use pipeline::{run, Stage, Target};
pub use plots::emit_plot_data;
