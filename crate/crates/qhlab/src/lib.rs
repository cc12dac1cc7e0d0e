//! Batch driver for `qhlab-core`: run configurations, CSV tables, SVG plots
//! and run manifests.

pub mod config;
pub mod error;
pub mod manifest;
pub mod plot;
pub mod run;
pub mod table;

pub use config::{parse_config, Command, RunConfig};
pub use error::{CliError, Result};
pub use manifest::{read_manifest, RunManifest, Status, MANIFEST_NAME};
pub use plot::{emit_plot, render_plot, PanelSpec, PlotSpec};
pub use qhlab_core as core;
pub use run::run;
