//! Library side of the `sqstream` command: CSV ingestion, the streaming
//! negative-CVaR pipeline, experiment presets and output writers.

pub mod error;
pub mod finance;
pub mod manifest;
pub mod output;
pub mod presets;
pub mod returns;

pub use error::{CliError, Result};
pub use finance::{run_negative_cvar, CvarPoint, LOSS_CONVENTION};
pub use manifest::{RunManifest, RunSpec};
pub use output::Format;
pub use presets::{run_experiment, run_preset, Overrides, Preset};
pub use returns::{ingest_csv, ReturnSeries, Sampling, Timestamp};
