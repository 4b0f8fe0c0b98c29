//! Configuration, fixtures, table output and experiment sweeps shared by the CLI and tests.

pub mod config;
pub mod experiment;
pub mod fixtures;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind, Knobs, OutputPaths, Params};
pub use experiment::{disk_grid, growth_constants, japanese_bracket, run_experiment, sample_points, write_experiment, ExperimentReport};
pub use fixtures::{fixture, regular_cover, Cover, CoverSource, SchemeSource};
pub use output::{fmt_f64, sidecar_path, write_outputs, Cell, Sidecar, Table};
