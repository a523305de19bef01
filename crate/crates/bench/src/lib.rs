//! Synthetic registration benchmark: instance generation, Monte Carlo trials
//! for the VOCRA solver and a RANSAC baseline, and CSV/JSON reporting.
//!
//! Trial `k` of a run seeded with `s` draws everything from a ChaCha8 stream
//! seeded with `s + k`, so records do not depend on scheduling.

pub mod error;
pub mod instance;
pub mod model;
pub mod report;
pub mod runner;

pub use error::{BenchError, BenchResult};
pub use instance::{generate_instance, random_in_ball, BenchConfig, Instance, OutlierMode};
pub use model::{fit_unit_cube, load_xyz, parse_xyz, synthetic_surface};
pub use report::{csv_string, format_summary, median, summarize, write_csv, write_json, RateSummary, CSV_HEADER};
pub use runner::{
    run_benchmark, run_benchmark_on, run_solver, run_sweep, trial_instance, trial_rng, vocra_config, BenchRecord,
    Solver, DEFAULT_RATES,
};
