//! Monte Carlo harness: scenario generators, noise and outlier models, the
//! seeded grid runner and its CSV output.

pub mod analysis;
pub mod grid;
pub mod scenario;
pub mod table;

pub use grid::{builtin_grid, run_grid, run_once, run_seed, Axis, CellResult, CellSummary, Grid, GridResult, BUILTIN_GRIDS};
pub use scenario::{
    gen_collinear, gen_random_box, gen_varying_n, inject_outliers, perturb_trajectory, OutlierMode, ScenarioConfig,
    ScenarioKind, VolumeRule,
};
pub use table::{read_summary_csv, write_runs_csv, write_summary_csv, SummaryTable};
