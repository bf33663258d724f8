use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{ScenarioConfig, ScenarioKind};
use crate::error::{Error, Result};
use crate::evaluate::{evaluate, EvalOptions, Metric};

pub const OUTLIER_GRID: [usize; 7] = [0, 1, 2, 5, 10, 20, 50];
pub const SIGMA_T_GRID: [f64; 10] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1];
pub const SIGMA_R_GRID: [f64; 10] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
pub const PAS_SIGMA_R_GRID: [f64; 5] = [1.0, 3.0, 5.0, 7.0, 9.0];
pub const N_GRID: [usize; 7] = [10, 20, 30, 40, 50, 100, 200];
pub const DEFAULT_N: usize = 100;
pub const DEFAULT_SIGMA_R: f64 = 3.0;
pub const PAS_GRID_OUTLIERS: usize = 10;

pub const BUILTIN_GRIDS: [&str; 8] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7a", "fig7b", "fig7c"];

/// A scenario parameter used to lay out results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    SigmaT,
    SigmaR,
    Outliers,
    N,
}

impl Axis {
    pub fn value(self, cfg: &ScenarioConfig) -> f64 {
        match self {
            Axis::SigmaT => cfg.sigma_t,
            Axis::SigmaR => cfg.sigma_r,
            Axis::Outliers => cfg.outliers as f64,
            Axis::N => cfg.n as f64,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::SigmaT => "sigma_t",
            Axis::SigmaR => "sigma_r (deg)",
            Axis::Outliers => "outliers",
            Axis::N => "cameras",
        }
    }
}

/// A named set of cells evaluated on the same metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub name: String,
    pub metrics: Vec<Metric>,
    pub cells: Vec<ScenarioConfig>,
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::InvalidArgument(format!("grid '{}' requests no metrics", self.name)));
        }
        self.cells.iter().try_for_each(ScenarioConfig::validate)
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.cells.iter_mut().for_each(|c| c.runs = runs);
        self
    }

    pub fn with_master_seed(mut self, seed: u64) -> Self {
        self.cells.iter_mut().for_each(|c| c.master_seed = seed);
        self
    }
}

fn product<A: Copy, B: Copy>(a: &[A], b: &[B], f: impl Fn(A, B) -> ScenarioConfig) -> Vec<ScenarioConfig> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect()
}

fn paired_noise() -> impl Iterator<Item = (f64, f64)> {
    SIGMA_T_GRID.into_iter().zip(SIGMA_R_GRID)
}

/// The built-in grid called `name`, with 50 runs per cell and master seed 0.
pub fn builtin_grid(name: &str) -> Option<Grid> {
    use Metric::*;
    use ScenarioKind as K;
    let translation = vec![Ate, Dte, Maa, Tas];
    let (metrics, cells) = match name {
        "fig2" | "fig3" => {
            let kind = if name == "fig2" { K::RandomBox } else { K::Collinear };
            let cells = product(&OUTLIER_GRID, &SIGMA_T_GRID, |o, t| {
                ScenarioConfig::new(kind, DEFAULT_N, t, DEFAULT_SIGMA_R, o)
            });
            (translation, cells)
        }
        "fig4" => {
            let cells = product(&N_GRID, &SIGMA_T_GRID, |n, t| {
                ScenarioConfig::new(K::VaryingN, n, t, DEFAULT_SIGMA_R, 0)
            });
            (translation, cells)
        }
        "fig5" => {
            let cells = product(&OUTLIER_GRID, &SIGMA_R_GRID, |o, r| {
                ScenarioConfig::new(K::RotationOnly, DEFAULT_N, 0.0, r, o)
            });
            let metrics = vec![Ras, Median1, Mean1, Rms1, Median2, Mean2, Rms2, Dre];
            (metrics, cells)
        }
        "fig6" => {
            let cells = product(&PAS_SIGMA_R_GRID, &SIGMA_T_GRID, |r, t| {
                ScenarioConfig::new(K::PasGrid, DEFAULT_N, t, r, PAS_GRID_OUTLIERS)
            });
            (vec![Ate, Dte, Maa, Tas, Ras, Pas], cells)
        }
        "fig7a" | "fig7c" => {
            let kind = if name == "fig7a" { K::MaaVsPasA } else { K::MaaVsPasC };
            let cells = OUTLIER_GRID
                .iter()
                .flat_map(|&o| paired_noise().map(move |(t, r)| ScenarioConfig::new(kind, DEFAULT_N, t, r, o)))
                .collect();
            (vec![Maa, Pas], cells)
        }
        "fig7b" => {
            let cells = N_GRID
                .iter()
                .flat_map(|&n| paired_noise().map(move |(t, r)| ScenarioConfig::new(K::MaaVsPasB, n, t, r, 0)))
                .collect();
            (vec![Maa, Pas], cells)
        }
        _ => return None,
    };
    Some(Grid { name: name.to_string(), metrics, cells })
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `run` in `cell`, a pure function of the master seed, the
/// cell parameters and the run index.
pub fn run_seed(cell: &ScenarioConfig, run: usize) -> u64 {
    let cell_hash = fnv1a(cell.cell_key().as_bytes());
    splitmix64(splitmix64(cell.master_seed ^ cell_hash).wrapping_add(run as u64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// One entry per grid metric; `None` when the metric failed.
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: Metric,
    /// `None` when every run failed.
    pub stats: Option<Summary>,
    pub missing: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub config: ScenarioConfig,
    pub metrics: Vec<MetricSummary>,
}

impl CellSummary {
    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.metrics.iter().find(|m| m.metric == metric)?.stats.map(|s| s.mean)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    pub summary: CellSummary,
    pub runs: Vec<RunRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridResult {
    pub grid: Grid,
    pub cells: Vec<CellResult>,
}

impl GridResult {
    pub fn summaries(&self) -> Vec<CellSummary> {
        self.cells.iter().map(|c| c.summary.clone()).collect()
    }
}

/// Evaluates one run of one cell. Metric failures become `None`.
pub fn run_once(cell: &ScenarioConfig, metrics: &[Metric], run: usize) -> Result<RunRecord> {
    let seed = run_seed(cell, run);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (gt, est) = cell.sample(&mut rng)?;
    let eval = evaluate(&gt, &est, metrics, &EvalOptions::with_seed(seed))?;
    let values = eval.values.into_iter().map(|(_, v)| v.ok()).collect();
    Ok(RunRecord { run, seed, values })
}

fn summarize(metric: Metric, index: usize, runs: &[RunRecord]) -> MetricSummary {
    let values: Vec<f64> = runs.iter().filter_map(|r| r.values[index]).collect();
    let missing = runs.len() - values.len();
    let stats = (!values.is_empty()).then(|| Summary {
        mean: values.iter().sum::<f64>() / values.len() as f64,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    });
    MetricSummary { metric, stats, missing }
}

/// Runs every cell of the grid in parallel. Results do not depend on
/// scheduling: each run draws from its own derived seed.
pub fn run_grid(grid: &Grid) -> Result<GridResult> {
    grid.validate()?;
    let jobs: Vec<(usize, usize)> =
        grid.cells.iter().enumerate().flat_map(|(c, cell)| (0..cell.runs).map(move |r| (c, r))).collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(c, r)| run_once(&grid.cells[c], &grid.metrics, r))
        .collect::<Result<_>>()?;

    let mut records = records.into_iter();
    let cells = grid
        .cells
        .iter()
        .map(|cell| {
            let runs: Vec<RunRecord> = records.by_ref().take(cell.runs).collect();
            let metrics = grid.metrics.iter().enumerate().map(|(i, &m)| summarize(m, i, &runs)).collect();
            CellResult { summary: CellSummary { config: cell.clone(), metrics }, runs }
        })
        .collect();
    Ok(GridResult { grid: grid.clone(), cells })
}
