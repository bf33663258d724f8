//! The `trajkit` command: evaluates trajectory files, runs simulation grids
//! and renders their summaries.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assoc;
pub mod error;
pub mod io;
pub mod plot;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use trajkit::simlab::{builtin_grid, run_grid, write_runs_csv, write_summary_csv, Grid, BUILTIN_GRIDS};
use trajkit::{evaluate, CumulativeHistogram, EvalOptions, Metric};

use crate::assoc::{associate, AssocMode, DEFAULT_TOLERANCE, MIN_PAIRS};
pub use crate::error::CliError;
use crate::io::{load_trajectory, Format};

#[derive(Debug, Parser)]
#[command(name = "trajkit", version, about = "Camera trajectory evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score an estimated trajectory against ground truth.
    Evaluate(EvaluateArgs),
    /// Run a Monte Carlo grid and write per-run and summary CSVs.
    Simulate(SimulateArgs),
    /// Render the summary CSVs of a directory as text or SVG charts.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub est: PathBuf,
    /// File format; inferred from each file's extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum, default_value = "index")]
    pub assoc: AssocMode,
    /// Timestamp tolerance for `--assoc timestamp`.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Comma-separated metrics: tas, ras, pas, ate, dte, dre, maa, median1,
    /// mean1, rms1, median2, mean2, rms2, stats1, stats2 or all.
    #[arg(long, default_value = "tas,ras,pas")]
    pub metrics: String,
    #[arg(long, env = "TRAJKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Weight of TAS in PAS.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long)]
    pub json: bool,
    /// Write the TAS and RAS cumulative histograms to this CSV file.
    #[arg(long, value_name = "PATH")]
    pub hist_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// A built-in grid name, or `custom` together with `--config`.
    #[arg(long)]
    pub grid: String,
    /// Runs per cell [default: 50, or the config's value for custom grids].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: Option<u64>,
    /// Master seed [default: 0, or the config's value for custom grids].
    #[arg(long, env = "TRAJKIT_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// JSON grid description for `--grid custom`.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long = "in", value_name = "DIR")]
    pub input: PathBuf,
    /// Write one SVG chart per grid and metric into the directory.
    #[arg(long)]
    pub svg: bool,
}

/// Runs a parsed command and returns its exit code.
pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<u8, CliError> {
    match cli.command {
        Command::Evaluate(args) => cmd_evaluate(&args, out),
        Command::Simulate(args) => cmd_simulate(&args, out),
        Command::Report(args) => cmd_report(&args, out),
    }
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), source }
}

fn write_histograms(path: &Path, hists: &[(&str, &CumulativeHistogram)]) -> Result<(), CliError> {
    let csv_err = |e: csv::Error| CliError::Data { path: path.to_path_buf(), message: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["score", "threshold", "cumulative_count", "cumulative_fraction"]).map_err(csv_err)?;
    for (name, h) in hists {
        for ((t, c), f) in h.thresholds.iter().zip(&h.counts).zip(h.fractions()) {
            w.write_record([name.to_string(), t.to_string(), c.to_string(), f.to_string()]).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn cmd_evaluate<W: Write>(args: &EvaluateArgs, out: &mut W) -> Result<u8, CliError> {
    let metrics = Metric::parse_list(&args.metrics).map_err(|e| CliError::Usage(format!("--metrics: {e}")))?;
    if !(0.0..=1.0).contains(&args.alpha) {
        return Err(CliError::Usage(format!("--alpha must lie in [0, 1], got {}", args.alpha)));
    }
    if !(args.tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be non-negative, got {}", args.tol)));
    }
    let gt_format = args.format.unwrap_or_else(|| Format::from_path(&args.gt));
    let est_format = args.format.unwrap_or_else(|| Format::from_path(&args.est));
    let gt_file = load_trajectory(&args.gt, gt_format)?;
    let est_file = load_trajectory(&args.est, est_format)?;
    let association = associate(&gt_file, &est_file, args.assoc, args.tol, MIN_PAIRS)?;
    let (gt, est) = association.apply(&gt_file, &est_file);

    let mut opts = EvalOptions::with_seed(args.seed);
    opts.alpha = args.alpha;
    let eval = evaluate(&gt, &est, &metrics, &opts)?;

    if let Some(path) = &args.hist_csv {
        let mut hists = Vec::new();
        if let Some(h) = &eval.scores.translation_histogram {
            hists.push(("tas", h));
        }
        if let Some(h) = &eval.scores.rotation_histogram {
            hists.push(("ras", h));
        }
        write_histograms(path, &hists)?;
    }
    for w in &eval.scores.warnings {
        eprintln!("warning: {w}");
    }

    if args.json {
        let values: Vec<_> = eval
            .values
            .iter()
            .map(|(m, v)| match v {
                Ok(x) => json!({ "metric": m.name(), "value": x, "error": null }),
                Err(e) => json!({ "metric": m.name(), "value": null, "error": e.to_string() }),
            })
            .collect();
        let doc = json!({
            "gt": args.gt.display().to_string(),
            "est": args.est.display().to_string(),
            "association": { "mode": format!("{:?}", args.assoc).to_lowercase(), "pairs": association.pairs.len() },
            "seed": args.seed,
            "metrics": values,
            "scores": eval.scores,
            "baselines": eval.baselines,
        });
        let text = serde_json::to_string_pretty(&doc).expect("report serializes");
        writeln!(out, "{text}").map_err(stdout_err)?;
    } else {
        let mut text = String::new();
        text.push_str(&format!("gt     {} ({} records)\n", args.gt.display(), gt_file.len()));
        text.push_str(&format!("est    {} ({} records)\n", args.est.display(), est_file.len()));
        text.push_str(&format!("pairs  {}\n", association.pairs.len()));
        text.push_str(&format!("seed   {}\n\n", args.seed));
        for (m, v) in &eval.values {
            let shown = match v {
                Ok(x) => format!("{x:.6}"),
                Err(e) => format!("n/a ({e})"),
            };
            text.push_str(&format!("{:<9} {shown}\n", m.label()));
        }
        out.write_all(text.as_bytes()).map_err(stdout_err)?;
    }

    let degenerate = eval.values.iter().any(|(_, v)| matches!(v, Err(e) if e.is_degenerate()));
    Ok(if degenerate { 3 } else { 0 })
}

fn valid_grid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn load_grid(args: &SimulateArgs) -> Result<Grid, CliError> {
    match (args.grid.as_str(), &args.config) {
        ("custom", None) => Err(CliError::Usage("--grid custom needs --config".into())),
        ("custom", Some(path)) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            let grid: Grid = serde_json::from_str(&text)
                .map_err(|e| CliError::Data { path: path.clone(), message: format!("invalid grid: {e}") })?;
            if !valid_grid_name(&grid.name) {
                return Err(CliError::Data { path: path.clone(), message: format!("invalid grid name '{}'", grid.name) });
            }
            let grid = match args.runs {
                Some(r) => grid.with_runs(r as usize),
                None => grid,
            };
            let grid = match args.seed {
                Some(s) => grid.with_master_seed(s),
                None => grid,
            };
            grid.validate().map_err(|e| CliError::Data { path: path.clone(), message: format!("invalid grid: {e}") })?;
            Ok(grid)
        }
        (_, Some(_)) => Err(CliError::Usage("--config is only used with --grid custom".into())),
        (name, None) => {
            let grid = builtin_grid(name).ok_or_else(|| {
                CliError::Usage(format!("unknown grid '{name}', expected one of {} or custom", BUILTIN_GRIDS.join(", ")))
            })?;
            Ok(grid.with_runs(args.runs.unwrap_or(50) as usize).with_master_seed(args.seed.unwrap_or(0)))
        }
    }
}

pub fn cmd_simulate<W: Write>(args: &SimulateArgs, out: &mut W) -> Result<u8, CliError> {
    let grid = load_grid(args)?;
    let result = run_grid(&grid)?;
    fs::create_dir_all(&args.out).map_err(|source| CliError::Io { path: args.out.clone(), source })?;

    let runs_path = args.out.join(format!("{}_runs.csv", grid.name));
    let summary_path = args.out.join(format!("{}_summary.csv", grid.name));
    let mut runs_buf = Vec::new();
    write_runs_csv(&result, &mut runs_buf)?;
    let mut summary_buf = Vec::new();
    write_summary_csv(&grid.name, &grid.metrics, &result.summaries(), &mut summary_buf)?;
    for (path, bytes) in [(&runs_path, runs_buf), (&summary_path, summary_buf)] {
        fs::write(path, bytes).map_err(|source| CliError::Io { path: path.clone(), source })?;
        writeln!(out, "wrote {}", path.display()).map_err(stdout_err)?;
    }
    Ok(0)
}

pub fn cmd_report<W: Write>(args: &ReportArgs, out: &mut W) -> Result<u8, CliError> {
    let tables = report::load_summaries(&args.input)?;
    for (_, table) in &tables {
        if args.svg {
            for path in report::write_svgs(&args.input, table)? {
                writeln!(out, "wrote {}", path.display()).map_err(stdout_err)?;
            }
        } else {
            out.write_all(report::text_report(table).as_bytes()).map_err(stdout_err)?;
        }
    }
    Ok(0)
}
