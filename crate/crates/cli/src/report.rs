//! Charts and text tables from simulation summaries.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use trajkit::simlab::analysis::infer_layout;
use trajkit::simlab::{read_summary_csv, Axis, CellSummary, SummaryTable};
use trajkit::Metric;

use crate::error::CliError;
use crate::plot::{Plot, Point, Series};

pub const SUMMARY_SUFFIX: &str = "_summary.csv";

/// Every `*_summary.csv` in `dir`, sorted by file name.
pub fn load_summaries(dir: &Path) -> Result<Vec<(PathBuf, SummaryTable)>, CliError> {
    let io_err = |source| CliError::Io { path: dir.to_path_buf(), source };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err)?;
    paths.retain(|p| p.is_file() && p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(SUMMARY_SUFFIX)));
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Data { path: dir.to_path_buf(), message: format!("no *{SUMMARY_SUFFIX} files") });
    }
    paths
        .into_iter()
        .map(|path| {
            let file = fs::File::open(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            let table = read_summary_csv(file).map_err(|e| CliError::Data { path: path.clone(), message: e.to_string() })?;
            if table.cells.is_empty() {
                return Err(CliError::Data { path, message: "summary has no rows".into() });
            }
            if table.metrics.is_empty() {
                return Err(CliError::Data { path, message: "summary has no metric columns".into() });
            }
            Ok((path, table))
        })
        .collect()
}

fn axis_value(axis: Axis, v: f64) -> String {
    match axis {
        Axis::SigmaT => format!("σt={v}"),
        Axis::SigmaR => format!("σr={v}°"),
        Axis::Outliers => format!("outliers={v}"),
        Axis::N => format!("n={v}"),
    }
}

fn distinct(cells: &[&CellSummary], axis: Axis) -> Vec<f64> {
    let mut values: Vec<f64> = cells.iter().map(|c| axis.value(&c.config)).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

/// Series label: the series value plus any other non-x parameter that
/// varies across the grid but is fixed within this series.
fn series_label(all: &[&CellSummary], group: &[&CellSummary], x: Axis, series: Axis, value: f64) -> String {
    let mut parts = vec![axis_value(series, value)];
    for axis in [Axis::SigmaT, Axis::SigmaR, Axis::N, Axis::Outliers] {
        if axis == x || axis == series || distinct(all, axis).len() < 2 {
            continue;
        }
        if let [only] = distinct(group, axis)[..] {
            parts.push(axis_value(axis, only));
        }
    }
    parts.join(", ")
}

/// One chart per metric of the table, laid out by [`infer_layout`].
pub fn plots(table: &SummaryTable) -> Vec<(Metric, Plot)> {
    let (x, series) = infer_layout(&table.cells);
    let all: Vec<&CellSummary> = table.cells.iter().collect();
    let xs = distinct(&all, x);
    let series_values = distinct(&all, series);
    table
        .metrics
        .iter()
        .map(|&metric| {
            let series_list = series_values
                .iter()
                .map(|&s| {
                    let group: Vec<&CellSummary> =
                        all.iter().copied().filter(|c| series.value(&c.config) == s).collect();
                    let mut points: Vec<Point> = group
                        .iter()
                        .filter_map(|c| {
                            let stats = c.metrics.iter().find(|m| m.metric == metric)?.stats?;
                            let xi = xs.iter().position(|&v| v == x.value(&c.config))?;
                            Some(Point { x: xi, mean: stats.mean, min: stats.min, max: stats.max })
                        })
                        .collect();
                    points.sort_by_key(|p| p.x);
                    Series { label: series_label(&all, &group, x, series, s), points }
                })
                .collect();
            let plot = Plot {
                title: format!("{}: {}", table.grid, metric.label()),
                x_label: x.label().to_string(),
                y_label: metric.label().to_string(),
                categories: xs.iter().map(|v| v.to_string()).collect(),
                series: series_list,
            };
            (metric, plot)
        })
        .collect()
}

/// Writes `<grid>_<metric>.svg` into `dir` for every metric of the table.
pub fn write_svgs(dir: &Path, table: &SummaryTable) -> Result<Vec<PathBuf>, CliError> {
    plots(table)
        .into_iter()
        .map(|(metric, plot)| {
            let path = dir.join(format!("{}_{}.svg", table.grid, metric.name()));
            fs::write(&path, plot.render()).map_err(|source| CliError::Io { path: path.clone(), source })?;
            Ok(path)
        })
        .collect()
}

/// Cell means as plain text, one block per metric.
pub fn text_report(table: &SummaryTable) -> String {
    let mut out = String::new();
    for (metric, plot) in plots(table) {
        let _ = writeln!(out, "{} [{}] mean by {}", table.grid, metric.label(), plot.x_label);
        let label_width = plot.series.iter().map(|s| s.label.chars().count()).max().unwrap_or(0).max(6);
        let _ = write!(out, "{:label_width$}", "");
        for c in &plot.categories {
            let _ = write!(out, " {c:>10}");
        }
        out.push('\n');
        for s in &plot.series {
            let pad = label_width - s.label.chars().count();
            let _ = write!(out, "{}{}", s.label, " ".repeat(pad));
            for i in 0..plot.categories.len() {
                match s.points.iter().find(|p| p.x == i) {
                    Some(p) => {
                        let _ = write!(out, " {:>10.4}", p.mean);
                    }
                    None => {
                        let _ = write!(out, " {:>10}", "n/a");
                    }
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
