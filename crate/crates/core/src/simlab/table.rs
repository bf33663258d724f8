//! CSV layout of grid results. Failed metrics are written as `n/a`.

use std::io::{Read, Write};

use super::grid::{CellSummary, GridResult, MetricSummary, Summary};
use super::scenario::ScenarioConfig;
use crate::error::{Error, Result};
use crate::evaluate::Metric;

pub const MISSING: &str = "n/a";

const CELL_COLUMNS: [&str; 7] = ["grid", "kind", "n", "sigma_t", "sigma_r", "outliers", "volume_rule"];

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| MISSING.to_string(), |x| x.to_string())
}

fn cell_fields(grid: &str, c: &ScenarioConfig) -> Vec<String> {
    vec![
        grid.to_string(),
        c.kind.to_string(),
        c.n.to_string(),
        c.sigma_t.to_string(),
        c.sigma_r.to_string(),
        c.outliers.to_string(),
        c.volume_rule.name().to_string(),
    ]
}

/// One row per run: cell fields, run index, seed, one column per metric.
pub fn write_runs_csv<W: Write>(result: &GridResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = CELL_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(["run".to_string(), "seed".to_string()]);
    header.extend(result.grid.metrics.iter().map(|m| m.name().to_string()));
    w.write_record(&header).map_err(csv_error)?;
    for cell in &result.cells {
        for run in &cell.runs {
            let mut row = cell_fields(&result.grid.name, &cell.summary.config);
            row.extend([run.run.to_string(), run.seed.to_string()]);
            row.extend(run.values.iter().map(|v| fmt_value(*v)));
            w.write_record(&row).map_err(csv_error)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

/// One row per cell with `<metric>_mean`, `_min`, `_max` and `_missing`.
pub fn write_summary_csv<W: Write>(grid: &str, metrics: &[Metric], cells: &[CellSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = CELL_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(["runs".to_string(), "master_seed".to_string()]);
    for m in metrics {
        for suffix in ["mean", "min", "max", "missing"] {
            header.push(format!("{m}_{suffix}"));
        }
    }
    w.write_record(&header).map_err(csv_error)?;
    for cell in cells {
        let mut row = cell_fields(grid, &cell.config);
        row.extend([cell.config.runs.to_string(), cell.config.master_seed.to_string()]);
        for &m in metrics {
            let s = cell.metrics.iter().find(|s| s.metric == m);
            let stats = s.and_then(|s| s.stats);
            row.push(fmt_value(stats.map(|s| s.mean)));
            row.push(fmt_value(stats.map(|s| s.min)));
            row.push(fmt_value(stats.map(|s| s.max)));
            row.push(s.map_or(cell.config.runs, |s| s.missing).to_string());
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

/// Contents of a summary CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryTable {
    pub grid: String,
    pub metrics: Vec<Metric>,
    pub cells: Vec<CellSummary>,
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, name: &str) -> Result<T> {
    let raw = record.get(idx).unwrap_or_default();
    raw.parse().map_err(|_| Error::InvalidArgument(format!("bad value '{raw}' in column {name}")))
}

fn parse_optional(record: &csv::StringRecord, idx: usize, name: &str) -> Result<Option<f64>> {
    match record.get(idx) {
        Some(MISSING) => Ok(None),
        _ => parse_field(record, idx, name).map(Some),
    }
}

/// Reads a file written by [`write_summary_csv`].
pub fn read_summary_csv<R: Read>(input: R) -> Result<SummaryTable> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidArgument(format!("missing column {name}")))
    };
    let fixed: Vec<usize> = CELL_COLUMNS
        .iter()
        .chain(["runs", "master_seed"].iter())
        .map(|c| column(c))
        .collect::<Result<_>>()?;
    let metrics: Vec<Metric> = header
        .iter()
        .filter_map(|h| h.strip_suffix("_mean"))
        .map(str::parse)
        .collect::<Result<_>>()?;
    let metric_columns: Vec<[usize; 4]> = metrics
        .iter()
        .map(|m| {
            Ok([
                column(&format!("{m}_mean"))?,
                column(&format!("{m}_min"))?,
                column(&format!("{m}_max"))?,
                column(&format!("{m}_missing"))?,
            ])
        })
        .collect::<Result<_>>()?;

    let mut grid = String::new();
    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        grid = record.get(fixed[0]).unwrap_or_default().to_string();
        let config = ScenarioConfig {
            kind: parse_field(&record, fixed[1], "kind")?,
            n: parse_field(&record, fixed[2], "n")?,
            sigma_t: parse_field(&record, fixed[3], "sigma_t")?,
            sigma_r: parse_field(&record, fixed[4], "sigma_r")?,
            outliers: parse_field(&record, fixed[5], "outliers")?,
            volume_rule: parse_field(&record, fixed[6], "volume_rule")?,
            runs: parse_field(&record, fixed[7], "runs")?,
            master_seed: parse_field(&record, fixed[8], "master_seed")?,
        };
        let summaries = metrics
            .iter()
            .zip(&metric_columns)
            .map(|(&metric, cols)| {
                let mean = parse_optional(&record, cols[0], "mean")?;
                let min = parse_optional(&record, cols[1], "min")?;
                let max = parse_optional(&record, cols[2], "max")?;
                let stats = match (mean, min, max) {
                    (Some(mean), Some(min), Some(max)) => Some(Summary { mean, min, max }),
                    _ => None,
                };
                Ok(MetricSummary { metric, stats, missing: parse_field(&record, cols[3], "missing")? })
            })
            .collect::<Result<_>>()?;
        cells.push(CellSummary { config, metrics: summaries });
    }
    Ok(SummaryTable { grid, metrics, cells })
}
