//! Summaries of how cell means respond to a scenario parameter.

use super::grid::{Axis, CellSummary};
use crate::evaluate::Metric;

/// Cell means of one metric along the x axis, for one value of the series axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub series: f64,
    /// `(x, mean)` sorted by x; cells where the metric never succeeded are left out.
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn spearman(&self) -> Option<f64> {
        spearman(&self.xs(), &self.means())
    }
}

/// Groups the cells by `series` and orders each group along `x`.
pub fn curves(cells: &[CellSummary], metric: Metric, x: Axis, series: Axis) -> Vec<Curve> {
    let mut out: Vec<Curve> = Vec::new();
    for cell in cells {
        let s = series.value(&cell.config);
        let Some(mean) = cell.mean(metric) else { continue };
        let point = (x.value(&cell.config), mean);
        match out.iter_mut().find(|c| c.series == s) {
            Some(curve) => curve.points.push(point),
            None => out.push(Curve { series: s, points: vec![point] }),
        }
    }
    for curve in &mut out {
        curve.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out.sort_by(|a, b| a.series.total_cmp(&b.series));
    out
}

/// The curve for one series value, if present.
pub fn curve_at(cells: &[CellSummary], metric: Metric, x: Axis, series: Axis, value: f64) -> Option<Curve> {
    curves(cells, metric, x, series).into_iter().find(|c| (c.series - value).abs() < 1e-12)
}

fn varies(cells: &[CellSummary], axis: Axis) -> bool {
    cells.windows(2).any(|w| axis.value(&w[0].config) != axis.value(&w[1].config))
}

/// Horizontal axis and series axis for plotting a grid: outlier count,
/// camera count or rotation noise along x, one curve per noise level.
/// Axes that do not vary are only used when nothing else does.
pub fn infer_layout(cells: &[CellSummary]) -> (Axis, Axis) {
    let x = [Axis::Outliers, Axis::N, Axis::SigmaR, Axis::SigmaT]
        .into_iter()
        .find(|&a| varies(cells, a))
        .unwrap_or(Axis::SigmaT);
    let series = [Axis::SigmaT, Axis::SigmaR, Axis::N, Axis::Outliers]
        .into_iter()
        .find(|&a| a != x && varies(cells, a))
        .unwrap_or(if x == Axis::Outliers { Axis::SigmaT } else { Axis::Outliers });
    (x, series)
}

/// Ranks starting at 1, with tied values sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

/// Spearman rank correlation. `None` for fewer than two points, mismatched
/// lengths or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// `max − min`, or 0 for an empty slice.
pub fn range(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Range divided by the largest magnitude; 0 when all values are zero.
pub fn normalized_range(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        0.0
    } else {
        range(values) / scale
    }
}

/// Relative reduction of the range from `before` to `after`; negative when
/// the range grows.
pub fn range_shrink(before: &[f64], after: &[f64]) -> Option<f64> {
    let r = range(before);
    (r > 0.0).then(|| 1.0 - range(after) / r)
}

/// Population standard deviation over the absolute mean.
pub fn coefficient_of_variation(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean != 0.0).then(|| var.sqrt() / mean.abs())
}

/// Mean Spearman correlation along `x` over all curves; curves without a
/// defined correlation count as 0.
pub fn mean_spearman(curves: &[Curve]) -> Option<f64> {
    if curves.is_empty() {
        return None;
    }
    Some(curves.iter().map(|c| c.spearman().unwrap_or(0.0)).sum::<f64>() / curves.len() as f64)
}
