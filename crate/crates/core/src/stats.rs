//! Order statistics and robust location estimates.

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Linear-interpolation quantile: with `h = (len − 1)·p` on the sorted
/// sample, returns `v[⌊h⌋] + (h − ⌊h⌋)(v[⌊h⌋+1] − v[⌊h⌋])`.
pub fn quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("quantile fraction {p} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, p))
}

pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    match sorted.get(lo + 1) {
        Some(next) if frac > 0.0 => sorted[lo] + frac * (next - sorted[lo]),
        _ => sorted[lo],
    }
}

pub fn median(values: &[f64]) -> Result<f64> {
    quantile(values, 0.5)
}

const WEISZFELD_MAX_ITER: usize = 200;
const WEISZFELD_STEP_TOL: f64 = 1e-10;
const WEISZFELD_MIN_DIST: f64 = 1e-12;

/// Geometric (L1) median by Weiszfeld iteration from the centroid.
///
/// Points closer than 1e-12 to the iterate have their weight capped at 1e12
/// instead of diverging. Since the plain iteration approaches a minimizer
/// lying on an input point only slowly, the input points are also tried as
/// candidates.
pub fn geometric_median(points: &[Vec3]) -> Result<Vec3> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut x = points.iter().sum::<Vec3>() / points.len() as f64;
    for _ in 0..WEISZFELD_MAX_ITER {
        let mut num = Vec3::zeros();
        let mut den = 0.0;
        for p in points {
            let w = 1.0 / (x - p).norm().max(WEISZFELD_MIN_DIST);
            num += p * w;
            den += w;
        }
        let next = num / den;
        let step = (next - x).norm();
        x = next;
        if step < WEISZFELD_STEP_TOL {
            break;
        }
    }
    let mut best = (l1_cost(&x, points), x);
    for p in points {
        let c = l1_cost(p, points);
        if c < best.0 {
            best = (c, *p);
        }
    }
    Ok(best.1)
}

/// Sum of distances from `x` to every point.
pub fn l1_cost(x: &Vec3, points: &[Vec3]) -> f64 {
    points.iter().map(|p| (x - p).norm()).sum()
}

/// Median distance of the points from their geometric median.
pub fn mad_about_median(points: &[Vec3]) -> Result<f64> {
    let center = geometric_median(points)?;
    let distances: Vec<f64> = points.iter().map(|p| (p - center).norm()).collect();
    median(&distances)
}
