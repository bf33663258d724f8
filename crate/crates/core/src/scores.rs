//! Alignment scores: translation (TAS), rotation (RAS) and pose (PAS).
//!
//! Both TAS and RAS share one kernel: errors are counted against 100
//! uniformly spaced thresholds `τₖ = k·max/100`, and the cumulative counts
//! are summed and normalized so a perfect estimate scores exactly 1. For TAS
//! the maximum threshold is `d`, the upper quartile of the ground-truth
//! nearest-neighbour distances; for RAS it is 10°.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Rotation, Vec3};
use crate::sim3::{closest_pair_upper_quartile, register_robust, residuals, Registration, RegistrationConfig, SimilarityTransform};
use crate::so3::{relative_rotations, residuals_against, robust_single_rotation_average};

pub const BIN_COUNT: usize = 100;
pub const RAS_MAX_THRESHOLD_DEG: f64 = 10.0;
pub const DEFAULT_ALPHA: f64 = 0.5;

/// Cumulative error counts at `BIN_COUNT` uniform thresholds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CumulativeHistogram {
    pub thresholds: Vec<f64>,
    /// `counts[k] = #{i : eᵢ ≤ thresholds[k]}`.
    pub counts: Vec<usize>,
    pub total: usize,
}

impl CumulativeHistogram {
    pub fn fractions(&self) -> impl Iterator<Item = f64> + '_ {
        self.counts.iter().map(move |&c| c as f64 / self.total as f64)
    }

    /// CSV with columns `threshold,cumulative_count,cumulative_fraction`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "threshold,cumulative_count,cumulative_fraction")?;
        for ((t, c), f) in self.thresholds.iter().zip(&self.counts).zip(self.fractions()) {
            writeln!(out, "{t},{c},{f}")?;
        }
        Ok(())
    }
}

/// k-th threshold (1-based) for a given maximum.
pub fn threshold(k: usize, max_threshold: f64) -> f64 {
    k as f64 * max_threshold / BIN_COUNT as f64
}

/// Score in `[0, 1]` from non-negative errors: `Σₖ fₖ / (100·n)`.
pub fn score_from_errors(errors: &[f64], max_threshold: f64) -> Result<(f64, CumulativeHistogram)> {
    if errors.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(max_threshold > 0.0) || !max_threshold.is_finite() {
        return Err(Error::InvalidArgument(format!("max threshold must be positive, got {max_threshold}")));
    }
    if errors.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::InvalidArgument("errors must be non-negative".into()));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let thresholds: Vec<f64> = (1..=BIN_COUNT).map(|k| threshold(k, max_threshold)).collect();
    let counts: Vec<usize> = thresholds.iter().map(|t| sorted.partition_point(|e| e <= t)).collect();
    let sum: usize = counts.iter().sum();
    let score = sum as f64 / (BIN_COUNT * errors.len()) as f64;
    Ok((score, CumulativeHistogram { thresholds, counts, total: errors.len() }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TasConfig {
    pub registration: RegistrationConfig,
    /// Multiplier on `d` for the maximum threshold (1 by default).
    pub threshold_multiplier: f64,
}

impl Default for TasConfig {
    fn default() -> Self {
        TasConfig { registration: RegistrationConfig::default(), threshold_multiplier: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TasResult {
    pub score: f64,
    pub d: f64,
    pub errors: Vec<f64>,
    pub histogram: CumulativeHistogram,
    pub registration: Registration,
}

/// Translation Alignment Score. Uses positions only.
pub fn tas(gt: &[Vec3], est: &[Vec3], cfg: &TasConfig) -> Result<TasResult> {
    if gt.len() != est.len() {
        return Err(Error::LengthMismatch { left: gt.len(), right: est.len() });
    }
    if gt.len() < 4 {
        return Err(Error::TooFewPoints { need: 4, got: gt.len() });
    }
    if !(cfg.threshold_multiplier > 0.0) {
        return Err(Error::InvalidArgument("threshold multiplier must be positive".into()));
    }
    let d = closest_pair_upper_quartile(gt)?;
    let registration = register_robust(est, gt, &cfg.registration)?;
    let errors = residuals(&registration.transform, est, gt);
    let (score, histogram) = score_from_errors(&errors, d * cfg.threshold_multiplier)?;
    Ok(TasResult { score, d, errors, histogram, registration })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RasResult {
    pub score: f64,
    pub gauge: Rotation,
    pub errors_deg: Vec<f64>,
    pub histogram: CumulativeHistogram,
}

/// Rotation Alignment Score. Uses rotations only.
pub fn ras(gt: &[Rotation], est: &[Rotation], max_threshold_deg: f64) -> Result<RasResult> {
    let rel = relative_rotations(gt, est)?;
    let gauge = robust_single_rotation_average(&rel)?;
    let alignment = residuals_against(&rel, gauge);
    let (score, histogram) = score_from_errors(&alignment.residuals_deg, max_threshold_deg)?;
    Ok(RasResult { score, gauge, errors_deg: alignment.residuals_deg, histogram })
}

/// `α·TAS + (1 − α)·RAS`; `α = 0.5` is the plain average.
pub fn pas(tas: f64, ras: f64, alpha: f64) -> Result<f64> {
    for (name, v) in [("tas", tas), ("ras", ras), ("alpha", alpha)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("{name} = {v} outside [0, 1]")));
        }
    }
    Ok(alpha * tas + (1.0 - alpha) * ras)
}

/// Everything behind a TAS/RAS/PAS evaluation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ScoreReport {
    pub tas: Option<f64>,
    pub ras: Option<f64>,
    pub pas: Option<f64>,
    pub alpha: f64,
    pub d: Option<f64>,
    pub translation_errors: Vec<f64>,
    pub rotation_errors_deg: Vec<f64>,
    pub translation_histogram: Option<CumulativeHistogram>,
    pub rotation_histogram: Option<CumulativeHistogram>,
    pub alignment: Option<SimilarityTransform>,
    pub rotation_gauge: Option<Rotation>,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

impl ScoreReport {
    pub fn from_parts(tas: Option<&TasResult>, ras: Option<&RasResult>, alpha: f64) -> Result<Self> {
        let mut report = ScoreReport { alpha, ..Default::default() };
        if let Some(t) = tas {
            report.tas = Some(t.score);
            report.d = Some(t.d);
            report.translation_errors = t.errors.clone();
            report.translation_histogram = Some(t.histogram.clone());
            report.alignment = Some(t.registration.transform);
            report.seed = Some(t.registration.seed);
            if t.registration.fallback {
                report.warnings.push("registration fell back to least squares over all cameras".into());
            }
        }
        if let Some(r) = ras {
            report.ras = Some(r.score);
            report.rotation_errors_deg = r.errors_deg.clone();
            report.rotation_histogram = Some(r.histogram.clone());
            report.rotation_gauge = Some(r.gauge);
        }
        if let (Some(t), Some(r)) = (tas, ras) {
            report.pas = Some(pas(t.score, r.score, alpha)?);
        }
        Ok(report)
    }
}
