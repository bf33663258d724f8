//! Comparison metrics: ATE, DTE, DRE, mAA and aligned angular-error
//! statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{angular_distance, Rotation, Vec3};
use crate::sim3::{project_to_rotation, umeyama};
use crate::so3::{align_rotations, hartley_l1_average, relative_rotations, residuals_against, AlignMethod};
use crate::stats::{geometric_median, mad_about_median, median};

pub const DEFAULT_DTE_WINSOR: f64 = 1.0;
pub const DEFAULT_DRE_TAU_DEG: f64 = 90.0;
pub const MAA_THRESHOLDS_DEG: [f64; 10] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
/// Tag for the concrete DTE/DRE construction implemented here.
pub const DTE_INSTANTIATION: &str = "v1";

const MIN_BASELINE: f64 = 1e-9;

/// Absolute trajectory error: RMSE of positions after least-squares rigid
/// (or, with `with_scale`, similarity) alignment.
pub fn ate(gt: &[Vec3], est: &[Vec3], with_scale: bool) -> Result<f64> {
    if gt.len() != est.len() {
        return Err(Error::LengthMismatch { left: gt.len(), right: est.len() });
    }
    if gt.len() < 2 {
        return Err(Error::TooFewPoints { need: 2, got: gt.len() });
    }
    let t = umeyama(est, gt, with_scale)?;
    let sse: f64 = est.iter().zip(gt).map(|(e, g)| (t.apply(e) - g).norm_squared()).sum();
    Ok((sse / gt.len() as f64).sqrt())
}

/// Mean of errors clamped at `tau`.
pub fn winsorized_mean(errors: &[f64], tau: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(errors.iter().map(|e| e.min(tau)).sum::<f64>() / errors.len() as f64)
}

/// Error stage of the DTE for an estimate already aligned to `gt`: errors
/// winsorized at `k_w·MAD(gt)`, averaged, and normalized by `MAD(gt)`.
pub fn dte_aligned(gt: &[Vec3], aligned: &[Vec3], k_w: f64) -> Result<f64> {
    if gt.len() != aligned.len() {
        return Err(Error::LengthMismatch { left: gt.len(), right: aligned.len() });
    }
    if !(k_w > 0.0) {
        return Err(Error::InvalidArgument("winsorization constant must be positive".into()));
    }
    let mad = mad_about_median(gt)?;
    if !(mad > 0.0) {
        return Err(Error::ZeroMad);
    }
    let errors: Vec<f64> = gt.iter().zip(aligned).map(|(g, a)| (g - a).norm()).collect();
    Ok(winsorized_mean(&errors, k_w * mad)? / mad)
}

/// Rotation minimizing `Σ‖R·xᵢ − yᵢ‖` by iteratively reweighted Kabsch.
fn l1_rotation(source: &[Vec3], target: &[Vec3]) -> Rotation {
    let mut weights = vec![1.0; source.len()];
    let mut r = nalgebra::Matrix3::identity();
    for _ in 0..100 {
        let mut h = nalgebra::Matrix3::zeros();
        for ((x, y), w) in source.iter().zip(target).zip(&weights) {
            h += y * x.transpose() * *w;
        }
        let (next, _, _) = project_to_rotation(&h);
        let change = (next - r).norm();
        r = next;
        for ((x, y), w) in source.iter().zip(target).zip(weights.iter_mut()) {
            *w = 1.0 / (r * x - y).norm().max(1e-9);
        }
        if change < 1e-12 {
            break;
        }
    }
    Rotation::from_matrix(&r)
}

/// Discernible trajectory error.
///
/// Both trajectories are centred on their geometric medians, the estimate is
/// scaled so its MAD matches the ground truth's and rotated by the L1
/// rotation average of the per-camera residual rotations (or, when no
/// rotations are given, by the rotation minimizing the L1 position
/// residual). The result is [`dte_aligned`] on the aligned estimate.
pub fn dte(
    gt: &[Vec3],
    est: &[Vec3],
    rotations: Option<(&[Rotation], &[Rotation])>,
    k_w: f64,
) -> Result<f64> {
    if gt.len() != est.len() {
        return Err(Error::LengthMismatch { left: gt.len(), right: est.len() });
    }
    if gt.len() < 4 {
        return Err(Error::TooFewPoints { need: 4, got: gt.len() });
    }
    let gt_center = geometric_median(gt)?;
    let est_center = geometric_median(est)?;
    let gt_c: Vec<Vec3> = gt.iter().map(|p| p - gt_center).collect();
    let est_c: Vec<Vec3> = est.iter().map(|p| p - est_center).collect();

    let gt_mad = mad_about_median(gt)?;
    let est_mad = mad_about_median(est)?;
    if !(gt_mad > 0.0 && est_mad > 0.0) {
        return Err(Error::ZeroMad);
    }
    let scale = gt_mad / est_mad;
    let est_s: Vec<Vec3> = est_c.iter().map(|p| p * scale).collect();

    let gauge = match rotations {
        Some((gt_rot, est_rot)) => {
            if gt_rot.len() != gt.len() || est_rot.len() != est.len() {
                return Err(Error::LengthMismatch { left: gt_rot.len(), right: est_rot.len() });
            }
            hartley_l1_average(&relative_rotations(gt_rot, est_rot)?)?
        }
        None => l1_rotation(&est_s, &gt_c),
    };
    let aligned: Vec<Vec3> = est_s.iter().map(|p| gauge.rotate(p)).collect();
    dte_aligned(&gt_c, &aligned, k_w)
}

/// Mean of residual angles clamped at `tau_deg`.
pub fn dre_from_residuals(residuals_deg: &[f64], tau_deg: f64) -> Result<f64> {
    winsorized_mean(residuals_deg, tau_deg)
}

/// Discernible rotation error: geodesic L1 alignment, then the winsorized
/// mean residual angle in degrees.
pub fn dre(gt: &[Rotation], est: &[Rotation], tau_deg: f64) -> Result<f64> {
    if !(tau_deg > 0.0) {
        return Err(Error::InvalidArgument("DRE threshold must be positive".into()));
    }
    let rel = relative_rotations(gt, est)?;
    let gauge = hartley_l1_average(&rel)?;
    dre_from_residuals(&residuals_against(&rel, gauge).residuals_deg, tau_deg)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaaResult {
    pub value: f64,
    /// Accuracy at each of [`MAA_THRESHOLDS_DEG`].
    pub accuracies: Vec<f64>,
    pub pairs: usize,
}

/// Angle between two vectors in degrees.
fn vector_angle_deg(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

/// Pairwise relative-pose errors: `max(rotation error, translation-direction
/// error)` for every pair `i < j` whose ground-truth baseline is non-zero.
pub fn maa_pair_errors(gt_pos: &[Vec3], gt_rot: &[Rotation], est_pos: &[Vec3], est_rot: &[Rotation]) -> Result<Vec<f64>> {
    let n = gt_pos.len();
    for len in [gt_rot.len(), est_pos.len(), est_rot.len()] {
        if len != n {
            return Err(Error::LengthMismatch { left: n, right: len });
        }
    }
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    let gt_m: Vec<_> = gt_rot.iter().map(Rotation::to_matrix).collect();
    let est_m: Vec<_> = est_rot.iter().map(Rotation::to_matrix).collect();
    let mut errors = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let gt_inv = gt_rot[i].inverse();
        let est_inv = est_rot[i].inverse();
        for j in (i + 1)..n {
            let gt_base = gt_pos[j] - gt_pos[i];
            if gt_base.norm() < MIN_BASELINE {
                continue;
            }
            let est_base = est_pos[j] - est_pos[i];
            let rot_err = angular_distance(&(gt_rot[j] * gt_inv), &(est_rot[j] * est_inv));
            let dir_err = if est_base.norm() < MIN_BASELINE {
                180.0
            } else {
                vector_angle_deg(&(gt_m[i] * gt_base), &(est_m[i] * est_base))
            };
            errors.push(rot_err.max(dir_err));
        }
    }
    if errors.is_empty() {
        return Err(Error::NoUsablePairs);
    }
    Ok(errors)
}

/// Mean of the accuracies at 1°, 2°, …, 10°.
pub fn maa_from_pair_errors(errors: &[f64]) -> Result<MaaResult> {
    if errors.is_empty() {
        return Err(Error::NoUsablePairs);
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let accuracies: Vec<f64> = MAA_THRESHOLDS_DEG
        .iter()
        .map(|t| sorted.partition_point(|e| e <= t) as f64 / sorted.len() as f64)
        .collect();
    let value = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    Ok(MaaResult { value, accuracies, pairs: sorted.len() })
}

/// Mean average accuracy over all camera pairs.
pub fn maa(gt_pos: &[Vec3], gt_rot: &[Rotation], est_pos: &[Vec3], est_rot: &[Rotation]) -> Result<MaaResult> {
    maa_from_pair_errors(&maa_pair_errors(gt_pos, gt_rot, est_pos, est_rot)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Norm {
    L1,
    L2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleStats {
    pub median: f64,
    pub mean: f64,
    pub rms: f64,
}

pub fn angle_stats(residuals_deg: &[f64]) -> Result<AngleStats> {
    let median = median(residuals_deg)?;
    let n = residuals_deg.len() as f64;
    let mean = residuals_deg.iter().sum::<f64>() / n;
    let rms = (residuals_deg.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    Ok(AngleStats { median, mean, rms })
}

/// Median, mean and RMS of residual angles after geodesic L1 (`Norm::L1`)
/// or chordal L2 (`Norm::L2`) alignment.
pub fn aligned_angle_stats(gt: &[Rotation], est: &[Rotation], norm: Norm) -> Result<AngleStats> {
    let method = match norm {
        Norm::L1 => AlignMethod::GeodesicL1,
        Norm::L2 => AlignMethod::ChordalL2,
    };
    angle_stats(&align_rotations(gt, est, method)?.residuals_deg)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BaselineReport {
    pub ate: Option<f64>,
    pub dte: Option<f64>,
    pub dre: Option<f64>,
    pub maa: Option<f64>,
    pub stats_l1: Option<AngleStats>,
    pub stats_l2: Option<AngleStats>,
    pub dte_winsor: f64,
    pub dre_tau_deg: f64,
    pub maa_thresholds_deg: Vec<f64>,
    pub dte_instantiation: String,
}

impl BaselineReport {
    pub fn new(dte_winsor: f64, dre_tau_deg: f64) -> Self {
        BaselineReport {
            dte_winsor,
            dre_tau_deg,
            maa_thresholds_deg: MAA_THRESHOLDS_DEG.to_vec(),
            dte_instantiation: DTE_INSTANTIATION.into(),
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{perturb_rotation, random_rotation};
    use crate::sim3::SimilarityTransform;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poses(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec3>, Vec<Rotation>) {
        let pos = (0..n).map(|_| Vec3::new(rng.random(), rng.random(), rng.random()) - Vec3::repeat(0.5)).collect();
        let rot = (0..n).map(|_| random_rotation(rng)).collect();
        (pos, rot)
    }

    /// Moves both trajectories into another world frame: positions by `g`,
    /// world-to-camera rotations by right multiplication with `g.R⁻¹`.
    fn regauge(pos: &[Vec3], rot: &[Rotation], g: &SimilarityTransform) -> (Vec<Vec3>, Vec<Rotation>) {
        let inv = g.rotation.inverse();
        (pos.iter().map(|p| g.apply(p)).collect(), rot.iter().map(|r| *r * inv).collect())
    }

    #[test]
    fn ate_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (gt, _) = random_poses(&mut rng, 20);
        assert!(ate(&gt, &gt, false).unwrap() < 1e-12);
        let shifted: Vec<Vec3> = gt.iter().map(|p| p + Vec3::new(4.0, -2.0, 1.0)).collect();
        assert!(ate(&gt, &shifted, false).unwrap() < 1e-12);
        let est = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)];
        let gt2 = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)];
        assert!((ate(&gt2, &est, false).unwrap() - 0.5).abs() < 1e-12);
        assert!(ate(&gt2, &est, true).unwrap() < 1e-12);
        assert!(ate(&gt2[..1], &est[..1], false).is_err());
    }

    #[test]
    fn ate_zero_iff_rigid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (gt, _) = random_poses(&mut rng, 30);
        let g = SimilarityTransform::new(1.0, random_rotation(&mut rng), Vec3::new(1.0, 1.0, -3.0)).unwrap();
        let rigid: Vec<Vec3> = gt.iter().map(|p| g.apply(p)).collect();
        assert!(ate(&gt, &rigid, false).unwrap() < 1e-9);
        let mut bent = rigid.clone();
        bent[3] += Vec3::new(0.01, 0.0, 0.0);
        assert!(ate(&gt, &bent, false).unwrap() > 1e-4);
    }

    #[test]
    fn dte_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (gt, rot) = random_poses(&mut rng, 25);
        assert!(dte(&gt, &gt, Some((&rot, &rot)), 1.0).unwrap() < 1e-12);
        assert!(dte(&gt, &gt, None, 1.0).unwrap() < 1e-9);

        let line: Vec<Vec3> = (0..5).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let mut est = line.clone();
        est[4] += Vec3::new(0.0, 10.0, 0.0);
        let v = dte_aligned(&line, &est, 1.0).unwrap();
        assert!((v - 0.2).abs() < 1e-9, "{v}");
        est[4] += Vec3::new(0.0, 100.0, 0.0);
        assert!((dte_aligned(&line, &est, 1.0).unwrap() - v).abs() < 1e-12);
        assert!(dte(&gt[..3], &gt[..3], None, 1.0).is_err());
    }

    #[test]
    fn dte_gauge_free_alignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (gt, rot) = random_poses(&mut rng, 40);
        let g = SimilarityTransform::new(3.0, random_rotation(&mut rng), Vec3::new(2.0, 0.0, 5.0)).unwrap();
        let (pos_g, rot_g) = regauge(&gt, &rot, &g);
        assert!(dte(&gt, &pos_g, Some((&rot, &rot_g)), 1.0).unwrap() < 1e-9);
        assert!(dte(&gt, &pos_g, None, 1.0).unwrap() < 1e-6);
    }

    #[test]
    fn dre_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, rot) = random_poses(&mut rng, 10);
        assert!(dre(&rot, &rot, 90.0).unwrap() < 1e-9);
        assert_eq!(dre_from_residuals(&[120.0, 95.0, 179.0], 90.0).unwrap(), 90.0);
        assert_eq!(dre_from_residuals(&[10.0, 170.0], 90.0).unwrap(), 50.0);
        assert!(dre(&[], &[], 90.0).is_err());
    }

    #[test]
    fn maa_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (pos, rot) = random_poses(&mut rng, 15);
        let r = maa(&pos, &rot, &pos, &rot).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.pairs, 105);

        // one pair with max(5°, 2°) = 5°
        let single = maa_from_pair_errors(&[5.0]).unwrap();
        assert!((single.value - 0.6).abs() < 1e-12);
        assert_eq!(maa_from_pair_errors(&[11.0, 45.0]).unwrap().value, 0.0);
        assert!(maa(&pos[..1], &rot[..1], &pos[..1], &rot[..1]).is_err());
        let same = vec![Vec3::zeros(); 4];
        assert_eq!(maa(&same, &rot[..4], &same, &rot[..4]).unwrap_err(), Error::NoUsablePairs);
    }

    #[test]
    fn maa_two_camera_construction() {
        // camera 1 rotated by 5° relative to the truth, baseline direction off by 2°
        let gt_pos = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)];
        let gt_rot = [Rotation::identity(), Rotation::identity()];
        let est_rot = [Rotation::identity(), Rotation::from_axis_angle(&Vec3::x(), 5f64.to_radians())];
        let est_pos = [Vec3::zeros(), Vec3::new(2f64.to_radians().cos(), 2f64.to_radians().sin(), 0.0)];
        let errors = maa_pair_errors(&gt_pos, &gt_rot, &est_pos, &est_rot).unwrap();
        assert!((errors[0] - 5.0).abs() < 1e-9);
        let r = maa_from_pair_errors(&errors).unwrap();
        assert!((r.value - 0.6).abs() < 1e-12);
        assert!(r.accuracies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn maa_independent_gauges() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (gt, rot) = random_poses(&mut rng, 30);
        let est_rot: Vec<Rotation> = rot.iter().map(|r| perturb_rotation(r, 3.0, &mut rng)).collect();
        let est: Vec<Vec3> = gt.iter().map(|p| p + Vec3::new(rng.random(), rng.random(), rng.random()) * 0.05).collect();
        let base = maa_pair_errors(&gt, &rot, &est, &est_rot).unwrap();
        let g1 = SimilarityTransform::new(2.0, random_rotation(&mut rng), Vec3::new(1.0, 2.0, 3.0)).unwrap();
        let g2 = SimilarityTransform::new(0.3, random_rotation(&mut rng), Vec3::new(-5.0, 0.0, 1.0)).unwrap();
        let (gt_g, rot_g) = regauge(&gt, &rot, &g1);
        let (est_g, est_rot_g) = regauge(&est, &est_rot, &g2);
        let moved = maa_pair_errors(&gt_g, &rot_g, &est_g, &est_rot_g).unwrap();
        for (a, b) in base.iter().zip(&moved) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn angle_stat_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (_, rot) = random_poses(&mut rng, 12);
        for norm in [Norm::L1, Norm::L2] {
            let s = aligned_angle_stats(&rot, &rot, norm).unwrap();
            assert!(s.median < 1e-6 && s.mean < 1e-6 && s.rms < 1e-6);
        }
        let s = angle_stats(&[3.0, 4.0]).unwrap();
        assert_eq!((s.median, s.mean), (3.5, 3.5));
        assert!((s.rms - 12.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rms_dominates_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (_, gt) = random_poses(&mut rng, 20);
            let est: Vec<Rotation> = gt.iter().map(|r| perturb_rotation(r, 20.0, &mut rng)).collect();
            for norm in [Norm::L1, Norm::L2] {
                let s = aligned_angle_stats(&gt, &est, norm).unwrap();
                assert!(s.rms >= s.mean && s.mean >= 0.0);
                assert!(s.median <= 180.0 && s.rms <= 180.0);
            }
        }
    }
}
