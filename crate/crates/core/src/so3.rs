//! Rotation-set alignment: single rotation averaging under the geodesic L1
//! and chordal L2 costs, plus a robust initializer for outlier-heavy sets.
//!
//! Rotations are world-to-camera, so an estimate expressed in a different
//! world frame differs from the ground truth by a right-multiplied gauge
//! `G`: `estᵢ ≈ gtᵢ·G`. The per-camera residuals `Sᵢ = gtᵢ⁻¹·estᵢ` then all
//! cluster at `G`, and aligning amounts to averaging the `Sᵢ`.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{angular_distance, angular_distance_rad, Rotation};
use crate::sim3::project_to_rotation;

/// Gauge rotation and the residual angle of every camera against it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationAlignment {
    pub gauge: Rotation,
    pub residuals_deg: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlignMethod {
    /// Min-sum initializer followed by geodesic Weiszfeld.
    Robust,
    /// Geodesic Weiszfeld initialized at the chordal mean.
    GeodesicL1,
    /// Chordal mean.
    ChordalL2,
}

/// `Sᵢ = gtᵢ⁻¹·estᵢ`.
pub fn relative_rotations(gt: &[Rotation], est: &[Rotation]) -> Result<Vec<Rotation>> {
    if gt.len() != est.len() {
        return Err(Error::LengthMismatch { left: gt.len(), right: est.len() });
    }
    if gt.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(gt.iter().zip(est).map(|(g, e)| g.inverse() * *e).collect())
}

/// Σ geodesic distance (radians) from `center` to every rotation.
pub fn geodesic_cost(center: &Rotation, rotations: &[Rotation]) -> f64 {
    rotations.iter().map(|r| angular_distance_rad(center, r)).sum()
}

const WEISZFELD_MAX_ITER: usize = 1000;
const WEISZFELD_STEP_TOL: f64 = 1e-12;
const WEISZFELD_MIN_DIST: f64 = 1e-6;
const MAX_STEP_HALVINGS: usize = 30;
// cost differences below this are rounding noise near the minimum
const COST_SLACK: f64 = 1e-12;

/// Weiszfeld iteration on SO(3). Returns the final estimate and the cost
/// after every accepted iterate (the first entry is the cost at `init`).
///
/// A step that would raise the cost by more than 1e-12 is halved until it
/// does not; if no halving helps the iteration stops, so the cost sequence
/// never increases beyond that slack.
pub fn geodesic_weiszfeld(rotations: &[Rotation], init: Rotation) -> Result<(Rotation, Vec<f64>)> {
    if rotations.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut g = init;
    let mut cost = geodesic_cost(&g, rotations);
    let mut trace = vec![cost];
    let g_inv = |g: &Rotation| g.inverse();
    for _ in 0..WEISZFELD_MAX_ITER {
        let gi = g_inv(&g);
        let mut num = crate::geom::Vec3::zeros();
        let mut den = 0.0;
        for s in rotations {
            let v = (gi * *s).log();
            let w = 1.0 / v.norm().max(WEISZFELD_MIN_DIST);
            num += v * w;
            den += w;
        }
        let mut step = num / den;
        if step.norm() < WEISZFELD_STEP_TOL {
            break;
        }
        let mut accepted = None;
        for _ in 0..MAX_STEP_HALVINGS {
            let candidate = g * Rotation::exp(&step);
            let c = geodesic_cost(&candidate, rotations);
            if c <= cost + COST_SLACK {
                accepted = Some((candidate, c));
                break;
            }
            step *= 0.5;
        }
        let Some((next, c)) = accepted else { break };
        g = next;
        cost = c;
        trace.push(cost);
        if step.norm() < WEISZFELD_STEP_TOL {
            break;
        }
    }
    Ok((g, trace))
}

/// Geodesic L1 median by Weiszfeld iteration from `init`.
pub fn geodesic_l1_median(rotations: &[Rotation], init: Rotation) -> Result<Rotation> {
    geodesic_weiszfeld(rotations, init).map(|(g, _)| g)
}

/// Arithmetic mean of the rotation matrices projected back onto SO(3).
pub fn chordal_l2_mean(rotations: &[Rotation]) -> Result<Rotation> {
    if rotations.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sum = Matrix3::zeros();
    for r in rotations {
        sum += r.to_matrix();
    }
    let mean = sum / rotations.len() as f64;
    let (r, sv, _) = project_to_rotation(&mean);
    let mut sorted = sv;
    sorted.sort_by(f64::total_cmp);
    // rank ≤ 1 leaves the projection undetermined
    if sorted[1] < 1e-9 {
        return Err(Error::IndeterminateMean);
    }
    Ok(Rotation::from_matrix(&r))
}

/// Index of the rotation with the smallest summed geodesic distance to the
/// others; lowest index wins ties.
pub fn min_sum_index(rotations: &[Rotation]) -> Result<usize> {
    if rotations.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = rotations.len();
    let mut sums = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = angular_distance_rad(&rotations[i], &rotations[j]);
            sums[i] += d;
            sums[j] += d;
        }
    }
    let mut best = 0;
    for (i, s) in sums.iter().enumerate() {
        if *s < sums[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Outlier-robust single rotation average: the min-sum input element as
/// initializer, refined by geodesic Weiszfeld.
pub fn robust_single_rotation_average(rotations: &[Rotation]) -> Result<Rotation> {
    let init = rotations[min_sum_index(rotations)?];
    geodesic_l1_median(rotations, init)
}

/// Geodesic L1 median initialized at the chordal mean, falling back to the
/// min-sum initializer when the chordal mean is indeterminate.
pub fn hartley_l1_average(rotations: &[Rotation]) -> Result<Rotation> {
    let init = match chordal_l2_mean(rotations) {
        Ok(r) => r,
        Err(Error::IndeterminateMean) => rotations[min_sum_index(rotations)?],
        Err(e) => return Err(e),
    };
    geodesic_l1_median(rotations, init)
}

/// Aligns estimated rotations to the ground truth and reports residual angles.
pub fn align_rotations(gt: &[Rotation], est: &[Rotation], method: AlignMethod) -> Result<RotationAlignment> {
    let rel = relative_rotations(gt, est)?;
    let gauge = match method {
        AlignMethod::Robust => robust_single_rotation_average(&rel)?,
        AlignMethod::GeodesicL1 => hartley_l1_average(&rel)?,
        AlignMethod::ChordalL2 => chordal_l2_mean(&rel)?,
    };
    Ok(residuals_against(&rel, gauge))
}

pub fn residuals_against(relative: &[Rotation], gauge: Rotation) -> RotationAlignment {
    let residuals_deg = relative.iter().map(|s| angular_distance(s, &gauge)).collect();
    RotationAlignment { gauge, residuals_deg }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{perturb_rotation, random_rotation, Vec3};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rz(deg: f64) -> Rotation {
        Rotation::from_axis_angle(&Vec3::z(), deg.to_radians())
    }

    #[test]
    fn relative_rotation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gt: Vec<Rotation> = (0..5).map(|_| random_rotation(&mut rng)).collect();
        for s in relative_rotations(&gt, &gt).unwrap() {
            assert!(s.angle_deg() < 1e-9);
        }
        let g = random_rotation(&mut rng);
        let est: Vec<Rotation> = gt.iter().map(|r| *r * g).collect();
        for s in relative_rotations(&gt, &est).unwrap() {
            assert!(angular_distance(&s, &g) < 1e-9);
        }
        let s = relative_rotations(&gt[..1], &[gt[0] * rz(30.0)]).unwrap();
        assert!(angular_distance(&s[0], &rz(30.0)) < 1e-9);
        assert!(relative_rotations(&gt, &est[..2]).is_err());
    }

    #[test]
    fn l1_median_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = random_rotation(&mut rng);
        let m = geodesic_l1_median(&[q; 6], Rotation::identity()).unwrap();
        assert!(angular_distance(&m, &q) < 1e-6);

        let mut set = vec![q; 7];
        set.extend((0..3).map(|_| random_rotation(&mut rng)));
        let m = geodesic_l1_median(&set, chordal_l2_mean(&set).unwrap()).unwrap();
        assert!(angular_distance(&m, &q).to_radians() < 1e-6);

        let pair = [Rotation::identity(), rz(40.0)];
        let m = geodesic_l1_median(&pair, Rotation::identity()).unwrap();
        assert!((geodesic_cost(&m, &pair).to_degrees() - 40.0).abs() < 1e-6);
        assert_eq!(geodesic_l1_median(&[], q), Err(Error::EmptySample));
    }

    #[test]
    fn weiszfeld_cost_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..20 {
            let center = random_rotation(&mut rng);
            let mut set: Vec<Rotation> = (0..40).map(|_| perturb_rotation(&center, 10.0, &mut rng)).collect();
            set.extend((0..trial).map(|_| random_rotation(&mut rng)));
            let (_, trace) = geodesic_weiszfeld(&set, random_rotation(&mut rng)).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn chordal_mean_examples() {
        let q = rz(33.0);
        assert!(angular_distance(&chordal_l2_mean(&[q; 3]).unwrap(), &q) < 1e-9);
        let sym = chordal_l2_mean(&[rz(10.0), rz(-10.0)]).unwrap();
        assert!(sym.angle_deg() < 1e-9);
        // 1-D oracle: the mean of three angles on one axis
        let oracle = (10.0 + 20.0 + 30.0) / 3.0;
        let m = chordal_l2_mean(&[rz(10.0), rz(20.0), rz(30.0)]).unwrap();
        assert!(angular_distance(&m, &rz(oracle)) < 1e-9);
        assert_eq!(chordal_l2_mean(&[Rotation::identity(), rz(180.0)]), Err(Error::IndeterminateMean));
        assert_eq!(chordal_l2_mean(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn chordal_mean_single_axis_matches_circular_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let angles: Vec<f64> = (0..7).map(|_| rand::Rng::random_range(&mut rng, -40.0..40.0)).collect();
            let (s, c) = angles
                .iter()
                .fold((0.0, 0.0), |(s, c), a: &f64| (s + a.to_radians().sin(), c + a.to_radians().cos()));
            let circular = s.atan2(c).to_degrees();
            let rots: Vec<Rotation> = angles.iter().map(|a| rz(*a)).collect();
            let m = chordal_l2_mean(&rots).unwrap();
            assert!(angular_distance(&m, &rz(circular)) < 1e-9);
        }
    }

    #[test]
    fn robust_average_recovers_majority() {
        let q = rz(17.0) * Rotation::from_axis_angle(&Vec3::x(), 0.4);
        assert!(angular_distance(&robust_single_rotation_average(&[q; 5]).unwrap(), &q) < 1e-9);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let mut set = vec![q; 60];
            set.extend((0..40).map(|_| random_rotation(&mut rng)));
            let m = robust_single_rotation_average(&set).unwrap();
            assert!(angular_distance(&m, &q) < 0.5);
        }
    }

    #[test]
    fn robust_average_with_noise_and_outliers() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let q = random_rotation(&mut rng);
            let mut set: Vec<Rotation> = (0..70).map(|_| perturb_rotation(&q, 3.0, &mut rng)).collect();
            set.extend((0..30).map(|_| random_rotation(&mut rng)));
            let m = robust_single_rotation_average(&set).unwrap();
            assert!(angular_distance(&m, &q) < 1.5);
        }
    }

    #[test]
    fn alignment_is_right_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gt: Vec<Rotation> = (0..50).map(|_| random_rotation(&mut rng)).collect();
        let mut est: Vec<Rotation> = gt.iter().map(|r| perturb_rotation(r, 4.0, &mut rng)).collect();
        for e in est.iter_mut().take(12) {
            *e = random_rotation(&mut rng);
        }
        let g0 = random_rotation(&mut rng);
        let shifted: Vec<Rotation> = est.iter().map(|r| *r * g0).collect();
        for method in [AlignMethod::Robust, AlignMethod::GeodesicL1, AlignMethod::ChordalL2] {
            let a = align_rotations(&gt, &est, method).unwrap();
            let b = align_rotations(&gt, &shifted, method).unwrap();
            assert!(angular_distance(&(a.gauge * g0), &b.gauge) < 1e-7);
            for (x, y) in a.residuals_deg.iter().zip(&b.residuals_deg) {
                assert!((x - y).abs() < 1e-9, "{method:?}: {x} vs {y}");
                assert!((0.0..=180.0).contains(x));
            }
        }
    }
}
