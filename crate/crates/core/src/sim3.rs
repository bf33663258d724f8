//! Similarity-transform estimation: closed-form least squares and the
//! hypothesize-and-test registration used by the translation score.

use nalgebra::Matrix3;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Rotation, Vec3};
use crate::stats::quantile;

/// `x ↦ s·R·x + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl SimilarityTransform {
    pub fn identity() -> Self {
        SimilarityTransform { scale: 1.0, rotation: Rotation::identity(), translation: Vec3::zeros() }
    }

    pub fn new(scale: f64, rotation: Rotation, translation: Vec3) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        Ok(SimilarityTransform { scale, rotation, translation })
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        self.rotation.rotate(x) * self.scale + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &SimilarityTransform) -> SimilarityTransform {
        SimilarityTransform {
            scale: self.scale * other.scale,
            rotation: self.rotation * other.rotation,
            translation: self.apply(&other.translation),
        }
    }

    pub fn inverse(&self) -> SimilarityTransform {
        let rotation = self.rotation.inverse();
        let scale = 1.0 / self.scale;
        SimilarityTransform { scale, rotation, translation: -(rotation.rotate(&self.translation) * scale) }
    }

    /// Dense form for applying the transform to many points.
    fn linear_part(&self) -> Matrix3<f64> {
        self.rotation.to_matrix() * self.scale
    }
}

/// Projects `m` to the closest rotation in the Frobenius sense (`U·S·Vᵀ`
/// with the smallest singular direction flipped when needed). Returns the
/// rotation, the singular values and the sign-corrected trace `tr(D·S)`.
pub(crate) fn project_to_rotation(m: &Matrix3<f64>) -> (Matrix3<f64>, [f64; 3], f64) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let sv = svd.singular_values;
    let smallest = (0..3).min_by(|&a, &b| sv[a].total_cmp(&sv[b])).unwrap_or(2);
    let mut s = Matrix3::identity();
    let flip = u.determinant() * v_t.determinant() < 0.0;
    if flip {
        s[(smallest, smallest)] = -1.0;
    }
    let trace: f64 = (0..3).map(|i| sv[i] * s[(i, i)]).sum();
    (u * s * v_t, [sv[0], sv[1], sv[2]], trace)
}

/// Least-squares similarity (or rigid, when `with_scale` is false) transform
/// minimizing `Σ‖s·R·xᵢ + t − yᵢ‖²`.
pub fn umeyama(source: &[Vec3], target: &[Vec3], with_scale: bool) -> Result<SimilarityTransform> {
    if source.len() != target.len() {
        return Err(Error::LengthMismatch { left: source.len(), right: target.len() });
    }
    if source.len() < 2 {
        return Err(Error::TooFewPoints { need: 2, got: source.len() });
    }
    let n = source.len() as f64;
    let mu_x = source.iter().sum::<Vec3>() / n;
    let mu_y = target.iter().sum::<Vec3>() / n;

    let mut var_x = 0.0;
    let mut cov = Matrix3::zeros();
    for (x, y) in source.iter().zip(target) {
        let dx = x - mu_x;
        var_x += dx.norm_squared();
        cov += (y - mu_y) * dx.transpose();
    }
    var_x /= n;
    cov /= n;

    let extent = source.iter().map(|x| x.amax()).fold(1.0, f64::max);
    if var_x <= (1e-12 * extent).powi(2) {
        return Err(Error::DegenerateSource);
    }

    let (r, _, trace) = project_to_rotation(&cov);
    let scale = if with_scale { trace / var_x } else { 1.0 };
    if !(scale > 0.0) {
        return Err(Error::DegenerateSource);
    }
    let rotation = Rotation::from_matrix(&r);
    let translation = mu_y - rotation.rotate(&mu_x) * scale;
    Ok(SimilarityTransform { scale, rotation, translation })
}

/// Rigid least-squares alignment (scale fixed to 1).
pub fn se3_align(source: &[Vec3], target: &[Vec3]) -> Result<SimilarityTransform> {
    umeyama(source, target, false)
}

/// Residual distances `‖T(xᵢ) − yᵢ‖`.
pub fn residuals(transform: &SimilarityTransform, source: &[Vec3], target: &[Vec3]) -> Vec<f64> {
    let a = transform.linear_part();
    source.iter().zip(target).map(|(x, y)| (a * x + transform.translation - y).norm()).collect()
}

/// Upper quartile (linear-interpolation rule) of every camera's distance to
/// its nearest neighbour. Brute force, O(n²).
pub fn closest_pair_upper_quartile(positions: &[Vec3]) -> Result<f64> {
    if positions.len() < 2 {
        return Err(Error::TooFewCameras);
    }
    let nearest: Vec<f64> = positions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            positions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| (p - q).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let d = quantile(&nearest, 0.75)?;
    if !(d > 0.0) {
        return Err(Error::DegenerateSpacing);
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegistrationConfig {
    /// Number of prescreened hypotheses to collect.
    pub hypothesis_target: usize,
    /// Triplet draws per attempt; `None` means `100 · hypothesis_target`.
    pub max_triplet_draws: Option<usize>,
    /// Maximum spread of the three log scale ratios of a triplet.
    pub prescreen_log_tolerance: f64,
    pub relax_factor: f64,
    pub max_relaxations: usize,
    pub seed: u64,
}

impl Default for RegistrationConfig {
    fn default() -> Self {
        RegistrationConfig {
            hypothesis_target: 1000,
            max_triplet_draws: None,
            prescreen_log_tolerance: 0.1,
            relax_factor: 2.0,
            max_relaxations: 3,
            seed: 0,
        }
    }
}

impl RegistrationConfig {
    pub fn with_seed(seed: u64) -> Self {
        RegistrationConfig { seed, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.hypothesis_target == 0 {
            return Err(Error::InvalidArgument("hypothesis_target must be at least 1".into()));
        }
        if !(self.prescreen_log_tolerance > 0.0) {
            return Err(Error::InvalidArgument("prescreen tolerance must be positive".into()));
        }
        if !(self.relax_factor >= 1.0) {
            return Err(Error::InvalidArgument("relax_factor must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Registration {
    pub transform: SimilarityTransform,
    /// m-th smallest residual of the selected hypothesis.
    pub cost: f64,
    pub m: usize,
    pub hypotheses: usize,
    pub draws: usize,
    pub tolerance_used: f64,
    /// Set when no triplet passed prescreening and the transform is a plain
    /// least-squares fit over all correspondences.
    pub fallback: bool,
    pub seed: u64,
}

/// `max(4, round(n/10))`, rounding half away from zero.
pub fn cost_rank(n: usize) -> usize {
    ((n as f64 / 10.0).round() as usize).max(4)
}

const MIN_PAIR_DISTANCE: f64 = 1e-12;

fn passes_prescreen(source: &[Vec3], target: &[Vec3], t: [usize; 3], tolerance: f64) -> bool {
    let mut ratios = [0.0; 3];
    for (k, (a, b)) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])].into_iter().enumerate() {
        let dx = (source[a] - source[b]).norm();
        let dy = (target[a] - target[b]).norm();
        if !(dx > MIN_PAIR_DISTANCE && dy > MIN_PAIR_DISTANCE) {
            return false;
        }
        ratios[k] = dy.ln() - dx.ln();
    }
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min <= tolerance
}

/// Collects prescreened triplets from a seeded stream of draws.
fn collect_triplets(
    source: &[Vec3],
    target: &[Vec3],
    cfg: &RegistrationConfig,
    tolerance: f64,
) -> (Vec<[usize; 3]>, usize) {
    let n = source.len();
    let max_draws = cfg.max_triplet_draws.unwrap_or(100 * cfg.hypothesis_target);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut passed = Vec::with_capacity(cfg.hypothesis_target.min(max_draws));
    let mut draws = 0;
    while draws < max_draws && passed.len() < cfg.hypothesis_target {
        draws += 1;
        let picked = index::sample(&mut rng, n, 3);
        let t = [picked.index(0), picked.index(1), picked.index(2)];
        if passes_prescreen(source, target, t, tolerance) {
            passed.push(t);
        }
    }
    (passed, draws)
}

/// Robust similarity registration of `source` (estimate) onto `target`
/// (ground truth) without an inlier threshold.
///
/// Random index triplets are prescreened by the agreement of their pairwise
/// distance ratios; each passing triplet yields a 3-point similarity
/// hypothesis, scored by the m-th smallest residual over all points with
/// `m = max(4, round(n/10))`. The lowest-cost hypothesis (earliest on ties) is
/// returned without refinement.
pub fn register_robust(source: &[Vec3], target: &[Vec3], cfg: &RegistrationConfig) -> Result<Registration> {
    cfg.validate()?;
    if source.len() != target.len() {
        return Err(Error::LengthMismatch { left: source.len(), right: target.len() });
    }
    let n = source.len();
    if n < 4 {
        return Err(Error::TooFewPoints { need: 4, got: n });
    }
    let m = cost_rank(n);

    let mut tolerance = cfg.prescreen_log_tolerance;
    let mut total_draws = 0;
    let mut triplets = Vec::new();
    for attempt in 0..=cfg.max_relaxations {
        if attempt > 0 {
            tolerance *= cfg.relax_factor;
        }
        let (found, draws) = collect_triplets(source, target, cfg, tolerance);
        total_draws += draws;
        if !found.is_empty() {
            triplets = found;
            break;
        }
    }

    let mut best: Option<(f64, SimilarityTransform)> = None;
    let mut scratch = vec![0.0; n];
    let mut hypotheses = 0;
    for t in &triplets {
        let xs = [source[t[0]], source[t[1]], source[t[2]]];
        let ys = [target[t[0]], target[t[1]], target[t[2]]];
        let Ok(hypothesis) = umeyama(&xs, &ys, true) else {
            continue;
        };
        hypotheses += 1;
        let cost = ranked_residual(&hypothesis, source, target, m, &mut scratch);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, hypothesis));
        }
    }

    match best {
        Some((cost, transform)) => Ok(Registration {
            transform,
            cost,
            m,
            hypotheses,
            draws: total_draws,
            tolerance_used: tolerance,
            fallback: false,
            seed: cfg.seed,
        }),
        None => {
            let transform = umeyama(source, target, true)?;
            let cost = ranked_residual(&transform, source, target, m, &mut scratch);
            Ok(Registration {
                transform,
                cost,
                m,
                hypotheses: 0,
                draws: total_draws,
                tolerance_used: tolerance,
                fallback: true,
                seed: cfg.seed,
            })
        }
    }
}

/// m-th smallest residual (1-based) of `transform` over all correspondences.
fn ranked_residual(
    transform: &SimilarityTransform,
    source: &[Vec3],
    target: &[Vec3],
    m: usize,
    scratch: &mut [f64],
) -> f64 {
    let a = transform.linear_part();
    for ((r, x), y) in scratch.iter_mut().zip(source).zip(target) {
        *r = (a * x + transform.translation - y).norm();
    }
    let (_, nth, _) = scratch.select_nth_unstable_by(m - 1, f64::total_cmp);
    *nth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::random_rotation;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn rz(deg: f64) -> Rotation {
        Rotation::from_axis_angle(&Vec3::z(), deg.to_radians())
    }

    fn max_residual(t: &SimilarityTransform, x: &[Vec3], y: &[Vec3]) -> f64 {
        residuals(t, x, y).into_iter().fold(0.0, f64::max)
    }

    #[test]
    fn umeyama_recovers_exact_similarity() {
        let src = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        let truth = SimilarityTransform::new(2.0, rz(90.0), Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let dst: Vec<Vec3> = src.iter().map(|p| truth.apply(p)).collect();
        let est = umeyama(&src, &dst, true).unwrap();
        assert!((est.scale - 2.0).abs() < 1e-9);
        assert!(crate::geom::angular_distance(&est.rotation, &rz(90.0)) < 1e-7);
        assert!((est.translation - Vec3::new(1.0, 1.0, 1.0)).norm() < 1e-9);
        assert!(max_residual(&est, &src, &dst) < 1e-9);
    }

    #[test]
    fn umeyama_identity_on_equal_clouds() {
        let pts = [Vec3::new(0.1, 0.2, 0.3), Vec3::new(1.0, -1.0, 0.5), Vec3::new(2.0, 0.0, -1.0), Vec3::new(0.0, 3.0, 1.0)];
        let est = umeyama(&pts, &pts, true).unwrap();
        assert!((est.scale - 1.0).abs() < 1e-12);
        assert!(est.rotation.angle_deg() < 1e-6);
        assert!(max_residual(&est, &pts, &pts) < 1e-12);
    }

    #[test]
    fn umeyama_errors() {
        let a = [Vec3::zeros(); 3];
        assert_eq!(umeyama(&a, &a[..2], true), Err(Error::LengthMismatch { left: 3, right: 2 }));
        assert_eq!(umeyama(&a[..1], &a[..1], true), Err(Error::TooFewPoints { need: 2, got: 1 }));
        let b = [Vec3::new(1.0, 2.0, 3.0); 3];
        assert_eq!(umeyama(&b, &a, true), Err(Error::DegenerateSource));
    }

    #[test]
    fn umeyama_near_collinear_beats_grid_oracle() {
        let src = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.001, 0.0), Vec3::new(2.0, 0.0, -0.002)];
        let dst = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, -0.002, 0.001), Vec3::new(2.0, 0.003, 0.0)];
        let est = umeyama(&src, &dst, false).unwrap();
        assert!((est.rotation.to_matrix().determinant() - 1.0).abs() < 1e-9);
        let sse = |t: &SimilarityTransform| residuals(t, &src, &dst).iter().map(|r| r * r).sum::<f64>();
        let cost = sse(&est);
        assert!(cost <= sse(&SimilarityTransform::identity()) + 1e-15);
        // oracle: rotations about the line axis, translation at centroid optimum
        let mu_x = src.iter().sum::<Vec3>() / 3.0;
        let mu_y = dst.iter().sum::<Vec3>() / 3.0;
        let mut best = f64::INFINITY;
        for k in 0..3600 {
            let r = Rotation::from_axis_angle(&Vec3::x(), (k as f64 * 0.1).to_radians());
            let t = mu_y - r.rotate(&mu_x);
            let cand = SimilarityTransform::new(1.0, r, t).unwrap();
            best = best.min(sse(&cand));
        }
        assert!(cost <= best + 1e-12, "{cost} vs oracle {best}");
    }

    #[test]
    fn se3_examples() {
        let est = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)];
        let gt = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)];
        let t = se3_align(&est, &gt).unwrap();
        assert_eq!(t.scale, 1.0);
        for r in residuals(&t, &est, &gt) {
            assert!((r - 0.5).abs() < 1e-12);
        }
        let moved: Vec<Vec3> = gt.iter().map(|p| p + Vec3::new(3.0, -1.0, 2.0)).collect();
        let pts = [gt[0], gt[1], Vec3::new(0.0, 1.0, 0.0)];
        let moved3 = [moved[0], moved[1], Vec3::new(3.0, 0.0, 2.0)];
        let t = se3_align(&pts, &moved3).unwrap();
        assert!((t.translation - Vec3::new(3.0, -1.0, 2.0)).norm() < 1e-12);
        assert!(t.rotation.angle_deg() < 1e-6);
    }

    #[test]
    fn closest_pair_examples() {
        let line = |xs: &[f64]| xs.iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect::<Vec<_>>();
        assert_eq!(closest_pair_upper_quartile(&line(&[0.0, 1.0, 2.0, 3.0])).unwrap(), 1.0);
        assert_eq!(closest_pair_upper_quartile(&line(&[0.0, 1.0, 3.0, 6.0])).unwrap(), 2.25);
        assert!((closest_pair_upper_quartile(&line(&[0.0, 2.0, 6.0, 12.0])).unwrap() - 4.5).abs() < 1e-12);
        assert_eq!(closest_pair_upper_quartile(&line(&[0.0])), Err(Error::TooFewCameras));
        assert_eq!(closest_pair_upper_quartile(&line(&[1.0, 1.0, 1.0, 1.0, 1.0, 2.0])), Err(Error::DegenerateSpacing));
    }

    #[test]
    fn closest_pair_rigid_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<Vec3> = (0..30).map(|_| Vec3::new(rng.random(), rng.random(), rng.random())).collect();
        let g = SimilarityTransform::new(1.0, random_rotation(&mut rng), Vec3::new(5.0, -2.0, 1.0)).unwrap();
        let moved: Vec<Vec3> = pts.iter().map(|p| g.apply(p)).collect();
        let a = closest_pair_upper_quartile(&pts).unwrap();
        let b = closest_pair_upper_quartile(&moved).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn cost_rank_arithmetic() {
        assert_eq!(cost_rank(100), 10);
        assert_eq!(cost_rank(8), 4);
        assert_eq!(cost_rank(45), 5); // 4.5 rounds away from zero
        assert_eq!(cost_rank(44), 4);
        assert_eq!(cost_rank(200), 20);
    }

    #[test]
    fn compose_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = SimilarityTransform::new(1.7, random_rotation(&mut rng), Vec3::new(1.0, 2.0, 3.0)).unwrap();
        let b = SimilarityTransform::new(0.4, random_rotation(&mut rng), Vec3::new(-1.0, 0.5, 0.0)).unwrap();
        let p = Vec3::new(0.3, -0.7, 2.0);
        assert!((a.compose(&b).apply(&p) - a.apply(&b.apply(&p))).norm() < 1e-12);
        assert!((a.inverse().apply(&a.apply(&p)) - p).norm() < 1e-12);
        assert!(SimilarityTransform::new(0.0, Rotation::identity(), Vec3::zeros()).is_err());
    }

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec3> {
        (0..n).map(|_| Vec3::new(rng.random(), rng.random(), rng.random()) - Vec3::repeat(0.5)).collect()
    }

    #[test]
    fn exact_data_registers_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let gt = random_cloud(&mut rng, 50);
        let g = SimilarityTransform::new(3.5, random_rotation(&mut rng), Vec3::new(10.0, -4.0, 2.0)).unwrap();
        let est: Vec<Vec3> = gt.iter().map(|p| g.apply(p)).collect();
        let reg = register_robust(&est, &gt, &RegistrationConfig::default()).unwrap();
        assert!(!reg.fallback);
        assert_eq!(reg.hypotheses, 1000);
        assert!(max_residual(&reg.transform, &est, &gt) < 1e-9);
    }

    #[test]
    fn registration_rejects_small_inputs() {
        let p = [Vec3::zeros(); 3];
        assert_eq!(
            register_robust(&p, &p, &RegistrationConfig::default()),
            Err(Error::TooFewPoints { need: 4, got: 3 })
        );
        let cfg = RegistrationConfig { hypothesis_target: 0, ..Default::default() };
        assert!(register_robust(&[Vec3::zeros(); 5], &[Vec3::zeros(); 5], &cfg).is_err());
    }

    #[test]
    fn registration_falls_back_when_nothing_passes() {
        // target distances wildly inconsistent with source distances for every triplet
        let src: Vec<Vec3> = (0..6).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let dst: Vec<Vec3> = (0..6).map(|i| Vec3::new(3f64.powi(i * 2), 0.0, 0.0)).collect();
        let cfg = RegistrationConfig { hypothesis_target: 10, max_triplet_draws: Some(200), ..Default::default() };
        let reg = register_robust(&src, &dst, &cfg).unwrap();
        assert!(reg.fallback);
        assert_eq!(reg.hypotheses, 0);
        assert!((reg.tolerance_used - 0.8).abs() < 1e-12);
    }

    #[test]
    fn selected_hypothesis_has_minimum_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let gt = random_cloud(&mut rng, 40);
        let noise = Normal::new(0.0, 0.02).unwrap();
        let est: Vec<Vec3> = gt
            .iter()
            .map(|p| p + Vec3::new(noise.sample(&mut rng), noise.sample(&mut rng), noise.sample(&mut rng)))
            .collect();
        let cfg = RegistrationConfig { hypothesis_target: 200, ..Default::default() };
        let reg = register_robust(&est, &gt, &cfg).unwrap();
        let (triplets, _) = collect_triplets(&est, &gt, &cfg, cfg.prescreen_log_tolerance);
        let mut scratch = vec![0.0; gt.len()];
        for t in triplets {
            let xs = [est[t[0]], est[t[1]], est[t[2]]];
            let ys = [gt[t[0]], gt[t[1]], gt[t[2]]];
            if let Ok(h) = umeyama(&xs, &ys, true) {
                assert!(reg.cost <= ranked_residual(&h, &est, &gt, reg.m, &mut scratch));
            }
        }
    }

    #[test]
    fn registration_is_gauge_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let gt = random_cloud(&mut rng, 60);
        let noise = Normal::new(0.0, 0.03).unwrap();
        let mut est: Vec<Vec3> = gt
            .iter()
            .map(|p| p + Vec3::new(noise.sample(&mut rng), noise.sample(&mut rng), noise.sample(&mut rng)))
            .collect();
        for p in est.iter_mut().take(10) {
            *p = Vec3::new(rng.random(), rng.random(), rng.random()) * 10.0 - Vec3::repeat(5.0);
        }
        let g = SimilarityTransform::new(0.25, random_rotation(&mut rng), Vec3::new(-3.0, 7.0, 1.0)).unwrap();
        let moved: Vec<Vec3> = est.iter().map(|p| g.apply(p)).collect();
        let cfg = RegistrationConfig::with_seed(5);
        let a = register_robust(&est, &gt, &cfg).unwrap();
        let b = register_robust(&moved, &gt, &cfg).unwrap();
        let mut ra = residuals(&a.transform, &est, &gt);
        let mut rb = residuals(&b.transform, &moved, &gt);
        ra.sort_by(f64::total_cmp);
        rb.sort_by(f64::total_cmp);
        for (x, y) in ra.iter().zip(&rb) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }
}
