use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{perturb_rotation, random_rotation, Vec3};
use crate::trajectory::Trajectory;

/// Half-width of the cube outlier positions are drawn from.
pub const OUTLIER_HALF_WIDTH: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    RandomBox,
    Collinear,
    VaryingN,
    RotationOnly,
    PasGrid,
    MaaVsPasA,
    MaaVsPasB,
    MaaVsPasC,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::RandomBox,
        ScenarioKind::Collinear,
        ScenarioKind::VaryingN,
        ScenarioKind::RotationOnly,
        ScenarioKind::PasGrid,
        ScenarioKind::MaaVsPasA,
        ScenarioKind::MaaVsPasB,
        ScenarioKind::MaaVsPasC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::RandomBox => "random_box",
            ScenarioKind::Collinear => "collinear",
            ScenarioKind::VaryingN => "varying_n",
            ScenarioKind::RotationOnly => "rotation_only",
            ScenarioKind::PasGrid => "pas_grid",
            ScenarioKind::MaaVsPasA => "maa_vs_pas_a",
            ScenarioKind::MaaVsPasB => "maa_vs_pas_b",
            ScenarioKind::MaaVsPasC => "maa_vs_pas_c",
        }
    }

    fn min_cameras(self) -> usize {
        match self {
            ScenarioKind::Collinear | ScenarioKind::MaaVsPasC => 2,
            ScenarioKind::VaryingN | ScenarioKind::MaaVsPasB => 4,
            _ => 1,
        }
    }

    fn outlier_mode(self) -> OutlierMode {
        match self {
            ScenarioKind::RotationOnly => OutlierMode::RotationsOnly,
            _ => OutlierMode::Poses,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario kind '{s}'")))
    }
}

/// Cube volume as a function of the camera count for `varying_n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VolumeRule {
    /// `V = 10·n`.
    #[default]
    #[serde(rename = "10n")]
    TenN,
    /// `V = n/10`, i.e. ten cameras per unit volume.
    #[serde(rename = "n/10")]
    TenPerUnit,
}

impl VolumeRule {
    pub fn name(self) -> &'static str {
        match self {
            VolumeRule::TenN => "10n",
            VolumeRule::TenPerUnit => "n/10",
        }
    }

    pub fn side(self, n: usize) -> f64 {
        let volume = match self {
            VolumeRule::TenN => 10.0 * n as f64,
            VolumeRule::TenPerUnit => n as f64 / 10.0,
        };
        volume.cbrt()
    }
}

impl FromStr for VolumeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "10n" => Ok(VolumeRule::TenN),
            "n/10" => Ok(VolumeRule::TenPerUnit),
            _ => Err(Error::InvalidArgument(format!("unknown volume rule '{s}'"))),
        }
    }
}

fn default_runs() -> usize {
    50
}

/// One cell of a Monte Carlo grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub n: usize,
    pub sigma_t: f64,
    /// Degrees.
    pub sigma_r: f64,
    pub outliers: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub volume_rule: VolumeRule,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind, n: usize, sigma_t: f64, sigma_r: f64, outliers: usize) -> Self {
        ScenarioConfig {
            kind,
            n,
            sigma_t,
            sigma_r,
            outliers,
            runs: default_runs(),
            master_seed: 0,
            volume_rule: VolumeRule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n < self.kind.min_cameras() {
            return bad(format!("{} needs at least {} cameras, got {}", self.kind, self.kind.min_cameras(), self.n));
        }
        if self.outliers > self.n {
            return bad(format!("{} outliers exceed {} cameras", self.outliers, self.n));
        }
        if !(self.sigma_t >= 0.0 && self.sigma_t.is_finite()) || !(self.sigma_r >= 0.0 && self.sigma_r.is_finite()) {
            return bad("noise levels must be finite and non-negative".into());
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        Ok(())
    }

    /// Stable identity of the cell, independent of `runs` and `master_seed`.
    pub fn cell_key(&self) -> String {
        format!(
            "{}/n={}/t={:016x}/r={:016x}/o={}/v={}",
            self.kind,
            self.n,
            self.sigma_t.to_bits(),
            self.sigma_r.to_bits(),
            self.outliers,
            self.volume_rule.name()
        )
    }

    /// Ground truth and estimate for one run.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Trajectory, Trajectory)> {
        let gt = match self.kind {
            ScenarioKind::Collinear | ScenarioKind::MaaVsPasC => gen_collinear(self.n, rng),
            ScenarioKind::VaryingN | ScenarioKind::MaaVsPasB => gen_varying_n(self.n, self.volume_rule, rng),
            _ => gen_random_box(self.n, rng),
        };
        let noisy = perturb_trajectory(&gt, self.sigma_t, self.sigma_r, rng);
        let (est, replaced) = inject_outliers(&noisy, self.outliers, self.kind.outlier_mode(), rng)?;
        assert_eq!(replaced.len(), self.outliers);
        Ok((gt, est))
    }
}

fn uniform_cube<R: Rng + ?Sized>(n: usize, half_width: f64, rng: &mut R) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.random_range(-half_width..=half_width),
                rng.random_range(-half_width..=half_width),
                rng.random_range(-half_width..=half_width),
            )
        })
        .collect()
}

fn haar_rotations<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<crate::geom::Rotation> {
    (0..n).map(|_| random_rotation(rng)).collect()
}

/// Positions uniform in the unit cube centred at the origin, Haar rotations.
pub fn gen_random_box<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Trajectory {
    let positions = uniform_cube(n, 0.5, rng);
    let rotations = haar_rotations(n, rng);
    Trajectory { timestamps: None, positions, rotations: Some(rotations) }
}

/// Cameras at `(i, 0, 0)` for `i = 0..n`, Haar rotations.
pub fn gen_collinear<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Trajectory {
    let positions = (0..n).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
    let rotations = haar_rotations(n, rng);
    Trajectory { timestamps: None, positions, rotations: Some(rotations) }
}

/// Positions uniform in a centred cube whose volume follows `rule`.
pub fn gen_varying_n<R: Rng + ?Sized>(n: usize, rule: VolumeRule, rng: &mut R) -> Trajectory {
    let positions = uniform_cube(n, rule.side(n) / 2.0, rng);
    let rotations = haar_rotations(n, rng);
    Trajectory { timestamps: None, positions, rotations: Some(rotations) }
}

/// Adds `N(0, sigma_t²)` to every position component and perturbs every
/// rotation by `sigma_r` degrees. A zero sigma leaves its channel untouched.
pub fn perturb_trajectory<R: Rng + ?Sized>(t: &Trajectory, sigma_t: f64, sigma_r: f64, rng: &mut R) -> Trajectory {
    let mut out = t.clone();
    if sigma_t > 0.0 {
        let noise = Normal::new(0.0, sigma_t).expect("finite sigma");
        for p in &mut out.positions {
            *p += Vec3::new(noise.sample(rng), noise.sample(rng), noise.sample(rng));
        }
    }
    if let Some(rotations) = &mut out.rotations {
        for r in rotations.iter_mut() {
            *r = perturb_rotation(r, sigma_r, rng);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutlierMode {
    /// Replace position and rotation.
    Poses,
    /// Replace the rotation only.
    RotationsOnly,
}

/// Replaces a uniformly random subset of `count` poses with outliers:
/// positions uniform in `[−5, 5]³`, Haar-uniform rotations. Returns the new
/// trajectory and the sorted replaced indices.
pub fn inject_outliers<R: Rng + ?Sized>(
    t: &Trajectory,
    count: usize,
    mode: OutlierMode,
    rng: &mut R,
) -> Result<(Trajectory, Vec<usize>)> {
    if count > t.len() {
        return Err(Error::InvalidArgument(format!("{count} outliers exceed {} cameras", t.len())));
    }
    let mut indices = index::sample(rng, t.len(), count).into_vec();
    indices.sort_unstable();
    let mut out = t.clone();
    for &i in &indices {
        if mode == OutlierMode::Poses {
            out.positions[i] = uniform_cube(1, OUTLIER_HALF_WIDTH, rng)[0];
        }
        if let Some(rotations) = &mut out.rotations {
            rotations[i] = random_rotation(rng);
        }
    }
    Ok((out, indices))
}
