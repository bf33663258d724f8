//! Rotations, angular distances and random rotation sampling.
//!
//! A [`Rotation`] is stored as a unit quaternion with the scalar part kept
//! non-negative. Camera rotations follow the world-to-camera convention, so a
//! change of world frame acts on them by right multiplication.

use std::ops::Mul;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Serialize, Serializer};

/// A point or direction in world units.
pub type Vec3 = Vector3<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(UnitQuaternion<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(UnitQuaternion::identity())
    }

    /// Builds a rotation from quaternion components, normalizing them.
    /// Returns `None` for a (near) zero quaternion or non-finite input.
    pub fn from_wxyz(w: f64, x: f64, y: f64, z: f64) -> Option<Self> {
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return None;
        }
        Some(Self::from_unit(UnitQuaternion::new_unchecked(q / norm)))
    }

    pub fn from_unit(q: UnitQuaternion<f64>) -> Self {
        // renormalize so composition chains never drift
        let mut raw = q.into_inner();
        raw /= raw.norm();
        if raw.w < 0.0 {
            raw = -raw;
        }
        Rotation(UnitQuaternion::new_unchecked(raw))
    }

    /// Rotation by `angle` radians about `axis` (need not be normalized).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 || angle == 0.0 {
            return Self::identity();
        }
        Self::exp(&(axis * (angle / n)))
    }

    /// Exponential map from a rotation vector (axis times angle, radians).
    pub fn exp(v: &Vec3) -> Self {
        Self::from_unit(UnitQuaternion::from_scaled_axis(*v))
    }

    /// Logarithm map; the returned rotation vector has norm in `[0, π]`.
    pub fn log(&self) -> Vec3 {
        // w >= 0 keeps the angle on the short arc
        let q = self.0.quaternion();
        let vnorm = q.imag().norm();
        if vnorm < 1e-300 {
            return Vec3::zeros();
        }
        let angle = 2.0 * vnorm.atan2(q.w);
        q.imag() * (angle / vnorm)
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let r = nalgebra::Rotation3::from_matrix_unchecked(*m);
        Self::from_unit(UnitQuaternion::from_rotation_matrix(&r))
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        *self.0.to_rotation_matrix().matrix()
    }

    pub fn inverse(&self) -> Self {
        Self::from_unit(self.0.inverse())
    }

    pub fn unit_quaternion(&self) -> &UnitQuaternion<f64> {
        &self.0
    }

    /// Components as `[w, x, y, z]`.
    pub fn wxyz(&self) -> [f64; 4] {
        let q = self.0.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    /// Rotation angle in degrees, in `[0, 180]`.
    pub fn angle_deg(&self) -> f64 {
        angular_distance(&Rotation::identity(), self)
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.0.transform_vector(v)
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation::from_unit(self.0 * rhs.0)
    }
}

impl Mul<&Rotation> for &Rotation {
    type Output = Rotation;

    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation::from_unit(self.0 * rhs.0)
    }
}

impl Serialize for Rotation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.wxyz().serialize(serializer)
    }
}

/// Geodesic distance between two rotations in degrees, in `[0, 180]`.
///
/// Computed from the chords to `b` and `-b`, which stays accurate for both
/// tiny and near-antipodal angles.
pub fn angular_distance(a: &Rotation, b: &Rotation) -> f64 {
    angular_distance_rad(a, b).to_degrees()
}

pub fn angular_distance_rad(a: &Rotation, b: &Rotation) -> f64 {
    let qa = a.0.quaternion().coords;
    let qb = b.0.quaternion().coords;
    let (minus, plus) = ((qa - qb).norm(), (qa + qb).norm());
    4.0 * minus.min(plus).atan2(minus.max(plus))
}

/// Four independent standard normal draws, normalized. Not sign-canonicalized.
pub fn random_quaternion_components<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let norm = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return q.map(|c| c / norm);
        }
    }
}

/// Haar-uniform random rotation.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let [w, x, y, z] = random_quaternion_components(rng);
    Rotation::from_wxyz(w, x, y, z).expect("unit quaternion")
}

/// Uniformly distributed unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Composes `r` with a rotation about a uniformly random axis by an angle
/// drawn from `N(0, sigma_deg²)` degrees. `sigma_deg == 0` returns `r`
/// unchanged and consumes no randomness.
pub fn perturb_rotation<R: Rng + ?Sized>(r: &Rotation, sigma_deg: f64, rng: &mut R) -> Rotation {
    if sigma_deg == 0.0 {
        return *r;
    }
    let axis = random_unit_vector(rng);
    let z: f64 = StandardNormal.sample(rng);
    let angle = (sigma_deg * z).to_radians();
    r * &Rotation::from_axis_angle(&axis, angle)
}
