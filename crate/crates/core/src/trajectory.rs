use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Rotation, Vec3};

/// An ordered set of camera poses. Positions are camera centres in world
/// coordinates; rotations, when present, map world to camera coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub timestamps: Option<Vec<f64>>,
    pub positions: Vec<Vec3>,
    pub rotations: Option<Vec<Rotation>>,
}

impl Trajectory {
    pub fn new(positions: Vec<Vec3>, rotations: Vec<Rotation>) -> Result<Self> {
        if positions.len() != rotations.len() {
            return Err(Error::LengthMismatch { left: positions.len(), right: rotations.len() });
        }
        Ok(Trajectory { timestamps: None, positions, rotations: Some(rotations) })
    }

    pub fn positions_only(positions: Vec<Vec3>) -> Self {
        Trajectory { timestamps: None, positions, rotations: None }
    }

    pub fn with_timestamps(mut self, timestamps: Vec<f64>) -> Result<Self> {
        if timestamps.len() != self.positions.len() {
            return Err(Error::LengthMismatch { left: self.positions.len(), right: timestamps.len() });
        }
        self.timestamps = Some(timestamps);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn rotations(&self) -> Result<&[Rotation]> {
        self.rotations.as_deref().ok_or(Error::RotationsUnavailable)
    }

    /// Sub-trajectory at the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> Trajectory {
        Trajectory {
            timestamps: self.timestamps.as_ref().map(|t| indices.iter().map(|&i| t[i]).collect()),
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            rotations: self.rotations.as_ref().map(|r| indices.iter().map(|&i| r[i]).collect()),
        }
    }
}
