//! Pairing of ground-truth and estimated records.

use trajkit::Trajectory;

use crate::error::CliError;

pub const DEFAULT_TOLERANCE: f64 = 0.02;
pub const MIN_PAIRS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum AssocMode {
    Index,
    Timestamp,
}

/// One-to-one `(gt index, est index)` pairs, sorted by ground-truth index.
#[derive(Clone, Debug, PartialEq)]
pub struct Association {
    pub mode: AssocMode,
    pub tolerance: f64,
    pub pairs: Vec<(usize, usize)>,
}

impl Association {
    /// The paired records as two trajectories of equal length.
    pub fn apply(&self, gt: &Trajectory, est: &Trajectory) -> (Trajectory, Trajectory) {
        let (g, e): (Vec<usize>, Vec<usize>) = self.pairs.iter().copied().unzip();
        (gt.select(&g), est.select(&e))
    }
}

/// Index mode pairs i with i. Timestamp mode takes candidate pairs within
/// `tol` in order of increasing time difference, skipping records already
/// used. Fails when fewer than `min_pairs` (and at least one) pairs remain.
pub fn associate(gt: &Trajectory, est: &Trajectory, mode: AssocMode, tol: f64, min_pairs: usize) -> Result<Association, CliError> {
    let pairs = match mode {
        AssocMode::Index => {
            if gt.len() != est.len() {
                return Err(CliError::Association(format!(
                    "index mode needs equal lengths, got {} and {}",
                    gt.len(),
                    est.len()
                )));
            }
            (0..gt.len()).map(|i| (i, i)).collect()
        }
        AssocMode::Timestamp => {
            let (Some(tg), Some(te)) = (&gt.timestamps, &est.timestamps) else {
                return Err(CliError::Association("timestamp mode needs timestamps".into()));
            };
            let mut candidates = Vec::new();
            for (i, a) in tg.iter().enumerate() {
                for (j, b) in te.iter().enumerate() {
                    let dt = (a - b).abs();
                    if dt <= tol {
                        candidates.push((dt, i, j));
                    }
                }
            }
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut used_gt = vec![false; tg.len()];
            let mut used_est = vec![false; te.len()];
            let mut pairs = Vec::new();
            for (_, i, j) in candidates {
                if !used_gt[i] && !used_est[j] {
                    used_gt[i] = true;
                    used_est[j] = true;
                    pairs.push((i, j));
                }
            }
            pairs.sort_unstable();
            pairs
        }
    };
    if pairs.is_empty() {
        return Err(CliError::Association("no matching records".into()));
    }
    if pairs.len() < min_pairs {
        return Err(CliError::Association(format!("only {} matched pairs, need {min_pairs}", pairs.len())));
    }
    Ok(Association { mode, tolerance: tol, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use trajkit::Vec3;

    fn stamped(ts: &[f64]) -> Trajectory {
        let positions = ts.iter().map(|&t| Vec3::new(t, 0.0, 0.0)).collect();
        Trajectory::positions_only(positions).with_timestamps(ts.to_vec()).unwrap()
    }

    #[test]
    fn index_mode() {
        let a = stamped(&[0.0, 1.0, 2.0, 3.0]);
        let assoc = associate(&a, &a, AssocMode::Index, DEFAULT_TOLERANCE, MIN_PAIRS).unwrap();
        assert_eq!(assoc.pairs, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        let b = stamped(&[0.0, 1.0, 2.0]);
        assert!(associate(&a, &b, AssocMode::Index, DEFAULT_TOLERANCE, 1).is_err());
    }

    #[test]
    fn greedy_timestamp_example() {
        let gt = stamped(&[0.0, 1.0, 2.0]);
        let est = stamped(&[0.01, 0.99, 2.5]);
        let assoc = associate(&gt, &est, AssocMode::Timestamp, 0.02, 1).unwrap();
        assert_eq!(assoc.pairs, vec![(0, 0), (1, 1)]);
        assert!(associate(&gt, &est, AssocMode::Timestamp, 0.02, MIN_PAIRS).is_err());
    }

    #[test]
    fn each_record_used_once() {
        let gt = stamped(&[0.0, 0.015]);
        let est = stamped(&[0.01]);
        let assoc = associate(&gt, &est, AssocMode::Timestamp, 0.02, 1).unwrap();
        assert_eq!(assoc.pairs, vec![(1, 0)]);
        let (g, e) = assoc.apply(&gt, &est);
        assert_eq!(g.positions[0].x, 0.015);
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn zero_matches() {
        let gt = stamped(&[0.0, 1.0]);
        let est = stamped(&[0.5, 1.5]);
        let err = associate(&gt, &est, AssocMode::Timestamp, 0.02, 0).unwrap_err();
        assert!(err.to_string().contains("no matching"));
    }
}
