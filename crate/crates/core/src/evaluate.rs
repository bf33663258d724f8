//! One-call evaluation of any set of metrics on an associated pair of
//! trajectories. A metric that cannot be computed yields its error without
//! affecting the others.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{self, AngleStats, BaselineReport, Norm};
use crate::error::{Error, Result};
use crate::scores::{self, RasResult, ScoreReport, TasConfig, TasResult, DEFAULT_ALPHA, RAS_MAX_THRESHOLD_DEG};
use crate::trajectory::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Tas,
    Ras,
    Pas,
    Ate,
    Dte,
    Dre,
    Maa,
    Median1,
    Mean1,
    Rms1,
    Median2,
    Mean2,
    Rms2,
}

impl Metric {
    pub const ALL: [Metric; 13] = [
        Metric::Tas,
        Metric::Ras,
        Metric::Pas,
        Metric::Ate,
        Metric::Dte,
        Metric::Dre,
        Metric::Maa,
        Metric::Median1,
        Metric::Mean1,
        Metric::Rms1,
        Metric::Median2,
        Metric::Mean2,
        Metric::Rms2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Tas => "tas",
            Metric::Ras => "ras",
            Metric::Pas => "pas",
            Metric::Ate => "ate",
            Metric::Dte => "dte",
            Metric::Dre => "dre",
            Metric::Maa => "maa",
            Metric::Median1 => "median1",
            Metric::Mean1 => "mean1",
            Metric::Rms1 => "rms1",
            Metric::Median2 => "median2",
            Metric::Mean2 => "mean2",
            Metric::Rms2 => "rms2",
        }
    }

    /// Display label used in plots and tables.
    pub fn label(self) -> &'static str {
        match self {
            Metric::Tas => "TAS",
            Metric::Ras => "RAS",
            Metric::Pas => "PAS",
            Metric::Ate => "ATE",
            Metric::Dte => "DTE",
            Metric::Dre => "DRE",
            Metric::Maa => "mAA",
            Metric::Median1 => "Median-1",
            Metric::Mean1 => "Mean-1",
            Metric::Rms1 => "RMS-1",
            Metric::Median2 => "Median-2",
            Metric::Mean2 => "Mean-2",
            Metric::Rms2 => "RMS-2",
        }
    }

    /// True when a larger value means a better estimate.
    pub fn higher_is_better(self) -> bool {
        matches!(self, Metric::Tas | Metric::Ras | Metric::Pas | Metric::Maa)
    }

    /// Parses a comma-separated list; `stats1`/`stats2` expand to the
    /// median, mean and RMS of the respective alignment.
    pub fn parse_list(s: &str) -> Result<Vec<Metric>> {
        let mut out = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let expanded: &[Metric] = match token {
                "stats1" => &[Metric::Median1, Metric::Mean1, Metric::Rms1],
                "stats2" => &[Metric::Median2, Metric::Mean2, Metric::Rms2],
                "all" => &Metric::ALL,
                other => {
                    out.push(other.parse()?);
                    continue;
                }
            };
            out.extend_from_slice(expanded);
        }
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidArgument("no metrics requested".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalOptions {
    pub tas: TasConfig,
    pub ras_max_threshold_deg: f64,
    pub alpha: f64,
    pub dte_winsor: f64,
    pub dre_tau_deg: f64,
    pub ate_with_scale: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tas: TasConfig::default(),
            ras_max_threshold_deg: RAS_MAX_THRESHOLD_DEG,
            alpha: DEFAULT_ALPHA,
            dte_winsor: baselines::DEFAULT_DTE_WINSOR,
            dre_tau_deg: baselines::DEFAULT_DRE_TAU_DEG,
            ate_with_scale: false,
        }
    }
}

impl EvalOptions {
    pub fn with_seed(seed: u64) -> Self {
        let mut opts = EvalOptions::default();
        opts.tas.registration.seed = seed;
        opts
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// One entry per requested metric, in request order.
    pub values: Vec<(Metric, Result<f64>)>,
    pub scores: ScoreReport,
    pub baselines: BaselineReport,
}

impl Evaluation {
    pub fn get(&self, metric: Metric) -> Option<&Result<f64>> {
        self.values.iter().find(|(m, _)| *m == metric).map(|(_, v)| v)
    }
}

pub fn evaluate(gt: &Trajectory, est: &Trajectory, metrics: &[Metric], opts: &EvalOptions) -> Result<Evaluation> {
    if gt.len() != est.len() {
        return Err(Error::LengthMismatch { left: gt.len(), right: est.len() });
    }
    let wants = |list: &[Metric]| metrics.iter().any(|m| list.contains(m));
    let both_rotations = || Ok::<_, Error>((gt.rotations()?, est.rotations()?));

    let tas_result: Option<Result<TasResult>> =
        wants(&[Metric::Tas, Metric::Pas]).then(|| scores::tas(&gt.positions, &est.positions, &opts.tas));
    let ras_result: Option<Result<RasResult>> = wants(&[Metric::Ras, Metric::Pas]).then(|| {
        let (g, e) = both_rotations()?;
        scores::ras(g, e, opts.ras_max_threshold_deg)
    });
    let stats = |norm: Norm| -> Result<AngleStats> {
        let (g, e) = both_rotations()?;
        baselines::aligned_angle_stats(g, e, norm)
    };
    let stats_l1 = wants(&[Metric::Median1, Metric::Mean1, Metric::Rms1]).then(|| stats(Norm::L1));
    let stats_l2 = wants(&[Metric::Median2, Metric::Mean2, Metric::Rms2]).then(|| stats(Norm::L2));

    let mut baseline = BaselineReport::new(opts.dte_winsor, opts.dre_tau_deg);
    let mut values = Vec::with_capacity(metrics.len());
    for &metric in metrics {
        let value = match metric {
            Metric::Tas => tas_result.as_ref().unwrap().as_ref().map(|t| t.score).map_err(Clone::clone),
            Metric::Ras => ras_result.as_ref().unwrap().as_ref().map(|r| r.score).map_err(Clone::clone),
            Metric::Pas => match (tas_result.as_ref().unwrap(), ras_result.as_ref().unwrap()) {
                (Ok(t), Ok(r)) => scores::pas(t.score, r.score, opts.alpha),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            },
            Metric::Ate => baselines::ate(&gt.positions, &est.positions, opts.ate_with_scale),
            Metric::Dte => {
                let rotations = match (&gt.rotations, &est.rotations) {
                    (Some(g), Some(e)) => Some((g.as_slice(), e.as_slice())),
                    _ => None,
                };
                baselines::dte(&gt.positions, &est.positions, rotations, opts.dte_winsor)
            }
            Metric::Dre => both_rotations().and_then(|(g, e)| baselines::dre(g, e, opts.dre_tau_deg)),
            Metric::Maa => both_rotations()
                .and_then(|(g, e)| baselines::maa(&gt.positions, g, &est.positions, e))
                .map(|r| r.value),
            Metric::Median1 | Metric::Mean1 | Metric::Rms1 => {
                pick_stat(stats_l1.as_ref().unwrap(), metric)
            }
            Metric::Median2 | Metric::Mean2 | Metric::Rms2 => {
                pick_stat(stats_l2.as_ref().unwrap(), metric)
            }
        };
        match (metric, &value) {
            (Metric::Ate, Ok(v)) => baseline.ate = Some(*v),
            (Metric::Dte, Ok(v)) => baseline.dte = Some(*v),
            (Metric::Dre, Ok(v)) => baseline.dre = Some(*v),
            (Metric::Maa, Ok(v)) => baseline.maa = Some(*v),
            _ => {}
        }
        values.push((metric, value));
    }
    baseline.stats_l1 = stats_l1.and_then(Result::ok);
    baseline.stats_l2 = stats_l2.and_then(Result::ok);

    let tas_ok = tas_result.as_ref().and_then(|r| r.as_ref().ok());
    let ras_ok = ras_result.as_ref().and_then(|r| r.as_ref().ok());
    let mut report = ScoreReport::from_parts(tas_ok, ras_ok, opts.alpha)?;
    if !metrics.contains(&Metric::Pas) {
        report.pas = None;
    }
    Ok(Evaluation { values, scores: report, baselines: baseline })
}

fn pick_stat(stats: &Result<AngleStats>, metric: Metric) -> Result<f64> {
    let s = stats.as_ref().map_err(Clone::clone)?;
    Ok(match metric {
        Metric::Median1 | Metric::Median2 => s.median,
        Metric::Mean1 | Metric::Mean2 => s.mean,
        _ => s.rms,
    })
}
