use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::intervals::{band_from_replicates, ci_pointwise, BandSummary, Interval, Transform};
use super::resample::{replicate_rng, resample};
use super::sample_sd;
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_cif, estimate_cond_cif, estimate_cum_csh, estimate_survival, EstimateCurve,
    Functional, SurvivalVariant, Target,
};
use crate::sample::{fit_censor_survival, Sample};
use crate::step::StepCurve;

/// Estimates several targets on one sample, sharing the CIF and survival
/// curves that hazard targets reuse.
pub fn evaluate_targets(
    sample: &Sample,
    g: &StepCurve,
    targets: &[Target],
) -> Vec<Result<EstimateCurve>> {
    let mut cifs: HashMap<(u32, u8), Result<EstimateCurve>> = HashMap::new();
    let mut survs: HashMap<(u32, SurvivalVariant), Result<EstimateCurve>> = HashMap::new();
    let mut out = Vec::with_capacity(targets.len());
    for target in targets {
        let j = target.stage;
        let est = match target.functional {
            Functional::Cif { cause } => cifs
                .entry((j, cause))
                .or_insert_with(|| estimate_cif(sample, j, cause, g))
                .clone(),
            Functional::Survival(v) => survs
                .entry((j, v))
                .or_insert_with(|| estimate_survival(sample, j, v, g))
                .clone(),
            Functional::CumCsh { cause, plugin } => {
                let cif = cifs
                    .entry((j, cause))
                    .or_insert_with(|| estimate_cif(sample, j, cause, g))
                    .clone();
                let surv = survs
                    .entry((j, plugin))
                    .or_insert_with(|| estimate_survival(sample, j, plugin, g))
                    .clone();
                cif.and_then(|c| surv.and_then(|s| estimate_cum_csh(&c, &s)))
            }
            Functional::CondCif { cause, prev } => {
                estimate_cond_cif(sample, j, cause, prev, g).map(|(c, _)| c)
            }
        };
        out.push(est);
    }
    out
}

/// Bootstrap replicate values: `out[b][target][grid point]`, `None` where
/// the replicate estimate is unidentifiable at that point.
///
/// Replicate `b` resamples with stream `b + 1` of `seed`.
pub fn replicate_values(
    sample: &Sample,
    targets: &[Target],
    grid: &[f64],
    replicates: usize,
    seed: u64,
) -> Vec<Vec<Vec<Option<f64>>>> {
    (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = replicate_rng(seed, b as u64 + 1);
            let draw = resample(sample, &mut rng);
            let g = fit_censor_survival(&draw);
            evaluate_targets(&draw, &g, targets)
                .into_iter()
                .map(|est| match est {
                    Ok(e) => grid.iter().map(|&t| e.value_in_range(t)).collect(),
                    Err(_) => vec![None; grid.len()],
                })
                .collect()
        })
        .collect()
}

/// What to bootstrap and how.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapPlan {
    pub target: Target,
    /// Number of bootstrap replicates `B`.
    pub replicates: usize,
    pub grid: Vec<f64>,
    pub alpha: f64,
    pub seed: u64,
    /// Interval `[t1, t2]` for a simultaneous band.
    pub band: Option<(f64, f64)>,
}

impl BootstrapPlan {
    pub fn new(target: Target, replicates: usize, grid: Vec<f64>, alpha: f64, seed: u64) -> Self {
        BootstrapPlan {
            target,
            replicates,
            grid,
            alpha,
            seed,
            band: None,
        }
    }

    pub fn with_band(mut self, t1: f64, t2: f64) -> Self {
        self.band = Some((t1, t2));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidArgument("at least two bootstrap replicates are required".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidArgument("grid times must be finite and non-negative".into()));
        }
        if let Some((t1, t2)) = self.band {
            if !(t1.is_finite() && t2.is_finite() && t1 <= t2) {
                return Err(Error::InvalidArgument(format!("invalid band interval [{t1}, {t2}]")));
            }
        }
        Ok(())
    }
}

/// Point estimate with bootstrap standard errors, pointwise intervals and an
/// optional simultaneous band, all on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapSummary {
    pub point: EstimateCurve,
    pub grid: Vec<f64>,
    /// Grid points added because the point estimate jumps there inside the
    /// band interval.
    pub inserted: Vec<bool>,
    /// Requested grid points dropped for lying beyond the identifiable range.
    pub clipped: Vec<f64>,
    pub estimate: Vec<f64>,
    pub se: Vec<f64>,
    /// Replicates contributing at each grid point.
    pub used: Vec<usize>,
    pub dropped: Vec<usize>,
    pub ci_plain: Vec<Interval>,
    pub ci_log: Vec<Interval>,
    pub band: Option<BandSummary>,
    pub replicates: usize,
    pub alpha: f64,
}

/// Bootstrap standard errors `σ̂*(t)` (sample SD over replicates) for the
/// planned target at every grid point, with pointwise Wald intervals on the
/// plain and log scales and, when requested, simultaneous bands.
///
/// Replicates in which the target is unidentifiable at a grid point are
/// left out of that point's SD; more than half left out is an error.
pub fn bootstrap_se(sample: &Sample, plan: &BootstrapPlan) -> Result<BootstrapSummary> {
    plan.validate()?;
    let g = fit_censor_survival(sample);
    let point = plan.target.estimate(sample, &g)?;

    let mut requested: Vec<f64> = plan.grid.clone();
    requested.sort_by(f64::total_cmp);
    requested.dedup();
    let (mut grid, clipped): (Vec<f64>, Vec<f64>) =
        requested.into_iter().partition(|&t| point.in_range(t));
    let mut inserted = vec![false; grid.len()];
    if let Some((t1, t2)) = plan.band {
        for &u in point.curve.jump_times() {
            if u >= t1 && u <= t2 && point.in_range(u) && !grid.contains(&u) {
                grid.push(u);
                inserted.push(true);
            }
        }
        let mut paired: Vec<(f64, bool)> = grid.into_iter().zip(inserted).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0));
        grid = paired.iter().map(|p| p.0).collect();
        inserted = paired.iter().map(|p| p.1).collect();
    }
    if grid.is_empty() {
        return Err(Error::unidentifiable(
            plan.target.stage,
            "no grid point lies within the identifiable range",
        ));
    }

    let values = replicate_values(sample, &[plan.target], &grid, plan.replicates, plan.seed);
    let columns: Vec<Vec<Option<f64>>> = (0..grid.len())
        .map(|i| values.iter().map(|rep| rep[0][i]).collect())
        .collect();

    let mut se = Vec::with_capacity(grid.len());
    let mut used = Vec::with_capacity(grid.len());
    let mut dropped = Vec::with_capacity(grid.len());
    for (i, col) in columns.iter().enumerate() {
        let ok: Vec<f64> = col.iter().flatten().copied().collect();
        let miss = plan.replicates - ok.len();
        if 2 * miss > plan.replicates || ok.len() < 2 {
            return Err(Error::TooManyDropped {
                t: grid[i],
                dropped: miss,
                total: plan.replicates,
            });
        }
        se.push(sample_sd(&ok).unwrap());
        used.push(ok.len());
        dropped.push(miss);
    }
    let estimate: Vec<f64> = grid.iter().map(|&t| point.value(t)).collect();
    let ci_plain = ci_pointwise(&estimate, &se, plan.alpha, Transform::Plain);
    let ci_log = ci_pointwise(&estimate, &se, plan.alpha, Transform::Log);
    let band = plan
        .band
        .map(|(t1, t2)| band_from_replicates(&grid, &estimate, &se, &columns, t1, t2, plan.alpha));

    Ok(BootstrapSummary {
        point,
        grid,
        inserted,
        clipped,
        estimate,
        se,
        used,
        dropped,
        ci_plain,
        ci_log,
        band,
        replicates: plan.replicates,
        alpha: plan.alpha,
    })
}
