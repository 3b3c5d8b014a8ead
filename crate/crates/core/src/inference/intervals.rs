use serde::Serialize;

use super::bootstrap::{bootstrap_se, BootstrapPlan};
use super::normal::z_critical;
use crate::error::{Error, Result};
use crate::sample::Sample;

/// Scale on which a Wald interval is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Transform {
    /// `Ê ± z σ̂`.
    Plain,
    /// `Ê · exp(± z σ̂ / Ê)`, which stays positive.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    /// Set when the log interval collapses because the estimate is zero.
    pub degenerate: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    fn around(estimate: f64, half: f64, transform: Transform) -> Interval {
        match transform {
            Transform::Plain => Interval {
                lower: estimate - half,
                upper: estimate + half,
                degenerate: false,
            },
            Transform::Log if estimate > 0.0 => {
                let f = (half / estimate).exp();
                Interval {
                    lower: estimate / f,
                    upper: estimate * f,
                    degenerate: false,
                }
            }
            Transform::Log => Interval {
                lower: 0.0,
                upper: 0.0,
                degenerate: true,
            },
        }
    }
}

/// Pointwise `100(1 − α)%` Wald intervals.
pub fn ci_pointwise(estimate: &[f64], se: &[f64], alpha: f64, transform: Transform) -> Vec<Interval> {
    assert_eq!(estimate.len(), se.len());
    let z = z_critical(alpha);
    estimate
        .iter()
        .zip(se)
        .map(|(&e, &s)| Interval::around(e, z * s, transform))
        .collect()
}

/// Smallest order statistic `v` of `stats` with `#(v_b ≤ v) / B ≥ 1 − α`.
/// `None` for an empty slice.
pub fn sup_quantile(stats: &[f64], alpha: f64) -> Option<f64> {
    if stats.is_empty() {
        return None;
    }
    let mut sorted = stats.to_vec();
    sorted.sort_by(f64::total_cmp);
    let b = sorted.len();
    // Guard against (1 − α)·B landing a hair above an integer.
    let k = (((1.0 - alpha) * b as f64) - 1e-9).ceil().max(1.0) as usize;
    Some(sorted[k.min(b) - 1])
}

/// Simultaneous band on `[t1, t2]`, reported against the summary grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandSummary {
    pub t1: f64,
    pub t2: f64,
    /// Bootstrap quantile of the standardised sup deviation; `None` when no
    /// replicate produced a usable statistic.
    pub critical_value: Option<f64>,
    pub replicates_used: usize,
    /// Grid indices lying inside `[t1, t2]`.
    pub indices: Vec<usize>,
    /// Points with zero standard error, left out of the sup.
    pub excluded: Vec<bool>,
    pub plain: Vec<Interval>,
    pub log: Vec<Interval>,
}

impl BandSummary {
    pub fn times<'a>(&'a self, grid: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        self.indices.iter().map(move |&i| grid[i])
    }
}

pub(crate) fn band_from_replicates(
    grid: &[f64],
    estimate: &[f64],
    se: &[f64],
    columns: &[Vec<Option<f64>>],
    t1: f64,
    t2: f64,
    alpha: f64,
) -> BandSummary {
    let indices: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] >= t1 && grid[i] <= t2).collect();
    let excluded: Vec<bool> = indices.iter().map(|&i| se[i] <= 0.0).collect();
    let replicates = columns.first().map_or(0, Vec::len);
    let stats: Vec<f64> = (0..replicates)
        .filter_map(|b| {
            indices
                .iter()
                .filter(|&&i| se[i] > 0.0)
                .filter_map(|&i| columns[i][b].map(|v| (v - estimate[i]).abs() / se[i]))
                .reduce(f64::max)
        })
        .collect();
    let critical_value = sup_quantile(&stats, alpha);
    let v = critical_value.unwrap_or(f64::NAN);
    let plain = indices
        .iter()
        .map(|&i| Interval::around(estimate[i], v * se[i], Transform::Plain))
        .collect();
    let log = indices
        .iter()
        .map(|&i| Interval::around(estimate[i], v * se[i], Transform::Log))
        .collect();
    BandSummary {
        t1,
        t2,
        critical_value,
        replicates_used: stats.len(),
        indices,
        excluded,
        plain,
        log,
    }
}

/// Runs the bootstrap for a plan that carries a band interval and returns
/// the band alone.
pub fn confidence_band(sample: &Sample, plan: &BootstrapPlan) -> Result<BandSummary> {
    if plan.band.is_none() {
        return Err(Error::InvalidArgument("a band interval [t1, t2] is required".into()));
    }
    Ok(bootstrap_se(sample, plan)?.band.expect("band requested"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_order_statistic() {
        let stats: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(sup_quantile(&stats, 0.05), Some(95.0));
        assert_eq!(sup_quantile(&stats, 0.10), Some(90.0));
        assert_eq!(sup_quantile(&[3.0, 1.0, 2.0], 0.5), Some(2.0));
        assert_eq!(sup_quantile(&[], 0.05), None);
        // brute force: smallest v with empirical CDF >= 1 - alpha
        let s = [0.3, 2.2, 1.1, 0.7, 5.0, 0.9, 1.4];
        for alpha in [0.01, 0.1, 0.2, 0.5, 0.9] {
            let brute = s
                .iter()
                .copied()
                .filter(|&v| s.iter().filter(|&&x| x <= v).count() as f64 / 7.0 >= 1.0 - alpha)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(sup_quantile(&s, alpha), Some(brute));
        }
    }

    #[test]
    fn log_interval() {
        let ci = ci_pointwise(&[0.5, 0.0], &[0.1, 0.1], 0.05, Transform::Log);
        let z = z_critical(0.05);
        assert!((ci[0].lower - 0.5 * (-z * 0.2f64).exp()).abs() < 1e-15);
        assert!((ci[0].upper - 0.5 * (z * 0.2f64).exp()).abs() < 1e-15);
        assert!(ci[1].degenerate && ci[1].lower == 0.0 && ci[1].upper == 0.0);
        let p = ci_pointwise(&[0.5], &[0.1], 0.05, Transform::Plain);
        assert!((p[0].upper - p[0].lower - 2.0 * z * 0.1).abs() < 1e-15);
    }
}
