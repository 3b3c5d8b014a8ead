use serde::Serialize;

use super::bootstrap::{evaluate_targets, replicate_values};
use super::normal::{two_sided_p_value, z_critical};
use super::resample::derive_seed;
use super::sample_sd;
use crate::error::{Error, Result};
use crate::estimators::{Functional, Target};
use crate::sample::{fit_censor_survival, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TestKind {
    /// Same functional at two stages of one sample.
    Stage,
    /// Same functional and stage in two independent groups.
    Group,
    /// Conditional CIFs given two different previous causes.
    PrevType,
}

/// Bootstrap settings shared by the tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestSettings {
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl TestSettings {
    pub fn new(replicates: usize, alpha: f64, seed: u64) -> Self {
        TestSettings { replicates, alpha, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidArgument("at least two bootstrap replicates are required".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Outcome of a bootstrap Wald test of equality at one time point.
///
/// When the bootstrap SD of the difference is zero the statistic cannot be
/// formed; the result is then marked `inconclusive` with statistic 0,
/// p-value 1 and no rejection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub kind: TestKind,
    pub functional: Functional,
    pub t: f64,
    pub estimate_a: f64,
    pub estimate_b: f64,
    pub se: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub inconclusive: bool,
    /// Replicates dropped because either estimate was unidentifiable.
    pub dropped: usize,
}

pub(crate) fn build_result(
    kind: TestKind,
    functional: Functional,
    t: f64,
    a: f64,
    b: f64,
    diffs: &[Option<f64>],
    settings: &TestSettings,
) -> Result<TestResult> {
    let ok: Vec<f64> = diffs.iter().flatten().copied().collect();
    let dropped = diffs.len() - ok.len();
    if 2 * dropped > diffs.len() || ok.len() < 2 {
        return Err(Error::TooManyDropped {
            t,
            dropped,
            total: diffs.len(),
        });
    }
    let se = sample_sd(&ok).unwrap();
    let diff = (a - b).abs();
    let (statistic, inconclusive) = if se > 0.0 { (diff / se, false) } else { (0.0, true) };
    let p_value = if inconclusive { 1.0 } else { two_sided_p_value(statistic) };
    Ok(TestResult {
        kind,
        functional,
        t,
        estimate_a: a,
        estimate_b: b,
        se,
        statistic,
        p_value,
        reject: !inconclusive && statistic > z_critical(settings.alpha),
        inconclusive,
        dropped,
    })
}

fn point_values(sample: &Sample, targets: &[Target], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let g = fit_censor_survival(sample);
    evaluate_targets(sample, &g, targets)
        .into_iter()
        .zip(targets)
        .map(|(est, target)| {
            let est = est?;
            times
                .iter()
                .map(|&t| {
                    est.value_in_range(t).ok_or_else(|| {
                        Error::unidentifiable(
                            target.stage,
                            format!("{target} is not identifiable at t = {t} (range ends at {})", est.tau),
                        )
                    })
                })
                .collect()
        })
        .collect()
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidArgument("test times must be finite and non-negative".into()));
    }
    Ok(())
}

/// Joint-resampling tests comparing target pairs `(a_i, b_i)` at every
/// time. Returns `out[pair][time]`.
fn joint_tests(
    kind: TestKind,
    sample: &Sample,
    pairs: &[(Target, Target)],
    times: &[f64],
    settings: &TestSettings,
) -> Result<Vec<Vec<TestResult>>> {
    settings.validate()?;
    check_times(times)?;
    let targets: Vec<Target> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let points = point_values(sample, &targets, times)?;
    let reps = replicate_values(sample, &targets, times, settings.replicates, settings.seed);
    pairs
        .iter()
        .enumerate()
        .map(|(p, (a, _))| {
            times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let diffs: Vec<Option<f64>> = reps
                        .iter()
                        .map(|r| Some(r[2 * p][i]? - r[2 * p + 1][i]?))
                        .collect();
                    build_result(
                        kind,
                        a.functional,
                        t,
                        points[2 * p][i],
                        points[2 * p + 1][i],
                        &diffs,
                        settings,
                    )
                })
                .collect()
        })
        .collect()
}

/// Tests `E^(j)(t) = E^(j')(t)` for several functionals and times at once,
/// sharing one set of bootstrap replicates. Returns
/// `out[functional][time]`.
pub fn test_stage_family(
    sample: &Sample,
    j: u32,
    j2: u32,
    functionals: &[Functional],
    times: &[f64],
    settings: &TestSettings,
) -> Result<Vec<Vec<TestResult>>> {
    if j == j2 {
        return Err(Error::InvalidArgument(format!("both stages are {j}; pick two distinct stages")));
    }
    let pairs: Vec<(Target, Target)> = functionals
        .iter()
        .map(|&f| (Target::new(j, f), Target::new(j2, f)))
        .collect();
    joint_tests(TestKind::Stage, sample, &pairs, times, settings)
}

/// Test of `E^(j)(t) = E^(j')(t)` for one functional, with whole-subject
/// resampling so the correlation between a subject's stages is kept.
pub fn test_stage(
    sample: &Sample,
    j: u32,
    j2: u32,
    functional: Functional,
    t: f64,
    settings: &TestSettings,
) -> Result<TestResult> {
    Ok(test_stage_family(sample, j, j2, &[functional], &[t], settings)?
        .remove(0)
        .remove(0))
}

/// Test of `F_k^(j)(t | G1) = F_k^(j)(t | G2)`; each group is resampled
/// separately from its own stream.
pub fn test_group(
    group1: &Sample,
    group2: &Sample,
    j: u32,
    k: u8,
    t: f64,
    settings: &TestSettings,
) -> Result<TestResult> {
    settings.validate()?;
    check_times(&[t])?;
    let functional = Functional::Cif { cause: k };
    let target = [Target::new(j, functional)];
    let a = point_values(group1, &target, &[t])?[0][0];
    let b = point_values(group2, &target, &[t])?[0][0];
    let reps1 = replicate_values(group1, &target, &[t], settings.replicates, derive_seed(settings.seed, 1));
    let reps2 = replicate_values(group2, &target, &[t], settings.replicates, derive_seed(settings.seed, 2));
    let diffs: Vec<Option<f64>> = reps1
        .iter()
        .zip(&reps2)
        .map(|(r1, r2)| Some(r1[0][0]? - r2[0][0]?))
        .collect();
    build_result(TestKind::Group, functional, t, a, b, &diffs, settings)
}

/// Test of `F_{k|k}^(j)(t) = F_{k|l}^(j)(t)`: does the cause of the previous
/// event change the stage-`j` CIF of cause `k`?
pub fn test_prev_type(
    sample: &Sample,
    j: u32,
    k: u8,
    l: u8,
    t: f64,
    settings: &TestSettings,
) -> Result<TestResult> {
    if k == l {
        return Err(Error::InvalidArgument(format!(
            "previous causes must differ (got k = l = {k})"
        )));
    }
    let pair = (
        Target::new(j, Functional::CondCif { cause: k, prev: k }),
        Target::new(j, Functional::CondCif { cause: k, prev: l }),
    );
    Ok(joint_tests(TestKind::PrevType, sample, &[pair], &[t], settings)?
        .remove(0)
        .remove(0))
}
