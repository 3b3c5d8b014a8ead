use rayon::prelude::*;
use serde::Serialize;

use super::generator::{gen_sample, SimConfig};
use super::truth::true_value;
use crate::error::{Error, Result};
use crate::estimators::{Functional, SurvivalVariant, Target};
use crate::inference::{
    build_result, ci_pointwise, derive_seed, evaluate_targets, replicate_rng, replicate_values,
    sample_sd, TestKind, TestSettings, Transform,
};
use crate::sample::fit_censor_survival;

/// Which estimators and tests a study evaluates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyPlan {
    pub stages: Vec<u32>,
    pub functionals: Vec<Functional>,
    /// Stage pair compared by the stage-equality tests, if any.
    pub test_stages: Option<(u32, u32)>,
    pub test_functionals: Vec<Functional>,
}

impl StudyPlan {
    /// Cause-1 incidence, the four survival estimators and the cause-1
    /// cumulative hazard with each survival plug-in, at stages 2 and 3; the
    /// same nine functionals tested for equality between stages 2 and 3.
    pub fn standard() -> Self {
        let mut functionals = vec![Functional::Cif { cause: 1 }];
        functionals.extend(SurvivalVariant::ALL.iter().map(|&v| Functional::Survival(v)));
        functionals.extend(
            SurvivalVariant::ALL
                .iter()
                .map(|&plugin| Functional::CumCsh { cause: 1, plugin }),
        );
        StudyPlan {
            stages: vec![2, 3],
            test_functionals: functionals.clone(),
            functionals,
            test_stages: Some((2, 3)),
        }
    }

    fn targets(&self) -> Vec<Target> {
        let mut out: Vec<Target> = Vec::new();
        let mut push = |t: Target| {
            if !out.contains(&t) {
                out.push(t);
            }
        };
        for &j in &self.stages {
            for &f in &self.functionals {
                push(Target::new(j, f));
            }
        }
        if let Some((a, b)) = self.test_stages {
            for &f in &self.test_functionals {
                push(Target::new(a, f));
                push(Target::new(b, f));
            }
        }
        out
    }
}

/// Monte Carlo summary of one estimator at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummaryRow {
    pub t: f64,
    pub truth: Option<f64>,
    /// Mean estimate minus truth.
    pub bias: Option<f64>,
    /// SD of the estimates across replications; absent with fewer than two.
    pub ese: Option<f64>,
    /// Mean bootstrap standard error.
    pub bse: f64,
    /// Fraction of log-scale intervals covering the truth.
    pub cp: Option<f64>,
    pub reps_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McTable {
    pub target: Target,
    pub rows: Vec<McSummaryRow>,
}

/// Rejection fraction of one stage-equality test at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionRow {
    pub functional: Functional,
    pub t: f64,
    pub rate: f64,
    pub tests_used: usize,
    /// Tests whose bootstrap SD was zero (counted as not rejected).
    pub inconclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McStudy {
    pub config: SimConfig,
    pub grid: Vec<f64>,
    pub tables: Vec<McTable>,
    pub rejection: Vec<RejectionRow>,
    pub reps: usize,
    /// Replications left out because some estimate or test could not be
    /// formed.
    pub failed_reps: usize,
    pub failure_messages: Vec<String>,
}

impl McStudy {
    pub fn table(&self, target: Target) -> Option<&McTable> {
        self.tables.iter().find(|t| t.target == target)
    }

    pub fn rejection_rates(&self, functional: Functional) -> Vec<&RejectionRow> {
        self.rejection.iter().filter(|r| r.functional == functional).collect()
    }
}

struct Cell {
    estimate: f64,
    se: f64,
    covered: bool,
}

struct RepOutcome {
    cells: Vec<Vec<Cell>>,
    /// `(reject, inconclusive)` per test functional and time.
    tests: Vec<Vec<(bool, bool)>>,
}

fn one_replication(
    config: &SimConfig,
    plan: &StudyPlan,
    targets: &[Target],
    grid: &[f64],
    r: usize,
) -> Result<RepOutcome> {
    let seed = derive_seed(config.seed, r as u64);
    let sample = gen_sample(config, &mut replicate_rng(seed, 0))?;
    let g = fit_censor_survival(&sample);
    let points: Vec<Vec<f64>> = evaluate_targets(&sample, &g, targets)
        .into_iter()
        .zip(targets)
        .map(|(est, target)| {
            let est = est?;
            grid.iter()
                .map(|&t| {
                    est.value_in_range(t).ok_or_else(|| {
                        Error::unidentifiable(target.stage, format!("{target} beyond range at t = {t}"))
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let reps = replicate_values(&sample, targets, grid, config.bootstrap, seed);
    let index = |t: Target| targets.iter().position(|&x| x == t).expect("target listed");

    let mut cells = Vec::new();
    for &j in &plan.stages {
        for &f in &plan.functionals {
            let ti = index(Target::new(j, f));
            let mut row = Vec::with_capacity(grid.len());
            for (i, &t) in grid.iter().enumerate() {
                let ok: Vec<f64> = reps.iter().filter_map(|b| b[ti][i]).collect();
                let dropped = reps.len() - ok.len();
                if 2 * dropped > reps.len() || ok.len() < 2 {
                    return Err(Error::TooManyDropped { t, dropped, total: reps.len() });
                }
                let estimate = points[ti][i];
                let se = sample_sd(&ok).expect("two or more values");
                let ci = ci_pointwise(&[estimate], &[se], config.level_alpha, Transform::Log)[0];
                let covered = true_value(f, config.alpha_at(j), t).is_some_and(|v| ci.contains(v));
                row.push(Cell { estimate, se, covered });
            }
            cells.push(row);
        }
    }

    let mut tests = Vec::new();
    if let Some((a, b)) = plan.test_stages {
        let settings = TestSettings::new(config.bootstrap, config.level_alpha, seed);
        for &f in &plan.test_functionals {
            let (ia, ib) = (index(Target::new(a, f)), index(Target::new(b, f)));
            let mut row = Vec::with_capacity(grid.len());
            for (i, &t) in grid.iter().enumerate() {
                let diffs: Vec<Option<f64>> =
                    reps.iter().map(|r| Some(r[ia][i]? - r[ib][i]?)).collect();
                let res = build_result(
                    TestKind::Stage,
                    f,
                    t,
                    points[ia][i],
                    points[ib][i],
                    &diffs,
                    &settings,
                )?;
                row.push((res.reject, res.inconclusive));
            }
            tests.push(row);
        }
    }
    Ok(RepOutcome { cells, tests })
}

/// Runs `config.reps` replications: generate a sample, estimate every
/// planned target on the grid, bootstrap its standard error and log-scale
/// interval, and run the stage-equality tests. Replication `r` draws from
/// seeds derived from `(config.seed, r)`, so results do not depend on the
/// number of worker threads.
///
/// A replication in which any estimate or test cannot be formed is left out
/// and counted; more than 5% such replications is an error.
pub fn run_mc_study(config: &SimConfig, plan: &StudyPlan) -> Result<McStudy> {
    config.validate()?;
    let mut stages = plan.stages.iter().chain(plan.test_stages.iter().flat_map(|(a, b)| [a, b]));
    if let Some(j) = stages.find(|&&j| j > config.max_stage || j == 0) {
        return Err(Error::InvalidArgument(format!(
            "stage {j} outside 1..={} (max_stage)",
            config.max_stage
        )));
    }
    let grid = config.effective_grid();
    let targets = plan.targets();
    let outcomes: Vec<Result<RepOutcome>> = (0..config.reps)
        .into_par_iter()
        .map(|r| one_replication(config, plan, &targets, &grid, r))
        .collect();

    let mut ok = Vec::with_capacity(outcomes.len());
    let mut failure_messages = Vec::new();
    for (r, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(v) => ok.push(v),
            Err(e) => failure_messages.push(format!("replication {r}: {e}")),
        }
    }
    let failed = failure_messages.len();
    if failed * 20 > config.reps {
        return Err(Error::TooManyFailures {
            failed,
            total: config.reps,
            last: failure_messages.last().cloned().unwrap_or_default(),
        });
    }

    let mut tables = Vec::new();
    let mut c = 0;
    for &j in &plan.stages {
        for &f in &plan.functionals {
            let rows = grid
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let cells: Vec<&Cell> = ok.iter().map(|o| &o.cells[c][i]).collect();
                    summarise(&cells, t, true_value(f, config.alpha_at(j), t))
                })
                .collect();
            tables.push(McTable { target: Target::new(j, f), rows });
            c += 1;
        }
    }

    let mut rejection = Vec::new();
    if plan.test_stages.is_some() {
        for (fi, &f) in plan.test_functionals.iter().enumerate() {
            for (i, &t) in grid.iter().enumerate() {
                let used = ok.len();
                let rejects = ok.iter().filter(|o| o.tests[fi][i].0).count();
                let inconclusive = ok.iter().filter(|o| o.tests[fi][i].1).count();
                rejection.push(RejectionRow {
                    functional: f,
                    t,
                    rate: if used > 0 { rejects as f64 / used as f64 } else { f64::NAN },
                    tests_used: used,
                    inconclusive,
                });
            }
        }
    }

    Ok(McStudy {
        config: config.clone(),
        grid,
        tables,
        rejection,
        reps: config.reps,
        failed_reps: failed,
        failure_messages,
    })
}

fn summarise(cells: &[&Cell], t: f64, truth: Option<f64>) -> McSummaryRow {
    let m = cells.len();
    let estimates: Vec<f64> = cells.iter().map(|c| c.estimate).collect();
    let mean = estimates.iter().sum::<f64>() / m.max(1) as f64;
    McSummaryRow {
        t,
        truth,
        bias: truth.filter(|_| m > 0).map(|v| mean - v),
        ese: sample_sd(&estimates),
        bse: cells.iter().map(|c| c.se).sum::<f64>() / m.max(1) as f64,
        cp: truth
            .filter(|_| m > 0)
            .map(|_| cells.iter().filter(|c| c.covered).count() as f64 / m as f64),
        reps_used: m,
    }
}
