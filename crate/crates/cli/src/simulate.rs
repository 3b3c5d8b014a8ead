use std::fs;
use std::time::Instant;

use gaptime::inference::{replicate_rng, with_workers};
use gaptime::prelude::*;
use gaptime::simulation::{gen_sample, run_mc_study, McStudy, SimConfig, StudyPlan};
use serde::Serialize;

use crate::args::{parse_pair, SimulateArgs};
use crate::error::{CliError, CliResult};
use crate::output::{num, opt, Table, Writer};

fn config(args: &SimulateArgs) -> CliResult<SimConfig> {
    let mut c = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => SimConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $arg:expr),* $(,)?) => {
            $(if let Some(v) = $arg.clone() { c.$field = v; })*
        };
    }
    set!(
        theta <- args.theta,
        alpha <- args.rates,
        censor_upper <- args.censor_upper,
        n <- args.n,
        reps <- args.reps,
        bootstrap <- args.bootstrap,
        grid <- args.grid,
        max_stage <- args.max_stage,
        level_alpha <- args.level,
        seed <- args.seed,
    );
    c.validate().map_err(|e| match e {
        gaptime::Error::InvalidArgument(m) => CliError::Config(m),
        other => other.into(),
    })?;
    Ok(c)
}

fn plan(args: &SimulateArgs) -> CliResult<StudyPlan> {
    let mut plan = StudyPlan::standard();
    plan.stages = args.stages.clone();
    plan.test_stages = if args.test_stages == "none" {
        None
    } else {
        Some(parse_pair::<u32>(&args.test_stages, "--test-stages")?)
    };
    if plan.test_stages.is_none() {
        plan.test_functionals.clear();
    }
    Ok(plan)
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    seed: u64,
    config: &'a SimConfig,
    plan: Option<&'a StudyPlan>,
    workers: Option<usize>,
    wall_time_seconds: f64,
    reps: usize,
    failed_reps: usize,
    failure_messages: Vec<String>,
    outputs: Vec<String>,
}

fn summary_table(study: &McStudy) -> Table {
    let c = &study.config;
    let mut t = Table::new([
        "target", "stage", "n", "theta", "t", "truth", "bias", "ese", "bse", "cp", "reps_used", "flag",
    ]);
    for table in &study.tables {
        for row in &table.rows {
            let flag = if row.ese.is_none() { "ese_undefined" } else { "" };
            t.push(vec![
                table.target.functional.to_string(),
                table.target.stage.to_string(),
                c.n.to_string(),
                num(c.theta),
                num(row.t),
                opt(row.truth),
                opt(row.bias),
                opt(row.ese),
                num(row.bse),
                opt(row.cp),
                row.reps_used.to_string(),
                flag.into(),
            ]);
        }
    }
    t
}

/// One row per time, one column per tested functional.
fn rejection_table(study: &McStudy) -> Table {
    let mut functionals: Vec<Functional> = Vec::new();
    for r in &study.rejection {
        if !functionals.contains(&r.functional) {
            functionals.push(r.functional);
        }
    }
    let mut columns = vec!["n".to_string(), "theta".into(), "t".into()];
    columns.extend(functionals.iter().map(|f| format!("phi_{f}")));
    let mut t = Table::new(columns);
    for &time in &study.grid {
        let mut row = vec![study.config.n.to_string(), num(study.config.theta), num(time)];
        for &f in &functionals {
            let rate = study.rejection.iter().find(|r| r.functional == f && r.t == time).map(|r| r.rate);
            row.push(opt(rate));
        }
        t.push(row);
    }
    t
}

fn sample_table(sample: &Sample) -> Table {
    let (rows, censor) = sample.to_rows();
    let mut t = Table::new(["subject", "stage", "gap", "cause", "censor"]);
    for r in rows {
        let c = censor[&r.subject_id];
        t.push(vec![r.subject_id, r.stage.to_string(), num(r.gap_time), r.cause.to_string(), num(c)]);
    }
    t
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let config = config(args)?;
    let plan = plan(args)?;
    let started = Instant::now();
    let mut w = Writer::new(&args.out, config.seed)?;

    let (reps, failed, messages, plan_ref) = if args.sample_only {
        let sample = gen_sample(&config, &mut replicate_rng(config.seed, 0))?;
        w.csv("sample", &sample_table(&sample))?;
        (0, 0, Vec::new(), None)
    } else {
        let study = with_workers(args.workers, || run_mc_study(&config, &plan))?;
        w.csv("summary", &summary_table(&study))?;
        if plan.test_stages.is_some() {
            w.csv("rejection", &rejection_table(&study))?;
        }
        if study.failed_reps > 0 {
            eprintln!("{} of {} replications failed", study.failed_reps, study.reps);
        }
        (study.reps, study.failed_reps, study.failure_messages, Some(&plan))
    };

    let outputs = w
        .written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        config: &config,
        plan: plan_ref,
        workers: args.workers,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        reps,
        failed_reps: failed,
        failure_messages: messages,
        outputs,
    };
    w.json("manifest", &manifest)
}
