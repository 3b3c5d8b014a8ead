use gaptime::inference::{test_group, test_prev_type, test_stage_family, with_workers, TestResult, TestSettings};
use serde::Serialize;

use crate::args::{functional, TestArgs, TestKindArg, VariantArg};
use crate::error::{CliError, CliResult};
use crate::input;
use crate::output::{num, Table, Writer};

#[derive(Debug, Serialize)]
struct Row {
    /// What the two sides of the comparison are.
    a: String,
    b: String,
    #[serde(flatten)]
    result: TestResult,
}

#[derive(Debug, Serialize)]
struct Report {
    bootstrap: usize,
    alpha: f64,
    tests: Vec<Row>,
}

fn check(args: &TestArgs) -> CliResult<()> {
    let usage = |m: &str| Err(CliError::Usage(m.into()));
    if args.run.bootstrap < 2 {
        return usage("tests need --bootstrap of at least 2");
    }
    if (args.test == TestKindArg::Group) != args.group_col.is_some() {
        return usage("--group-col is required for, and only used by, --test group");
    }
    match args.test {
        TestKindArg::Stage => {
            let Some(j2) = args.vs_stage else {
                return usage("--test stage needs --vs-stage");
            };
            if j2 == args.stage {
                return usage("--stage and --vs-stage must differ");
            }
        }
        TestKindArg::Group => {
            if args.variant != [VariantArg::Cif] {
                return usage("--test group compares cumulative incidences only (--variant cif)");
            }
        }
        TestKindArg::Prevtype => {
            let Some(l) = args.prev_cause else {
                return usage("--test prevtype needs --prev-cause");
            };
            if l == args.cause {
                return usage(&format!("--cause and --prev-cause must differ (both are {l})"));
            }
        }
    }
    Ok(())
}

fn run_tests(args: &TestArgs, settings: &TestSettings) -> CliResult<Vec<Row>> {
    let data = input::load(&args.data, args.group_col.as_deref())?;
    let mut rows = Vec::new();
    match args.test {
        TestKindArg::Stage => {
            let j2 = args.vs_stage.expect("checked");
            let functionals = args
                .variant
                .iter()
                .map(|&v| functional(v, args.cause, args.plugin, None))
                .collect::<CliResult<Vec<_>>>()?;
            let sample = data.sample()?;
            let results = test_stage_family(&sample, args.stage, j2, &functionals, &args.times, settings)?;
            for r in results.into_iter().flatten() {
                rows.push(Row { a: format!("stage {}", args.stage), b: format!("stage {j2}"), result: r });
            }
        }
        TestKindArg::Group => {
            let [(la, ga), (lb, gb)] = data.split_groups()?;
            for &t in &args.times {
                let r = test_group(&ga, &gb, args.stage, args.cause, t, settings)?;
                rows.push(Row { a: la.clone(), b: lb.clone(), result: r });
            }
        }
        TestKindArg::Prevtype => {
            let l = args.prev_cause.expect("checked");
            let sample = data.sample()?;
            for &t in &args.times {
                let r = test_prev_type(&sample, args.stage, args.cause, l, t, settings)?;
                rows.push(Row { a: format!("prev {}", args.cause), b: format!("prev {l}"), result: r });
            }
        }
    }
    Ok(rows)
}

pub fn run(args: &TestArgs) -> CliResult<()> {
    check(args)?;
    let settings = TestSettings::new(args.run.bootstrap, args.run.alpha, args.run.seed);
    let rows = with_workers(args.run.workers, || run_tests(args, &settings))?;

    let mut table = Table::new([
        "kind", "functional", "stage", "a", "b", "t", "estimate_a", "estimate_b", "se", "statistic", "p_value",
        "reject", "inconclusive", "dropped",
    ]);
    for row in &rows {
        let r = &row.result;
        table.push(vec![
            format!("{:?}", r.kind).to_lowercase(),
            r.functional.to_string(),
            args.stage.to_string(),
            row.a.clone(),
            row.b.clone(),
            num(r.t),
            num(r.estimate_a),
            num(r.estimate_b),
            num(r.se),
            num(r.statistic),
            num(r.p_value),
            r.reject.to_string(),
            r.inconclusive.to_string(),
            r.dropped.to_string(),
        ]);
    }
    let report = Report { bootstrap: args.run.bootstrap, alpha: args.run.alpha, tests: rows };
    let mut w = Writer::new(&args.run.out, args.run.seed)?;
    w.emit(args.run.format, "tests", &[("tests", &table)], &report)?;
    Ok(())
}
