use gaptime::inference::{bootstrap_se, with_workers, BootstrapPlan, BootstrapSummary, Interval};
use gaptime::prelude::*;
use serde::Serialize;

use crate::args::{functional, parse_pair, EstimateArgs, VariantArg};
use crate::error::{is_per_target, CliError, CliResult};
use crate::input;
use crate::output::{num, opt, Table, Writer};

#[derive(Debug, Serialize)]
struct CurveRow {
    t: f64,
    value: f64,
    flag: &'static str,
}

#[derive(Debug, Serialize)]
struct GridRow {
    t: f64,
    estimate: f64,
    se: Option<f64>,
    lower_plain: Option<f64>,
    upper_plain: Option<f64>,
    lower_log: Option<f64>,
    upper_log: Option<f64>,
    band_lower: Option<f64>,
    band_upper: Option<f64>,
    replicates_used: Option<usize>,
    flag: String,
}

#[derive(Debug, Serialize)]
struct BandInfo {
    t1: f64,
    t2: f64,
    critical_value: Option<f64>,
    replicates_used: usize,
}

#[derive(Debug, Serialize)]
struct TargetReport {
    curve_id: String,
    stage: u32,
    functional: String,
    status: &'static str,
    diagnostic: Option<String>,
    tau: Option<f64>,
    truncated_at: Option<f64>,
    warnings: Vec<String>,
    curve: Vec<CurveRow>,
    grid: Vec<GridRow>,
    band: Option<BandInfo>,
}

#[derive(Debug, Serialize)]
struct Report {
    n: usize,
    num_causes: u8,
    bootstrap: usize,
    alpha: f64,
    targets: Vec<TargetReport>,
}

fn targets(args: &EstimateArgs) -> CliResult<Vec<Target>> {
    let mut out = Vec::new();
    let survival = [VariantArg::Sum, VariantArg::Ipcw, VariantArg::Pl, VariantArg::Unc];
    for &j in &args.stage {
        for &v in &args.variant {
            if survival.contains(&v) {
                out.push(Target::new(j, functional(v, 1, args.plugin, None)?));
                continue;
            }
            for &k in &args.cause {
                if v == VariantArg::Cond {
                    if args.prev_cause.is_empty() {
                        return Err(CliError::Usage("--variant cond needs --prev-cause".into()));
                    }
                    for &l in &args.prev_cause {
                        out.push(Target::new(j, functional(v, k, args.plugin, Some(l))?));
                    }
                } else {
                    out.push(Target::new(j, functional(v, k, args.plugin, None)?));
                }
            }
        }
    }
    let mut seen = Vec::new();
    out.retain(|t| {
        let fresh = !seen.contains(t);
        seen.push(*t);
        fresh
    });
    Ok(out)
}

/// Deciles of the uncensored gaps at the requested stages, pooled.
pub fn default_grid(sample: &Sample, stages: &[u32]) -> Vec<f64> {
    let mut gaps: Vec<f64> = sample
        .subjects()
        .iter()
        .flat_map(|s| s.records())
        .filter(|r| r.is_event() && stages.contains(&r.stage))
        .map(|r| r.gap_time)
        .collect();
    gaps.sort_by(f64::total_cmp);
    let m = gaps.len();
    if m == 0 {
        return Vec::new();
    }
    let mut grid: Vec<f64> = (1..10)
        .map(|d| gaps[((d * m).div_ceil(10)).max(1) - 1])
        .collect();
    grid.dedup();
    grid
}

fn curve_id(target: &Target) -> String {
    format!("{}_j{}", target.functional, target.stage)
}

fn interval_bounds(iv: &Interval) -> (Option<f64>, Option<f64>) {
    (Some(iv.lower), Some(iv.upper))
}

fn curve_rows(est: &EstimateCurve) -> Vec<CurveRow> {
    est.rows().into_iter().map(|(t, value, flag)| CurveRow { t, value, flag }).collect()
}

fn from_summary(s: &BootstrapSummary) -> (Vec<GridRow>, Option<BandInfo>) {
    let mut rows = Vec::new();
    for (i, &t) in s.grid.iter().enumerate() {
        let (lp, up) = interval_bounds(&s.ci_plain[i]);
        let (ll, ul) = interval_bounds(&s.ci_log[i]);
        let mut flags = Vec::new();
        if s.inserted[i] {
            flags.push("inserted");
        }
        if s.ci_log[i].degenerate {
            flags.push("degenerate");
        }
        let (mut bl, mut bu) = (None, None);
        if let Some(band) = &s.band {
            if let Some(p) = band.indices.iter().position(|&k| k == i) {
                if band.critical_value.is_some() {
                    bl = Some(band.plain[p].lower);
                    bu = Some(band.plain[p].upper);
                }
                if band.excluded[p] {
                    flags.push("band_excluded");
                }
            }
        }
        rows.push(GridRow {
            t,
            estimate: s.estimate[i],
            se: Some(s.se[i]),
            lower_plain: lp,
            upper_plain: up,
            lower_log: ll,
            upper_log: ul,
            band_lower: bl,
            band_upper: bu,
            replicates_used: Some(s.used[i]),
            flag: flags.join(";"),
        });
    }
    for &t in &s.clipped {
        rows.push(point_row(&s.point, t));
    }
    rows.sort_by(|a, b| a.t.total_cmp(&b.t));
    let band = s.band.as_ref().map(|b| BandInfo {
        t1: b.t1,
        t2: b.t2,
        critical_value: b.critical_value,
        replicates_used: b.replicates_used,
    });
    (rows, band)
}

fn point_row(est: &EstimateCurve, t: f64) -> GridRow {
    GridRow {
        t,
        estimate: est.value(t),
        se: None,
        lower_plain: None,
        upper_plain: None,
        lower_log: None,
        upper_log: None,
        band_lower: None,
        band_upper: None,
        replicates_used: None,
        flag: if est.in_range(t) { String::new() } else { "beyond_range".into() },
    }
}

fn run_target(
    sample: &Sample,
    g: &StepCurve,
    target: Target,
    grid: &[f64],
    args: &EstimateArgs,
    band: Option<(f64, f64)>,
) -> gaptime::Result<TargetReport> {
    let mut point = target.estimate(sample, g)?;
    let monotone = args.monotone && matches!(target.functional, Functional::Survival(_));
    if monotone {
        point = point.monotone_envelope();
    }
    let (grid_rows, band_info) = if args.run.bootstrap == 0 || monotone {
        (grid.iter().map(|&t| point_row(&point, t)).collect(), None)
    } else {
        let mut plan = BootstrapPlan::new(target, args.run.bootstrap, grid.to_vec(), args.run.alpha, args.run.seed);
        if let Some((t1, t2)) = band {
            plan = plan.with_band(t1, t2);
        }
        from_summary(&bootstrap_se(sample, &plan)?)
    };
    Ok(TargetReport {
        curve_id: curve_id(&target),
        stage: target.stage,
        functional: target.functional.to_string(),
        status: "ok",
        diagnostic: None,
        tau: Some(point.tau),
        truncated_at: point.truncated_at,
        warnings: point.warnings.clone(),
        curve: curve_rows(&point),
        grid: grid_rows,
        band: band_info,
    })
}

fn tables(reports: &[TargetReport]) -> (Table, Table, Table) {
    let mut curves = Table::new(["curve_id", "t", "value", "lower", "upper", "flag"]);
    let mut grid = Table::new([
        "curve_id", "t", "estimate", "se", "lower_plain", "upper_plain", "lower_log", "upper_log", "band_lower",
        "band_upper", "replicates_used", "flag",
    ]);
    let mut summary = Table::new([
        "curve_id", "stage", "functional", "status", "tau", "truncated_at", "band_t1", "band_t2", "band_critical_value",
        "diagnostic",
    ]);
    for r in reports {
        for c in &r.curve {
            curves.push(vec![r.curve_id.clone(), num(c.t), num(c.value), String::new(), String::new(), c.flag.into()]);
        }
        for g in &r.grid {
            // pointwise log-scale intervals for plotting
            let mut flag = String::from("ci_log");
            if !g.flag.is_empty() {
                flag.push(';');
                flag.push_str(&g.flag);
            }
            curves.push(vec![r.curve_id.clone(), num(g.t), num(g.estimate), opt(g.lower_log), opt(g.upper_log), flag]);
            grid.push(vec![
                r.curve_id.clone(),
                num(g.t),
                num(g.estimate),
                opt(g.se),
                opt(g.lower_plain),
                opt(g.upper_plain),
                opt(g.lower_log),
                opt(g.upper_log),
                opt(g.band_lower),
                opt(g.band_upper),
                g.replicates_used.map(|u| u.to_string()).unwrap_or_default(),
                g.flag.clone(),
            ]);
        }
        summary.push(vec![
            r.curve_id.clone(),
            r.stage.to_string(),
            r.functional.clone(),
            r.status.into(),
            opt(r.tau),
            opt(r.truncated_at),
            opt(r.band.as_ref().map(|b| b.t1)),
            opt(r.band.as_ref().map(|b| b.t2)),
            opt(r.band.as_ref().and_then(|b| b.critical_value)),
            r.diagnostic.clone().unwrap_or_default(),
        ]);
    }
    (curves, grid, summary)
}

pub fn run(args: &EstimateArgs) -> CliResult<()> {
    let band = args.band.as_deref().map(|b| parse_pair::<f64>(b, "--band")).transpose()?;
    let targets = targets(args)?;
    let data = input::load(&args.data, None)?;
    let sample = data.sample()?;
    let grid = if args.grid.is_empty() {
        let g = default_grid(&sample, &args.stage);
        if g.is_empty() {
            return Err(gaptime::Error::Unidentifiable {
                stage: args.stage[0],
                detail: "no uncensored gaps to build a default grid from".into(),
            }
            .into());
        }
        g
    } else {
        args.grid.clone()
    };
    let g = fit_censor_survival(&sample);

    let results = with_workers(args.run.workers, || {
        targets
            .iter()
            .map(|&t| (t, run_target(&sample, &g, t, &grid, args, band)))
            .collect::<Vec<_>>()
    });
    let mut reports = Vec::new();
    let mut last_skip = None;
    for (target, res) in results {
        match res {
            Ok(r) => reports.push(r),
            Err(e) if is_per_target(&e) => {
                eprintln!("{}: {e}", curve_id(&target));
                reports.push(TargetReport {
                    curve_id: curve_id(&target),
                    stage: target.stage,
                    functional: target.functional.to_string(),
                    status: "skipped",
                    diagnostic: Some(e.to_string()),
                    tau: None,
                    truncated_at: None,
                    warnings: Vec::new(),
                    curve: Vec::new(),
                    grid: Vec::new(),
                    band: None,
                });
                last_skip = Some(e);
            }
            Err(e) => return Err(e.into()),
        }
    }

    let report = Report {
        n: sample.n(),
        num_causes: sample.num_causes(),
        bootstrap: args.run.bootstrap,
        alpha: args.run.alpha,
        targets: reports,
    };
    let (curves, grid_table, summary) = tables(&report.targets);
    let mut w = Writer::new(&args.run.out, args.run.seed)?;
    w.emit(
        args.run.format,
        "estimates",
        &[("curves", &curves), ("estimates", &grid_table), ("targets", &summary)],
        &report,
    )?;
    if report.targets.iter().all(|t| t.status != "ok") {
        if let Some(e) = last_skip {
            return Err(e.into());
        }
    }
    Ok(())
}
