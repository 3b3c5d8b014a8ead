//! Direct evaluation of every estimator from its defining sums, one time
//! point at a time. Quadratic and slow on purpose: no sorting, no sweeps,
//! no shared code with the library beyond the data types.
#![allow(dead_code)]

use gaptime::prelude::*;

pub struct Rec {
    pub start: f64,
    pub gap: f64,
    pub cum: f64,
    pub cause: u8,
    pub prev_cause: u8,
}

pub fn stage_records(s: &Sample, j: u32) -> Vec<Rec> {
    let mut out = Vec::new();
    for subj in s.subjects() {
        for (idx, r) in subj.records().iter().enumerate() {
            if r.stage == j {
                let (start, prev_cause) = if idx == 0 {
                    (0.0, 0)
                } else {
                    let p = &subj.records()[idx - 1];
                    (p.cum_time, p.cause)
                };
                out.push(Rec { start, gap: r.gap_time, cum: r.cum_time, cause: r.cause, prev_cause });
            }
        }
    }
    out
}

pub fn g_hat(s: &Sample, t: f64) -> f64 {
    s.subjects().iter().filter(|x| x.censor_time() > t).count() as f64 / s.n() as f64
}

fn inv(g: f64) -> f64 {
    if g > 0.0 {
        1.0 / g
    } else {
        0.0
    }
}

pub type G<'a> = &'a dyn Fn(f64) -> f64;

pub fn cif(s: &Sample, g: G, j: u32, k: u8, t: f64) -> f64 {
    let mut sum = 0.0;
    for r in stage_records(s, j) {
        if r.gap <= t && r.cause == k {
            sum += inv(g(r.cum));
        }
    }
    sum / s.n() as f64
}

pub fn surv_sum_unfloored(s: &Sample, g: G, j: u32, t: f64) -> f64 {
    1.0 - (1..=s.num_causes()).map(|k| cif(s, g, j, k, t)).sum::<f64>()
}

pub fn surv_sum(s: &Sample, g: G, j: u32, t: f64) -> f64 {
    surv_sum_unfloored(s, g, j, t).max(0.0)
}

pub fn surv_ipcw(s: &Sample, g: G, j: u32, t: f64) -> f64 {
    let mut sum = 0.0;
    for r in stage_records(s, j) {
        if r.gap > t {
            sum += inv(g(r.start + t));
        }
    }
    sum / s.n() as f64
}

pub fn surv_pl(s: &Sample, g: G, j: u32, t: f64) -> f64 {
    let recs = stage_records(s, j);
    let mut times: Vec<f64> = recs.iter().filter(|r| r.cause > 0 && r.gap <= t).map(|r| r.gap).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut prod = 1.0;
    for v in times {
        let num: f64 = recs.iter().filter(|r| r.gap == v && r.cause > 0).map(|r| inv(g(r.start + v))).sum();
        let den: f64 = recs.iter().filter(|r| r.gap >= v).map(|r| inv(g(r.start + v))).sum();
        prod *= 1.0 - num / den;
    }
    prod
}

pub fn surv_unc(s: &Sample, g: G, j: u32, t: f64) -> f64 {
    let mut sum = 0.0;
    for r in stage_records(s, j) {
        if r.gap > t && r.cause > 0 {
            sum += inv(g(r.cum));
        }
    }
    sum / s.n() as f64
}

pub fn surv(s: &Sample, g: G, j: u32, v: SurvivalVariant, t: f64) -> f64 {
    match v {
        SurvivalVariant::Sum => surv_sum(s, g, j, t),
        SurvivalVariant::Ipcw => surv_ipcw(s, g, j, t),
        SurvivalVariant::ProductLimit => surv_pl(s, g, j, t),
        SurvivalVariant::Uncensored => surv_unc(s, g, j, t),
    }
}

/// Every time at which a stage-`j` survival or incidence curve can jump.
fn breakpoints(s: &Sample, j: u32) -> Vec<f64> {
    let mut b: Vec<f64> = Vec::new();
    for r in stage_records(s, j) {
        b.push(r.gap);
        for subj in s.subjects() {
            b.push(subj.censor_time() - r.start);
        }
    }
    b
}

/// `f(u−)` for a right-continuous step function whose jumps lie in `bps`.
fn left_limit(f: impl Fn(f64) -> f64, u: f64, bps: &[f64]) -> f64 {
    let prev = bps.iter().copied().filter(|&b| b < u).fold(0.0, f64::max);
    f(0.5 * (prev + u))
}

/// Cumulative hazard, or `None` past the first jump where the survival
/// left limit is not positive.
pub fn cum_csh(s: &Sample, g: G, j: u32, k: u8, plugin: SurvivalVariant, t: f64) -> Option<f64> {
    let recs = stage_records(s, j);
    let bps = breakpoints(s, j);
    let mut us: Vec<f64> = recs.iter().filter(|r| r.cause == k).map(|r| r.gap).collect();
    us.sort_by(f64::total_cmp);
    us.dedup();
    let mut sum = 0.0;
    for u in us {
        let sl = left_limit(|x| surv(s, g, j, plugin, x), u, &bps);
        if sl <= 0.0 {
            return if t < u { Some(sum) } else { None };
        }
        if u > t {
            break;
        }
        let jump: f64 = recs.iter().filter(|r| r.gap == u && r.cause == k).map(|r| inv(g(r.cum))).sum::<f64>()
            / s.n() as f64;
        sum += jump / sl;
    }
    Some(sum)
}

pub fn cond_cif(s: &Sample, g: G, j: u32, k: u8, l: u8, t: f64) -> f64 {
    let t_max = stage_records(s, j - 1)
        .iter()
        .filter(|r| r.cause == l)
        .map(|r| r.gap)
        .fold(f64::NEG_INFINITY, f64::max);
    let pi = cif(s, g, j - 1, l, t_max);
    let mut num = 0.0;
    for r in stage_records(s, j) {
        if r.gap <= t && r.cause == k && r.prev_cause == l {
            num += inv(g(r.cum));
        }
    }
    num / s.n() as f64 / pi
}

/// Textbook Kaplan–Meier of the stage-1 gap (any cause counts as an event).
pub fn kaplan_meier(s: &Sample, t: f64) -> f64 {
    let recs = stage_records(s, 1);
    let mut times: Vec<f64> = recs.iter().filter(|r| r.cause > 0 && r.gap <= t).map(|r| r.gap).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .iter()
        .map(|&v| {
            let d = recs.iter().filter(|r| r.gap == v && r.cause > 0).count() as f64;
            let at_risk = recs.iter().filter(|r| r.gap >= v).count() as f64;
            1.0 - d / at_risk
        })
        .product()
}

/// Kaplan–Meier of the censoring variable from the stage-1 records
/// (censored records are its "events").
pub fn reverse_km_points(s: &Sample) -> Vec<(f64, f64)> {
    let recs = stage_records(s, 1);
    let mut times: Vec<f64> = recs.iter().filter(|r| r.cause == 0).map(|r| r.gap).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut value = 1.0;
    times
        .into_iter()
        .map(|c| {
            let d = recs.iter().filter(|r| r.gap == c && r.cause == 0).count() as f64;
            let at_risk = recs.iter().filter(|r| r.gap >= c).count() as f64;
            value *= 1.0 - d / at_risk;
            (c, value)
        })
        .collect()
}

/// Empirical plug-ins for uncensored stage-`j` data.
pub fn empirical_cif(s: &Sample, j: u32, k: u8, t: f64) -> f64 {
    stage_records(s, j).iter().filter(|r| r.cause == k && r.gap <= t).count() as f64 / s.n() as f64
}

pub fn empirical_surv(s: &Sample, j: u32, t: f64) -> f64 {
    stage_records(s, j).iter().filter(|r| r.gap > t).count() as f64 / s.n() as f64
}
