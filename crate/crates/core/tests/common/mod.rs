#![allow(dead_code)]

use std::collections::HashMap;

use gaptime::prelude::*;
use proptest::prelude::*;

/// Four subjects, stage-1 data only: (gap, cause) = (1.5, 1), (3, 2),
/// censored, (5, 1); censoring times 2, 4, 6, 8.
pub fn four_subjects() -> Sample {
    let rows = vec![
        RawRow { subject_id: "1".into(), stage: 1, gap_time: 1.5, cause: 1 },
        RawRow { subject_id: "2".into(), stage: 1, gap_time: 3.0, cause: 2 },
        RawRow { subject_id: "4".into(), stage: 1, gap_time: 5.0, cause: 1 },
    ];
    build_sample(&rows, &censor_map(&[("1", 2.0), ("2", 4.0), ("3", 6.0), ("4", 8.0)]), 2).unwrap()
}

pub fn censor_map(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn sample_from(subjects: &[(f64, Vec<(f64, u8)>)], num_causes: u8) -> Sample {
    let subjects = subjects
        .iter()
        .enumerate()
        .map(|(i, (c, ev))| SubjectRecord::from_events(format!("s{i:03}"), *c, ev, num_causes).unwrap())
        .collect();
    Sample::new(subjects, num_causes).unwrap()
}

/// One subject on a half-unit lattice, so ties between gaps, censoring
/// times and cumulative times are common.
fn arb_subject(num_causes: u8, max_stages: usize) -> impl Strategy<Value = (f64, Vec<(f64, u8)>)> {
    (2u32..=24, prop::collection::vec((1u32..=6, 1..=num_causes), 0..=max_stages)).prop_map(|(c2, evs)| {
        let c = c2 as f64 * 0.5;
        let mut cum = 0.0;
        let mut out = Vec::new();
        for (g2, k) in evs {
            let gap = g2 as f64 * 0.5;
            if cum + gap >= c {
                break;
            }
            cum += gap;
            out.push((gap, k));
        }
        (c, out)
    })
}

pub fn arb_sample(num_causes: u8) -> impl Strategy<Value = Sample> {
    prop::collection::vec(arb_subject(num_causes, 5), 1..=14).prop_map(move |s| sample_from(&s, num_causes))
}

/// Continuous-valued subjects (no ties with probability one).
pub fn arb_sample_continuous(num_causes: u8) -> impl Strategy<Value = Sample> {
    let subject = (0.5f64..10.0, prop::collection::vec((0.05f64..3.0, 1..=num_causes), 0..=5)).prop_map(
        |(c, evs)| {
            let mut cum = 0.0;
            let mut out = Vec::new();
            for (gap, k) in evs {
                if cum + gap >= c {
                    break;
                }
                cum += gap;
                out.push((gap, k));
            }
            (c, out)
        },
    );
    prop::collection::vec(subject, 1..=20).prop_map(move |s| sample_from(&s, num_causes))
}

/// Times worth checking for stage `j`: 0, every possible breakpoint, the
/// midpoints between them and a point beyond all of them.
pub fn probe_times(s: &Sample, j: u32) -> Vec<f64> {
    let mut b = vec![0.0];
    for subj in s.subjects() {
        for (idx, r) in subj.records().iter().enumerate() {
            if r.stage == j {
                b.push(r.gap_time);
                let start = if idx == 0 { 0.0 } else { subj.records()[idx - 1].cum_time };
                for other in s.subjects() {
                    let x = other.censor_time() - start;
                    if x > 0.0 {
                        b.push(x);
                    }
                }
            }
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    let mut out = b.clone();
    for w in b.windows(2) {
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(b.last().unwrap() + 1.0);
    out.sort_by(f64::total_cmp);
    out
}

/// Points strictly between consecutive breakpoints (and past the last one),
/// where evaluation is insensitive to rounding of `start + t`.
pub fn probe_times_between(s: &Sample, j: u32) -> Vec<f64> {
    let all = probe_times(s, j);
    let mut out: Vec<f64> = all.windows(3).step_by(2).map(|w| w[1]).collect();
    out.push(*all.last().unwrap());
    out
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
