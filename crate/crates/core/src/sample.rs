//! Observed recurrent-event samples and the censoring survival estimate.
//!
//! Each subject is followed from time zero until an always-observed
//! censoring time `C`. Recurrences before `C` are recorded as gap records
//! `(stage, gap, cumulative time, cause)`; the stage in progress at `C`
//! closes the trajectory as a censored record with cause 0 and cumulative
//! time equal to `C`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::step::StepCurve;

/// Default number of competing causes.
pub const DEFAULT_NUM_CAUSES: u8 = 2;

/// One observed gap of a subject.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    /// Stage `j >= 1`.
    pub stage: u32,
    /// Observed gap `Ỹ_j − Ỹ_{j−1}`.
    pub gap_time: f64,
    /// Observed cumulative time `Ỹ_j`.
    pub cum_time: f64,
    /// Observed cause; 0 marks the censored terminal record.
    pub cause: u8,
}

impl GapRecord {
    pub fn is_event(&self) -> bool {
        self.cause != 0
    }

    /// Cumulative time at the start of this gap.
    pub fn start_time(&self) -> f64 {
        self.cum_time - self.gap_time
    }
}

/// The full observed trajectory of one subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    id: String,
    censor_time: f64,
    records: Vec<GapRecord>,
}

impl SubjectRecord {
    /// Builds a trajectory from the observed `(gap, cause)` pairs of the
    /// uncensored recurrences, in stage order. The censored terminal record
    /// is appended.
    pub fn from_events(
        id: impl Into<String>,
        censor_time: f64,
        events: &[(f64, u8)],
        num_causes: u8,
    ) -> Result<Self> {
        let id = id.into();
        if !(censor_time.is_finite() && censor_time > 0.0) {
            return Err(Error::invalid(
                &id,
                1,
                format!("censoring time must be positive and finite, got {censor_time}"),
            ));
        }
        let mut records = Vec::with_capacity(events.len() + 1);
        let mut cum = 0.0;
        for (idx, &(gap, cause)) in events.iter().enumerate() {
            let stage = idx as u32 + 1;
            if !gap.is_finite() || gap < 0.0 {
                return Err(Error::invalid(&id, stage, format!("negative gap time {gap}")));
            }
            if gap == 0.0 {
                return Err(Error::invalid(&id, stage, "event gap time must be positive"));
            }
            if cause == 0 || cause > num_causes {
                return Err(Error::invalid(
                    &id,
                    stage,
                    format!("event cause {cause} outside 1..={num_causes}"),
                ));
            }
            let next = cum + gap;
            if next >= censor_time {
                return Err(Error::invalid(
                    &id,
                    stage,
                    format!(
                        "event at cumulative time {next} is not before the censoring time {censor_time}"
                    ),
                ));
            }
            records.push(GapRecord {
                stage,
                gap_time: gap,
                cum_time: next,
                cause,
            });
            cum = next;
        }
        records.push(GapRecord {
            stage: events.len() as u32 + 1,
            gap_time: censor_time - cum,
            cum_time: censor_time,
            cause: 0,
        });
        Ok(SubjectRecord {
            id,
            censor_time,
            records,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn censor_time(&self) -> f64 {
        self.censor_time
    }

    pub fn records(&self) -> &[GapRecord] {
        &self.records
    }

    /// Stage of the censored terminal record, `M`.
    pub fn m_stage(&self) -> u32 {
        self.records.len() as u32
    }

    /// Record at stage `j`, if the subject reached it.
    pub fn stage(&self, j: u32) -> Option<&GapRecord> {
        if j == 0 {
            return None;
        }
        self.records.get(j as usize - 1)
    }

    /// Cause observed at stage `j`; 0 when censored or not reached.
    pub fn cause_at(&self, j: u32) -> u8 {
        self.stage(j).map_or(0, |r| r.cause)
    }

    /// Number of fully observed recurrences, `M − 1`.
    pub fn num_events(&self) -> usize {
        self.records.len() - 1
    }
}

/// One input row in long format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub subject_id: String,
    pub stage: u32,
    pub gap_time: f64,
    pub cause: u8,
}

/// An observed sample of independent subjects.
///
/// Subjects are kept sorted by identifier so that every computation that
/// indexes subjects is independent of input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    subjects: Vec<SubjectRecord>,
    num_causes: u8,
}

impl Sample {
    pub fn new(mut subjects: Vec<SubjectRecord>, num_causes: u8) -> Result<Self> {
        if subjects.is_empty() {
            return Err(Error::EmptySample);
        }
        if num_causes == 0 {
            return Err(Error::InvalidArgument("num_causes must be at least 1".into()));
        }
        for s in &subjects {
            if let Some(r) = s.records.iter().find(|r| r.cause > num_causes) {
                return Err(Error::invalid(
                    &s.id,
                    r.stage,
                    format!("cause {} exceeds num_causes = {num_causes}", r.cause),
                ));
            }
        }
        subjects.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(Sample {
            subjects,
            num_causes,
        })
    }

    /// Assembles a sample without sorting or validation; used for bootstrap
    /// draws whose subjects come from an already validated sample.
    pub(crate) fn from_parts(subjects: Vec<SubjectRecord>, num_causes: u8) -> Self {
        Sample {
            subjects,
            num_causes,
        }
    }

    pub fn subjects(&self) -> &[SubjectRecord] {
        &self.subjects
    }

    pub fn n(&self) -> usize {
        self.subjects.len()
    }

    pub fn num_causes(&self) -> u8 {
        self.num_causes
    }

    /// Largest stage index present in any subject.
    pub fn max_stage(&self) -> u32 {
        self.subjects.iter().map(|s| s.m_stage()).max().unwrap_or(0)
    }

    /// Long-format rows including the censored terminal rows, and the
    /// censoring-time table; feeding both to [`build_sample`] reproduces the
    /// sample.
    pub fn to_rows(&self) -> (Vec<RawRow>, BTreeMap<String, f64>) {
        let mut rows = Vec::new();
        let mut censor = BTreeMap::new();
        for s in &self.subjects {
            censor.insert(s.id.clone(), s.censor_time);
            for r in &s.records {
                rows.push(RawRow {
                    subject_id: s.id.clone(),
                    stage: r.stage,
                    gap_time: r.gap_time,
                    cause: r.cause,
                });
            }
        }
        (rows, censor)
    }
}

/// Groups long-format rows into subjects and builds a validated [`Sample`].
///
/// Every subject named in `censor_times` is included, also those without
/// rows. A terminal cause-0 row is optional; when present its gap must agree
/// with the censoring time.
pub fn build_sample(
    rows: &[RawRow],
    censor_times: &HashMap<String, f64>,
    num_causes: u8,
) -> Result<Sample> {
    let mut by_subject: BTreeMap<&str, Vec<&RawRow>> = BTreeMap::new();
    for id in censor_times.keys() {
        by_subject.entry(id.as_str()).or_default();
    }
    for row in rows {
        by_subject.entry(row.subject_id.as_str()).or_default().push(row);
    }
    if by_subject.is_empty() {
        return Err(Error::EmptySample);
    }

    let mut subjects = Vec::with_capacity(by_subject.len());
    for (id, mut subject_rows) in by_subject {
        let censor_time = *censor_times
            .get(id)
            .ok_or_else(|| Error::MissingCensorTime(id.to_string()))?;
        subject_rows.sort_by_key(|r| r.stage);
        for (idx, r) in subject_rows.iter().enumerate() {
            let expected = idx as u32 + 1;
            if r.stage != expected {
                return Err(Error::invalid(
                    id,
                    r.stage,
                    format!("stages must be contiguous from 1; expected stage {expected}"),
                ));
            }
            if !r.gap_time.is_finite() || r.gap_time < 0.0 {
                return Err(Error::invalid(id, r.stage, format!("negative gap time {}", r.gap_time)));
            }
        }
        let terminal = match subject_rows.iter().position(|r| r.cause == 0) {
            Some(pos) if pos + 1 != subject_rows.len() => {
                return Err(Error::invalid(
                    id,
                    subject_rows[pos].stage,
                    "censored (cause 0) row must be the subject's last stage",
                ))
            }
            Some(_) => subject_rows.pop(),
            None => None,
        };
        let events: Vec<(f64, u8)> = subject_rows.iter().map(|r| (r.gap_time, r.cause)).collect();
        let subject = SubjectRecord::from_events(id, censor_time, &events, num_causes)?;
        if let Some(t) = terminal {
            let implied = subject.records.last().unwrap().gap_time;
            let tol = 1e-9 * censor_time.max(1.0);
            if (t.gap_time - implied).abs() > tol {
                return Err(Error::invalid(
                    id,
                    t.stage,
                    format!(
                        "censored gap {} disagrees with censoring time (expected {implied})",
                        t.gap_time
                    ),
                ));
            }
        }
        subjects.push(subject);
    }
    Sample::new(subjects, num_causes)
}

/// Empirical survival function of the censoring times,
/// `Ĝ(t) = n⁻¹ Σ I(C_i > t)`.
pub fn fit_censor_survival(sample: &Sample) -> StepCurve {
    let mut c: Vec<f64> = sample.subjects.iter().map(|s| s.censor_time).collect();
    c.sort_by(f64::total_cmp);
    let n = c.len() as f64;
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut i = 0;
    while i < c.len() {
        let t = c[i];
        let mut k = i;
        while k < c.len() && c[k] == t {
            k += 1;
        }
        times.push(t);
        values.push((c.len() - k) as f64 / n);
        i = k;
    }
    StepCurve::new(1.0, times, values)
}

/// Largest uncensored stage-`j` gap of cause `k`, or of any cause when `k`
/// is `None`.
pub fn identifiable_tau(sample: &Sample, j: u32, k: Option<u8>) -> Result<f64> {
    let mut seen_stage = false;
    let mut tau: Option<f64> = None;
    for s in &sample.subjects {
        if let Some(r) = s.stage(j) {
            seen_stage = true;
            let wanted = match k {
                Some(k) => r.cause == k,
                None => r.cause != 0,
            };
            if wanted {
                tau = Some(tau.map_or(r.gap_time, |m: f64| m.max(r.gap_time)));
            }
        }
    }
    if !seen_stage {
        return Err(Error::NoStageData { stage: j });
    }
    tau.ok_or_else(|| {
        let what = match k {
            Some(k) => format!("no uncensored type-{k} gaps"),
            None => "no uncensored gaps".to_string(),
        };
        Error::unidentifiable(j, what)
    })
}
