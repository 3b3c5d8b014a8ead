//! Inverse-probability-of-censoring-weighted estimators of gap-time
//! marginals at a fixed stage `j`.
//!
//! For stages `j >= 2` the gap `T_j` is censored by `C − Y_{j−1}`, which is
//! correlated with `T_j` whenever successive gaps are. Every estimator here
//! corrects the resulting selection bias by weighting observed indicators
//! with the inverse of a censoring survival curve `Ĝ` evaluated where the
//! subject had to remain uncensored for the indicator to be observable.
//!
//! All estimators take `Ĝ` as an argument. [`fit_censor_survival`] gives
//! the empirical version; any other right-continuous survival curve may be
//! passed. A weight is taken to be zero whenever `Ĝ` vanishes at its
//! argument, which for the empirical `Ĝ` only happens for indicators that
//! are themselves zero.
//!
//! [`fit_censor_survival`]: crate::sample::fit_censor_survival

mod cif;
mod conditional;
mod hazard;
mod survival;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::step::StepCurve;

pub use cif::estimate_cif;
pub use conditional::{estimate_cond_cif, PrevTypeMass};
pub use hazard::estimate_cum_csh;
pub use survival::{
    estimate_surv_ipcw, estimate_surv_pl, estimate_surv_sum, estimate_surv_sum_unfloored,
    estimate_surv_uncensored, estimate_survival,
};

/// Which representation of `S^(j)` an estimate is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurvivalVariant {
    /// One minus the sum of the cause-specific CIF estimates, floored at 0.
    Sum,
    /// Weighted empirical survival of the observed gap.
    Ipcw,
    /// Product limit over the weighted conditional hazard.
    ProductLimit,
    /// Weighted survival using uncensored gaps only.
    Uncensored,
}

impl SurvivalVariant {
    pub const ALL: [SurvivalVariant; 4] = [
        SurvivalVariant::Sum,
        SurvivalVariant::Ipcw,
        SurvivalVariant::ProductLimit,
        SurvivalVariant::Uncensored,
    ];

    /// Short name used on the command line and in tables.
    pub fn short_name(self) -> &'static str {
        match self {
            SurvivalVariant::Sum => "sum",
            SurvivalVariant::Ipcw => "ipcw",
            SurvivalVariant::ProductLimit => "pl",
            SurvivalVariant::Uncensored => "unc",
        }
    }

    pub fn from_short_name(s: &str) -> Option<Self> {
        SurvivalVariant::ALL.into_iter().find(|v| v.short_name() == s)
    }

    /// 1-based position in [`SurvivalVariant::ALL`].
    pub fn index(self) -> usize {
        SurvivalVariant::ALL.iter().position(|&v| v == self).unwrap() + 1
    }
}

/// Kind of an estimated curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Cif,
    Survival(SurvivalVariant),
    /// Cumulative cause-specific hazard with the given survival plug-in.
    CumCsh(SurvivalVariant),
    CondCif,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Cif => write!(f, "cif"),
            Variant::Survival(v) => write!(f, "surv_{}", v.short_name()),
            Variant::CumCsh(v) => write!(f, "csh_{}", v.short_name()),
            Variant::CondCif => write!(f, "cond_cif"),
        }
    }
}

/// An estimated curve together with what it estimates and where it is
/// supported by the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateCurve {
    pub curve: StepCurve,
    pub stage: u32,
    pub cause: Option<u8>,
    pub prev_cause: Option<u8>,
    pub variant: Variant,
    /// Upper end of the identifiable range.
    pub tau: f64,
    /// First time at which a hazard plug-in hit a non-positive survival
    /// value; the curve is constant from there on.
    pub truncated_at: Option<f64>,
    pub warnings: Vec<String>,
}

/// A curve value together with its validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub value: f64,
    /// `t` lies beyond the identifiable range or past a truncation point.
    pub beyond_range: bool,
}

impl EstimateCurve {
    pub(crate) fn new(curve: StepCurve, stage: u32, variant: Variant, tau: f64) -> Self {
        EstimateCurve {
            curve,
            stage,
            cause: None,
            prev_cause: None,
            variant,
            tau,
            truncated_at: None,
            warnings: Vec::new(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.curve.eval(t)
    }

    /// True when `t` is inside the identifiable range and before any
    /// truncation point.
    pub fn in_range(&self, t: f64) -> bool {
        t >= 0.0 && t <= self.tau && self.truncated_at.is_none_or(|u| t < u)
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        CurvePoint {
            value: self.curve.eval(t),
            beyond_range: !self.in_range(t),
        }
    }

    /// Value at `t` if `t` is in range.
    pub fn value_in_range(&self, t: f64) -> Option<f64> {
        self.in_range(t).then(|| self.curve.eval(t))
    }

    /// Running-minimum envelope clipped to `[0, 1]`, for survival curves
    /// that came out non-monotone. Off unless explicitly requested.
    pub fn monotone_envelope(&self) -> EstimateCurve {
        let mut out = self.clone();
        let mut running = self.curve.initial_value().clamp(0.0, 1.0);
        let initial = running;
        let values = self
            .curve
            .values()
            .iter()
            .map(|&v| {
                running = running.min(v.clamp(0.0, 1.0));
                running
            })
            .collect();
        out.curve = StepCurve::new(initial, self.curve.jump_times().to_vec(), values);
        out
    }

    /// Short identifier such as `cif_j2_k1`.
    pub fn label(&self) -> String {
        let mut s = format!("{}_j{}", self.variant, self.stage);
        if let Some(k) = self.cause {
            s.push_str(&format!("_k{k}"));
        }
        if let Some(l) = self.prev_cause {
            s.push_str(&format!("_l{l}"));
        }
        s
    }

    /// Tabular form `(t, value, flag)`: a row at `t = 0` and one per jump.
    pub fn rows(&self) -> Vec<(f64, f64, &'static str)> {
        let mut out = Vec::with_capacity(self.curve.len() + 1);
        out.push((0.0, self.curve.eval(0.0), ""));
        for (t, v) in self.curve.points() {
            if t < 0.0 {
                continue;
            }
            let flag = if self.in_range(t) { "" } else { "beyond_range" };
            if t == 0.0 {
                out[0].1 = v;
            } else {
                out.push((t, v, flag));
            }
        }
        out
    }
}

/// A scalar functional of the gap-time distribution at one stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    Cif { cause: u8 },
    Survival(SurvivalVariant),
    CumCsh { cause: u8, plugin: SurvivalVariant },
    CondCif { cause: u8, prev: u8 },
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::Cif { cause } => write!(f, "cif_k{cause}"),
            Functional::Survival(v) => write!(f, "surv_{}", v.short_name()),
            Functional::CumCsh { cause, plugin } => {
                write!(f, "csh_{}_k{cause}", plugin.short_name())
            }
            Functional::CondCif { cause, prev } => write!(f, "cond_cif_k{cause}_l{prev}"),
        }
    }
}

/// A functional at a given stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Target {
    pub stage: u32,
    pub functional: Functional,
}

impl Target {
    pub fn new(stage: u32, functional: Functional) -> Self {
        Target { stage, functional }
    }

    pub fn estimate(&self, sample: &Sample, g: &StepCurve) -> Result<EstimateCurve> {
        let j = self.stage;
        match self.functional {
            Functional::Cif { cause } => estimate_cif(sample, j, cause, g),
            Functional::Survival(v) => estimate_survival(sample, j, v, g),
            Functional::CumCsh { cause, plugin } => {
                let cif = estimate_cif(sample, j, cause, g)?;
                let surv = estimate_survival(sample, j, plugin, g)?;
                estimate_cum_csh(&cif, &surv)
            }
            Functional::CondCif { cause, prev } => {
                estimate_cond_cif(sample, j, cause, prev, g).map(|(c, _)| c)
            }
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_j{}", self.functional, self.stage)
    }
}

/// Stage-`j` records of the subjects that reached stage `j`.
#[derive(Debug, Clone)]
pub(crate) struct StageView {
    pub stage: u32,
    /// Total number of subjects in the sample, including those that never
    /// reached stage `j`.
    pub n: usize,
    /// `Ỹ_{i(j−1)}`.
    pub start: Vec<f64>,
    pub gap: Vec<f64>,
    pub cum: Vec<f64>,
    pub cause: Vec<u8>,
    /// Cause at stage `j − 1` (0 for `j = 1`).
    pub prev_cause: Vec<u8>,
}

impl StageView {
    pub fn new(sample: &Sample, j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidArgument("stages are numbered from 1".into()));
        }
        let mut view = StageView {
            stage: j,
            n: sample.n(),
            start: Vec::new(),
            gap: Vec::new(),
            cum: Vec::new(),
            cause: Vec::new(),
            prev_cause: Vec::new(),
        };
        for s in sample.subjects() {
            if let Some(r) = s.stage(j) {
                let (start, prev) = match s.stage(j - 1) {
                    Some(p) => (p.cum_time, p.cause),
                    None => (0.0, 0),
                };
                view.start.push(start);
                view.gap.push(r.gap_time);
                view.cum.push(r.cum_time);
                view.cause.push(r.cause);
                view.prev_cause.push(prev);
            }
        }
        if view.gap.is_empty() {
            return Err(Error::NoStageData { stage: j });
        }
        Ok(view)
    }

    pub fn len(&self) -> usize {
        self.gap.len()
    }

    /// Largest uncensored gap, optionally restricted to one cause.
    pub fn tau(&self, cause: Option<u8>) -> Option<f64> {
        (0..self.len())
            .filter(|&i| match cause {
                Some(k) => self.cause[i] == k,
                None => self.cause[i] != 0,
            })
            .map(|i| self.gap[i])
            .reduce(f64::max)
    }
}

/// `1 / Ĝ(x)`, with the zero-weight convention where `Ĝ(x) = 0`.
#[inline]
pub(crate) fn inverse_weight(g: &StepCurve, x: f64) -> f64 {
    let v = g.eval(x);
    if v > 0.0 {
        1.0 / v
    } else {
        0.0
    }
}

/// Sorted `(time, weight)` pairs folded into a cumulative curve scaled by
/// `1/n`.
pub(crate) fn cumulative_weighted(mut events: Vec<(f64, f64)>, n: usize) -> StepCurve {
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nf = n as f64;
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    for (t, w) in events {
        acc += w;
        if times.last() == Some(&t) {
            *values.last_mut().unwrap() = acc / nf;
        } else {
            times.push(t);
            values.push(acc / nf);
        }
    }
    StepCurve::new(0.0, times, values)
}
