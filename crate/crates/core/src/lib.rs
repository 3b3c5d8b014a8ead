//! Nonparametric marginal analysis of gap times in recurrent-event data with
//! competing risks.
//!
//! A subject experiences a sequence of events, each of one of `K` causes, and
//! is followed until an always-observed censoring time `C`. For a fixed stage
//! `j` the crate estimates the cause-specific cumulative incidence of the gap
//! `T_j`, its survival function (four ways), the cumulative cause-specific
//! hazard, and the incidence conditional on the previous event's cause.
//! Gaps after the first are subject to induced dependent censoring, which the
//! estimators remove by inverse probability of censoring weighting.
//!
//! Inference is by subject-level bootstrap: standard errors, pointwise and
//! simultaneous intervals, and Wald-type tests comparing stages, groups, or
//! previous causes. [`simulation`] contains a frailty-based generator with
//! known marginals and a Monte Carlo study runner.
//!
//! ```
//! use std::collections::HashMap;
//! use gaptime::prelude::*;
//!
//! let rows = vec![
//!     RawRow { subject_id: "1".into(), stage: 1, gap_time: 1.5, cause: 1 },
//!     RawRow { subject_id: "2".into(), stage: 1, gap_time: 3.0, cause: 2 },
//!     RawRow { subject_id: "4".into(), stage: 1, gap_time: 5.0, cause: 1 },
//! ];
//! let censor: HashMap<String, f64> =
//!     [("1", 2.0), ("2", 4.0), ("3", 6.0), ("4", 8.0)]
//!         .into_iter()
//!         .map(|(k, v)| (k.to_string(), v))
//!         .collect();
//! let sample = build_sample(&rows, &censor, 2)?;
//! let g = fit_censor_survival(&sample);
//! let cif = estimate_cif(&sample, 1, 1, &g)?;
//! assert_eq!(cif.value(5.0), 0.75);
//! # Ok::<(), gaptime::Error>(())
//! ```

pub mod error;
pub mod estimators;
pub mod inference;
pub mod sample;
pub mod simulation;
pub mod step;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::estimators::{
        estimate_cif, estimate_cond_cif, estimate_cum_csh, estimate_surv_ipcw, estimate_surv_pl,
        estimate_surv_sum, estimate_surv_sum_unfloored, estimate_surv_uncensored, estimate_survival, EstimateCurve, Functional,
        SurvivalVariant, Target, Variant,
    };
    pub use crate::sample::{
        build_sample, fit_censor_survival, identifiable_tau, GapRecord, RawRow, Sample,
        SubjectRecord,
    };
    pub use crate::step::StepCurve;
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/estimators.md")]
    mod estimators {}
    #[doc = include_str!("../../../book/src/inference.md")]
    mod inference {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
