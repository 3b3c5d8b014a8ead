//! Subject-level bootstrap inference.
//!
//! A bootstrap draw resamples whole subjects (all stages together with the
//! censoring time), which keeps the dependence between a subject's stages.
//! Replicate `b` draws from its own random stream derived from
//! `(seed, b)`, so results do not depend on how replicates are scheduled
//! across threads.

mod bootstrap;
mod intervals;
mod normal;
mod resample;
mod testing;

pub use bootstrap::{
    bootstrap_se, evaluate_targets, replicate_values, BootstrapPlan, BootstrapSummary,
};
pub use intervals::{ci_pointwise, confidence_band, sup_quantile, BandSummary, Interval, Transform};
pub use normal::{normal_cdf, normal_quantile, two_sided_p_value, z_critical};
pub use resample::{derive_seed, replicate_rng, resample, resample_indices};
pub(crate) use testing::build_result;
pub use testing::{
    test_group, test_prev_type, test_stage, test_stage_family, TestKind, TestResult, TestSettings,
};

/// Runs `f` on a dedicated thread pool with `workers` threads, or on the
/// global pool when `workers` is `None`.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("failed to build worker pool")
            .install(f),
        None => f(),
    }
}

/// Sample standard deviation (divisor `m − 1`). `None` for fewer than two
/// values.
pub fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Some((ss / (m - 1.0)).sqrt())
}
