use serde::{Deserialize, Serialize};

use super::{cif::cif_curve, cumulative_weighted, inverse_weight, EstimateCurve, StageView, Variant};
use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::step::StepCurve;

/// Estimated probability that the previous stage ended with cause `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrevTypeMass {
    /// The previous stage, `j − 1`.
    pub stage: u32,
    pub cause: u8,
    /// `π̂_l = F̂_l^(j−1)(t_max)`.
    pub mass: f64,
    /// Largest observed type-`l` gap at stage `j − 1`.
    pub t_max: f64,
}

/// CIF of cause `k` at stage `j` conditional on cause `l` at stage `j − 1`:
///
/// `F̂_{k|l}(t) = F̂_{k,l}(t) / π̂_l`, where
/// `F̂_{k,l}(t) = n⁻¹ Σ_i I(T̃_ij ≤ t, Δ̃_ij = k, Δ̃_{i(j−1)} = l) / Ĝ(Ỹ_ij)`
/// and `π̂_l` is the stage-`(j−1)` type-`l` CIF at its largest observed gap.
pub fn estimate_cond_cif(
    sample: &Sample,
    j: u32,
    k: u8,
    l: u8,
    g: &StepCurve,
) -> Result<(EstimateCurve, PrevTypeMass)> {
    if j < 2 {
        return Err(Error::InvalidArgument(
            "conditioning on the previous cause requires stage >= 2".into(),
        ));
    }
    for c in [k, l] {
        if c == 0 || c > sample.num_causes() {
            return Err(Error::InvalidArgument(format!(
                "cause {c} outside 1..={}",
                sample.num_causes()
            )));
        }
    }
    let prev = StageView::new(sample, j - 1)?;
    let t_max = prev
        .tau(Some(l))
        .ok_or_else(|| Error::unidentifiable(j, format!("no type-{l} events at stage {}", j - 1)))?;
    let mass = cif_curve(&prev, l, g).eval(t_max);
    if mass <= 0.0 {
        return Err(Error::unidentifiable(j, format!("estimated mass of previous type {l} is zero")));
    }
    let pi = PrevTypeMass {
        stage: j - 1,
        cause: l,
        mass,
        t_max,
    };

    let view = StageView::new(sample, j)?;
    let selected: Vec<usize> = (0..view.len())
        .filter(|&i| view.cause[i] == k && view.prev_cause[i] == l)
        .collect();
    let tau = selected
        .iter()
        .map(|&i| view.gap[i])
        .reduce(f64::max)
        .ok_or_else(|| {
            Error::unidentifiable(j, format!("no type-{k} gaps following a type-{l} event"))
        })?;
    let events = selected
        .iter()
        .map(|&i| (view.gap[i], inverse_weight(g, view.cum[i])))
        .collect();
    let joint = cumulative_weighted(events, view.n);
    let curve = joint.map_values(|v| v / mass);
    let mut est = EstimateCurve::new(curve, j, Variant::CondCif, tau);
    est.cause = Some(k);
    est.prev_cause = Some(l);
    Ok((est, pi))
}
