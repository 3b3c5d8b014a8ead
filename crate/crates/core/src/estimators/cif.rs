use super::{cumulative_weighted, inverse_weight, EstimateCurve, StageView, Variant};
use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::step::StepCurve;

/// Weighted cumulative incidence of cause `k` at stage `j`:
///
/// `F̂_k(t) = n⁻¹ Σ_i I(T̃_ij ≤ t, Δ̃_ij = k) / Ĝ(Ỹ_ij)`.
///
/// Jumps occur only at observed type-`k` gaps. The identifiable range ends
/// at the largest of them.
pub fn estimate_cif(sample: &Sample, j: u32, k: u8, g: &StepCurve) -> Result<EstimateCurve> {
    if k == 0 || k > sample.num_causes() {
        return Err(Error::InvalidArgument(format!(
            "cause {k} outside 1..={}",
            sample.num_causes()
        )));
    }
    let view = StageView::new(sample, j)?;
    let tau = view
        .tau(Some(k))
        .ok_or_else(|| Error::unidentifiable(j, format!("no uncensored type-{k} gaps")))?;
    let mut est = EstimateCurve::new(cif_curve(&view, k, g), j, Variant::Cif, tau);
    est.cause = Some(k);
    Ok(est)
}

pub(crate) fn cif_curve(view: &StageView, k: u8, g: &StepCurve) -> StepCurve {
    let events = (0..view.len())
        .filter(|&i| view.cause[i] == k)
        .map(|i| (view.gap[i], inverse_weight(g, view.cum[i])))
        .collect();
    cumulative_weighted(events, view.n)
}
