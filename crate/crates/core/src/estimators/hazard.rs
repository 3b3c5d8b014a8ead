use super::{EstimateCurve, Variant};
use crate::error::{Error, Result};
use crate::step::StepCurve;

/// Plug-in cumulative cause-specific hazard
/// `Λ̂_k(t) = Σ_{u ≤ t} ΔF̂_k(u) / Ŝ(u−)`, summed over the jumps of the CIF.
///
/// Summation stops at the first jump where the survival plug-in has a
/// non-positive left limit; that time is recorded in `truncated_at`.
pub fn estimate_cum_csh(cif: &EstimateCurve, surv: &EstimateCurve) -> Result<EstimateCurve> {
    if cif.variant != Variant::Cif {
        return Err(Error::InvalidArgument(format!(
            "hazard numerator must be a CIF estimate, got {}",
            cif.variant
        )));
    }
    let plugin = match surv.variant {
        Variant::Survival(v) => v,
        other => {
            return Err(Error::InvalidArgument(format!(
                "hazard plug-in must be a survival estimate, got {other}"
            )))
        }
    };
    if cif.stage != surv.stage {
        return Err(Error::StageMismatch(cif.stage, surv.stage));
    }

    let mut times = Vec::with_capacity(cif.curve.len());
    let mut values = Vec::with_capacity(cif.curve.len());
    let mut truncated_at = None;
    let mut acc = 0.0;
    let mut prev_f = cif.curve.initial_value();
    for (u, f) in cif.curve.points() {
        let s = surv.curve.left_limit(u);
        if s <= 0.0 {
            truncated_at = Some(u);
            break;
        }
        acc += (f - prev_f) / s;
        prev_f = f;
        times.push(u);
        values.push(acc);
    }

    let mut est = EstimateCurve::new(
        StepCurve::new(0.0, times, values),
        cif.stage,
        Variant::CumCsh(plugin),
        cif.tau,
    );
    est.cause = cif.cause;
    est.truncated_at = truncated_at;
    if let Some(u) = truncated_at {
        if u <= cif.tau {
            est.warnings.push(format!(
                "survival plug-in reached zero before t = {u}; hazard truncated"
            ));
        }
    }
    Ok(est)
}
