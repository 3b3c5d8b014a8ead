//! Four estimators of the marginal gap survival `S^(j)(t) = Pr(T_j > t)`.

use super::{inverse_weight, EstimateCurve, StageView, SurvivalVariant, Variant};
use crate::error::Result;
use crate::sample::Sample;
use crate::step::StepCurve;

/// Dispatches on the survival variant.
pub fn estimate_survival(
    sample: &Sample,
    j: u32,
    variant: SurvivalVariant,
    g: &StepCurve,
) -> Result<EstimateCurve> {
    match variant {
        SurvivalVariant::Sum => estimate_surv_sum(sample, j, g),
        SurvivalVariant::Ipcw => estimate_surv_ipcw(sample, j, g),
        SurvivalVariant::ProductLimit => estimate_surv_pl(sample, j, g),
        SurvivalVariant::Uncensored => estimate_surv_uncensored(sample, j, g),
    }
}

fn finish(view: &StageView, curve: StepCurve, variant: SurvivalVariant) -> EstimateCurve {
    let tau = view.tau(None);
    let mut est = EstimateCurve::new(curve, view.stage, Variant::Survival(variant), tau.unwrap_or(0.0));
    if tau.is_none() {
        est.warnings
            .push(format!("no uncensored stage-{} gaps; estimate is not identifiable", view.stage));
    }
    est
}

/// `1 − Σ_k F̂_k(t)` without the floor at zero.
pub fn estimate_surv_sum_unfloored(sample: &Sample, j: u32, g: &StepCurve) -> Result<EstimateCurve> {
    let view = StageView::new(sample, j)?;
    Ok(finish(&view, sum_curve(&view, g), SurvivalVariant::Sum))
}

/// `Ŝ(t) = max{0, 1 − Σ_k F̂_k(t)}`.
pub fn estimate_surv_sum(sample: &Sample, j: u32, g: &StepCurve) -> Result<EstimateCurve> {
    let view = StageView::new(sample, j)?;
    let curve = sum_curve(&view, g).map_values(|v| v.max(0.0));
    Ok(finish(&view, curve, SurvivalVariant::Sum))
}

fn sum_curve(view: &StageView, g: &StepCurve) -> StepCurve {
    let mut events: Vec<(f64, f64)> = (0..view.len())
        .filter(|&i| view.cause[i] != 0)
        .map(|i| (view.gap[i], inverse_weight(g, view.cum[i])))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nf = view.n as f64;
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    for (t, w) in events {
        acc += w;
        if times.last() == Some(&t) {
            *values.last_mut().unwrap() = 1.0 - acc / nf;
        } else {
            times.push(t);
            values.push(1.0 - acc / nf);
        }
    }
    StepCurve::new(1.0, times, values)
}

/// `Ŝ(t) = n⁻¹ Σ_i I(T̃_ij > t) / Ĝ(Ỹ_{i(j−1)} + t)`.
///
/// The weight of a subject changes whenever `Ỹ_{i(j−1)} + t` crosses a jump
/// of `Ĝ`, so the curve has breakpoints at observed gaps and at
/// `c − Ỹ_{i(j−1)}` for every jump `c` of `Ĝ` inside the subject's gap. The
/// result is returned as computed: it may exceed one and need not be
/// monotone.
pub fn estimate_surv_ipcw(sample: &Sample, j: u32, g: &StepCurve) -> Result<EstimateCurve> {
    let view = StageView::new(sample, j)?;
    Ok(finish(&view, ipcw_curve(&view, g), SurvivalVariant::Ipcw))
}

fn ipcw_curve(view: &StageView, g: &StepCurve) -> StepCurve {
    let jumps = g.jump_times();
    let g_values = g.values();
    let weight = |v: f64| if v > 0.0 { 1.0 / v } else { 0.0 };

    // (time, subject, new weight); a subject leaves the sum at its gap.
    let mut changes: Vec<(f64, usize, f64)> = Vec::new();
    let mut current = vec![0.0; view.len()];
    let mut total = NeumaierSum::default();
    for i in 0..view.len() {
        let start = view.start[i];
        let w0 = inverse_weight(g, start);
        current[i] = w0;
        total.add(w0);
        let lo = jumps.partition_point(|&c| c <= start);
        let hi = jumps.partition_point(|&c| c < view.cum[i]);
        for idx in lo..hi {
            changes.push((jumps[idx] - start, i, weight(g_values[idx])));
        }
        changes.push((view.gap[i], i, f64::NAN));
    }
    changes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.is_nan().cmp(&b.2.is_nan())));

    let nf = view.n as f64;
    let mut active = vec![true; view.len()];
    let mut remaining = view.len();
    let initial = total.value() / nf;
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (t, i, w) in changes {
        if !active[i] {
            continue;
        }
        if w.is_nan() {
            active[i] = false;
            remaining -= 1;
            total.add(-current[i]);
            current[i] = 0.0;
        } else {
            total.add(w - current[i]);
            current[i] = w;
        }
        let value = if remaining == 0 { 0.0 } else { total.value() / nf };
        if times.last() == Some(&t) {
            *values.last_mut().unwrap() = value;
        } else {
            times.push(t);
            values.push(value);
        }
    }
    StepCurve::new(initial, times, values).compact()
}

/// Product-limit estimator `Ŝ(t) = Π_{v ≤ t} {1 − dΛ̂(v)}` with the weighted
/// hazard increment
///
/// `dΛ̂(v) = Σ_i I(T̃_ij = v, Δ̃_ij ≠ 0) w_i(v) / Σ_i I(T̃_ij ≥ v) w_i(v)`,
/// `w_i(v) = 1 / Ĝ(Ỹ_{i(j−1)} + v)`,
///
/// at each distinct uncensored gap `v`. Censored gaps tied with `v` stay in
/// the risk set.
pub fn estimate_surv_pl(sample: &Sample, j: u32, g: &StepCurve) -> Result<EstimateCurve> {
    let view = StageView::new(sample, j)?;
    Ok(finish(&view, pl_curve(&view, g), SurvivalVariant::ProductLimit))
}

fn pl_curve(view: &StageView, g: &StepCurve) -> StepCurve {
    let jumps = g.jump_times();
    let g_values = g.values();
    let weight = |v: f64| if v > 0.0 { 1.0 / v } else { 0.0 };

    // A record's weight changes whenever its argument crosses a jump of Ĝ;
    // the risk-set total is updated incrementally instead of re-summed.
    let mut current = vec![0.0; view.len()];
    let mut total = NeumaierSum::default();
    let mut changes: Vec<(f64, usize, f64)> = Vec::new();
    for i in 0..view.len() {
        let start = view.start[i];
        current[i] = inverse_weight(g, start);
        total.add(current[i]);
        let lo = jumps.partition_point(|&c| c <= start);
        let hi = jumps.partition_point(|&c| c <= view.cum[i]);
        for idx in lo..hi {
            changes.push((jumps[idx] - start, i, weight(g_values[idx])));
        }
    }
    changes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut order: Vec<usize> = (0..view.len()).collect();
    order.sort_by(|&a, &b| view.gap[a].total_cmp(&view.gap[b]).then(a.cmp(&b)));
    let mut event_times: Vec<f64> = order
        .iter()
        .filter(|&&i| view.cause[i] != 0)
        .map(|&i| view.gap[i])
        .collect();
    event_times.dedup();

    let mut active = vec![true; view.len()];
    let (mut next_change, mut next_exit) = (0, 0);
    let mut surv = 1.0;
    let mut times = Vec::with_capacity(event_times.len());
    let mut values = Vec::with_capacity(event_times.len());
    for &v in &event_times {
        while next_exit < order.len() && view.gap[order[next_exit]] < v {
            let i = order[next_exit];
            active[i] = false;
            total.add(-current[i]);
            next_exit += 1;
        }
        while next_change < changes.len() && changes[next_change].0 <= v {
            let (_, i, w) = changes[next_change];
            if active[i] {
                total.add(w - current[i]);
                current[i] = w;
            }
            next_change += 1;
        }
        let numerator: f64 = order[next_exit..]
            .iter()
            .take_while(|&&i| view.gap[i] == v)
            .filter(|&&i| view.cause[i] != 0)
            .map(|&i| current[i])
            .sum();
        let denominator = total.value();
        if denominator > 0.0 && numerator > 0.0 {
            // rounding in the running total must not push the ratio past 1
            surv *= 1.0 - (numerator / denominator).min(1.0);
            times.push(v);
            values.push(surv);
        }
    }
    StepCurve::new(1.0, times, values)
}

/// `Ŝ(t) = n⁻¹ Σ_i I(T̃_ij > t, Δ̃_ij ≠ 0) / Ĝ(Ỹ_ij)`: only uncensored gaps
/// contribute.
pub fn estimate_surv_uncensored(sample: &Sample, j: u32, g: &StepCurve) -> Result<EstimateCurve> {
    let view = StageView::new(sample, j)?;
    let mut events: Vec<(f64, f64)> = (0..view.len())
        .filter(|&i| view.cause[i] != 0)
        .map(|i| (view.gap[i], inverse_weight(g, view.cum[i])))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nf = view.n as f64;
    // Suffix sums so that each value is a sum over the remaining events.
    let mut suffix = vec![0.0; events.len() + 1];
    for idx in (0..events.len()).rev() {
        suffix[idx] = suffix[idx + 1] + events[idx].1;
    }
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (idx, &(t, _)) in events.iter().enumerate() {
        let value = suffix[idx + 1] / nf;
        if times.last() == Some(&t) {
            *values.last_mut().unwrap() = value;
        } else {
            times.push(t);
            values.push(value);
        }
    }
    let curve = StepCurve::new(suffix[0] / nf, times, values);
    Ok(finish(&view, curve, SurvivalVariant::Uncensored))
}

/// Compensated running sum; the IPCW sweep adds and removes many terms.
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::fixtures::four_subjects;
    use crate::sample::fit_censor_survival;

    #[test]
    fn sum_variant() {
        let s = four_subjects();
        let g = fit_censor_survival(&s);
        let est = estimate_surv_sum(&s, 1, &g).unwrap();
        assert_eq!(est.value(0.0), 1.0);
        assert_eq!(est.value(1.5), 0.75);
        assert!((est.value(3.0) - 5.0 / 12.0).abs() < 1e-15);
        // F1 + F2 at 5 = 0.75 + 1/3 > 1
        assert_eq!(est.value(5.0), 0.0);
        let raw = estimate_surv_sum_unfloored(&s, 1, &g).unwrap();
        assert!((raw.value(5.0) + 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(est.tau, 5.0);
    }

    #[test]
    fn ipcw_variant() {
        let s = four_subjects();
        let g = fit_censor_survival(&s);
        let est = estimate_surv_ipcw(&s, 1, &g).unwrap();
        // weight Ĝ(2) = 3/4 for all, three gaps exceed 2
        assert_eq!(est.value(2.0), 1.0);
        assert_eq!(est.value(0.0), 1.0);
        assert_eq!(est.value(1.0), 1.0);
        // t = 4.5: gaps 6 and 5 exceed it, Ĝ(4.5) = 1/2
        assert_eq!(est.value(4.5), 1.0);
        // t = 5.5: only the censored gap 6, Ĝ(5.5) = 1/2
        assert_eq!(est.value(5.5), 0.5);
        assert_eq!(est.value(6.0), 0.0);
    }

    #[test]
    fn pl_variant_reduces_to_km_at_stage_one() {
        let s = four_subjects();
        let g = fit_censor_survival(&s);
        let est = estimate_surv_pl(&s, 1, &g).unwrap();
        assert_eq!(est.value(1.0), 1.0);
        assert_eq!(est.value(1.5), 0.75);
        assert!((est.value(3.0) - 0.5).abs() < 1e-15);
        // risk set at 5: subjects with gaps 6 and 5
        assert!((est.value(5.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn uncensored_variant() {
        let s = four_subjects();
        let g = fit_censor_survival(&s);
        let est = estimate_surv_uncensored(&s, 1, &g).unwrap();
        // weights 1/Ĝ(3) = 4/3 and 1/Ĝ(5) = 2
        assert!((est.value(2.0) - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(est.value(3.0), 0.5);
        assert_eq!(est.value(5.0), 0.0);
    }

    #[test]
    fn all_censored_stage_gives_zero_unc_curve_with_warning() {
        let s = four_subjects();
        let g = fit_censor_survival(&s);
        let est = estimate_surv_uncensored(&s, 2, &g).unwrap();
        assert_eq!(est.value(0.0), 0.0);
        assert_eq!(est.value(10.0), 0.0);
        assert_eq!(est.warnings.len(), 1);
    }

    #[test]
    fn neumaier_cancels() {
        let mut s = NeumaierSum::default();
        for _ in 0..1000 {
            s.add(0.1);
        }
        for _ in 0..1000 {
            s.add(-0.1);
        }
        assert_eq!(s.value(), 0.0);
    }
}
