use serde::Serialize;

use crate::estimators::Functional;

/// Marginal functionals of one stage's gap time under the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrueFunctionals {
    pub f1: f64,
    pub f2: f64,
    pub s: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

pub fn true_functionals(alpha: f64, t: f64) -> TrueFunctionals {
    let e = -(-alpha * t).exp_m1();
    TrueFunctionals {
        f1: e / alpha,
        f2: (1.0 - 1.0 / alpha) * e,
        s: (-alpha * t).exp(),
        lambda1: t,
        lambda2: (alpha - 1.0) * t,
    }
}

/// True value of a marginal functional, or `None` when it has no closed
/// form here (conditional incidences).
pub fn true_value(functional: Functional, alpha: f64, t: f64) -> Option<f64> {
    let tf = true_functionals(alpha, t);
    match functional {
        Functional::Cif { cause: 1 } => Some(tf.f1),
        Functional::Cif { cause: 2 } => Some(tf.f2),
        Functional::Survival(_) => Some(tf.s),
        Functional::CumCsh { cause: 1, .. } => Some(tf.lambda1),
        Functional::CumCsh { cause: 2, .. } => Some(tf.lambda2),
        _ => None,
    }
}
