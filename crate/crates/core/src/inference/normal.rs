use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

fn standard() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// `Φ⁻¹(p)`.
pub fn normal_quantile(p: f64) -> f64 {
    standard().inverse_cdf(p)
}

pub fn normal_cdf(x: f64) -> f64 {
    standard().cdf(x)
}

/// `z_{α/2}` with `Pr(Z ≤ z_{α/2}) = 1 − α/2`.
pub fn z_critical(alpha: f64) -> f64 {
    normal_quantile(1.0 - alpha / 2.0)
}

/// `2{1 − Φ(|x|)}`, computed through `erfc` to keep precision in the tail.
pub fn two_sided_p_value(x: f64) -> f64 {
    erfc(x.abs() / std::f64::consts::SQRT_2)
}
