use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::oracle::normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    /// `sup |F_n - Φ|`
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov tail `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2k²λ²)`.
///
/// For small λ the alternating series converges slowly, so the equivalent
/// theta-function form `1 - sqrt(2π)/λ Σ exp(-(2k-1)²π²/(8λ²))` is used below λ = 1.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.0 {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let mut sum = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            sum += (-j * j * pi2 / (8.0 * lambda * lambda)).exp();
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let k = k as f64;
            let term = (-2.0 * k * k * lambda * lambda).exp();
            sum += if k as u64 % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test of `values` against `N(0,1)`, with the
/// asymptotic p-value `Q(√n D)`.
pub fn ks_test(values: &[f64]) -> Result<KsResult> {
    if values.is_empty() {
        return Err(Error::EmptyInput("ks_test needs at least one value".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return invalid("ks_test values must be finite");
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_tail(n.sqrt() * statistic),
    })
}
