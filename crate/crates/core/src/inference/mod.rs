//! Inference on top of the U-statistic estimates: the plug-in asymptotic
//! variance `k_n`, the entropy estimator `H_n`, pivots, confidence intervals
//! and bandwidth selection. Derived functionals live in [`composite`].

pub mod composite;
mod maxent;

pub use composite::{
    bregman_estimate, bregman_from_components, join_size_estimate, renyi_entropy_estimate,
    symmetrized_bregman_from_components, variability_estimate, BregmanEstimate,
};
pub use maxent::student_r_density;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::functional::{Coincidences, FunctionalOrder, QEstimate};
use crate::oracle::normal_quantile;
use crate::sample::{Mode, Sample};

/// Truncated plug-in estimate `k_n = max(K_n, 1/n)` of the asymptotic variance
/// `κ = p^-1 r1² ζ_(1,0) + (1-p)^-1 r2² ζ_(0,1)`.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceEstimate {
    pub kappa_hat: f64,
    /// Untruncated `K_n`; may be negative in finite samples.
    pub raw_k: f64,
    /// Plug-in of order `(2r1-1, 2r2)`.
    pub q_first: QEstimate,
    /// Plug-in of order `(2r1, 2r2-1)`; absent when `r2 = 0`.
    pub q_second: Option<QEstimate>,
    /// `p_n = n1 / n`.
    pub p_hat: f64,
    pub n: usize,
}

/// `H_n = log(max(Q, 1/n)) / (1 - r)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropyEstimate {
    pub h_hat: f64,
    pub q: QEstimate,
    pub order: FunctionalOrder,
    pub n: usize,
    /// Whether `Q < 1/n` and the truncation was applied.
    pub truncated: bool,
}

/// Which asymptotic normality result backs an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pivot {
    /// Exact coincidences (ε = 0), unbiased `Q_n`.
    Discrete,
    /// Normalized `Q̃_n` with a vanishing bandwidth.
    Continuous,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConfidenceInterval {
    pub center: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub pivot: Pivot,
}

impl ConfidenceInterval {
    pub fn half_width(&self) -> f64 {
        self.upper - self.center
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// `K_n` and `k_n` from one pass of neighbor counts. `order` is the working
/// order (`r1 >= 1`) matching the orientation of `c`.
pub fn variance_from(c: &Coincidences, order: FunctionalOrder) -> Result<VarianceEstimate> {
    let FunctionalOrder { r1, r2 } = order;
    if r1 == 0 {
        return Err(Error::InvalidOrder("working order needs r1 >= 1".into()));
    }
    let q = c.estimate(order)?.value;
    let n = c.n();
    let p_hat = c.counts.n1 as f64 / n as f64;

    let first = c.estimate(FunctionalOrder { r1: 2 * r1 - 1, r2: 2 * r2 })?;
    let mut raw_k = (r1 * r1) as f64 * (first.value - q * q) / p_hat;

    let second = if r2 > 0 {
        let second = c.estimate(FunctionalOrder { r1: 2 * r1, r2: 2 * r2 - 1 })?;
        raw_k += (r2 * r2) as f64 * (second.value - q * q) / (1.0 - p_hat);
        Some(second)
    } else {
        None
    };

    Ok(VarianceEstimate {
        kappa_hat: raw_k.max(1.0 / n as f64),
        raw_k,
        q_first: first,
        q_second: second,
        p_hat,
        n,
    })
}

/// Plug-in variance estimate for `order`; the inflated-order plug-ins use the same ε.
pub fn variance_estimate(
    x: &Sample,
    y: Option<&Sample>,
    order: FunctionalOrder,
    epsilon: f64,
    mode: Mode,
) -> Result<VarianceEstimate> {
    let c = Coincidences::prepare(x, y, order, epsilon, mode)?;
    variance_from(&c, order.working().0)
}

pub fn entropy_estimate(q: QEstimate, n: usize) -> Result<EntropyEstimate> {
    let r = q.order.r();
    if r == 1 {
        return Err(Error::InvalidOrder("entropy is undefined for r = 1".into()));
    }
    if n == 0 {
        return invalid("n must be positive");
    }
    let floor = 1.0 / n as f64;
    Ok(EntropyEstimate {
        h_hat: q.value.max(floor).ln() / (1.0 - r as f64),
        q,
        order: q.order,
        n,
        truncated: q.value < floor,
    })
}

/// Interval `H_n ± z_{(1+level)/2} √k_n / (√n |1-r| Q)`.
pub fn confidence_interval(
    h: &EntropyEstimate,
    k: &VarianceEstimate,
    n: usize,
    level: f64,
) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return invalid(format!("confidence level must lie in (0,1), got {level}"));
    }
    if !(h.q.value > 0.0) {
        return Err(Error::UndefinedInterval("the functional estimate is zero".into()));
    }
    let z = normal_quantile(0.5 * (1.0 + level))?;
    let r = h.order.r() as f64;
    let half = z * k.kappa_hat.sqrt() / ((n as f64).sqrt() * (1.0 - r).abs() * h.q.value);
    Ok(ConfidenceInterval {
        center: h.h_hat,
        lower: h.h_hat - half,
        upper: h.h_hat + half,
        level,
        pivot: if h.q.normalized { Pivot::Continuous } else { Pivot::Discrete },
    })
}

/// Normalized residual `√n |1-r| Q (H_n - h) / √k_n`.
pub fn normalized_residual(h_hat: f64, h_true: f64, k: f64, q: f64, n: usize, r: u32) -> f64 {
    (n as f64).sqrt() * (1.0 - r as f64).abs() * q * (h_hat - h_true) / k.sqrt()
}

/// Standardized functional estimate `√n (Q - q) / √k_n`.
pub fn standardized_q(q_hat: f64, q_true: f64, k: f64, n: usize) -> f64 {
    (n as f64).sqrt() * (q_hat - q_true) / k.sqrt()
}

/// Bandwidth from a Hölder exponent `alpha` and constant `c`:
/// `c n^{-α/(2α + d(1-1/r))}` when `α <= d/2`, else `c (log n / n)^{1/d}`.
pub fn select_epsilon(n: usize, d: usize, r: u32, alpha: f64, c: f64) -> Result<f64> {
    if n < 2 || d == 0 {
        return invalid("select_epsilon needs n >= 2 and d >= 1");
    }
    if r < 2 {
        return Err(Error::InvalidOrder("select_epsilon needs r >= 2".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite() && c > 0.0 && c.is_finite()) {
        return invalid("alpha and c must be positive");
    }
    let (n, d) = (n as f64, d as f64);
    if alpha <= d / 2.0 {
        let rate = alpha / (2.0 * alpha + d * (1.0 - 1.0 / r as f64));
        Ok(c * n.powf(-rate))
    } else {
        Ok(c * (n.ln() / n).powf(1.0 / d))
    }
}

/// Everything the estimators produce for one sample pair and order.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    /// `Q̃_n` (continuous) or `Q_n` (discrete).
    pub q: QEstimate,
    pub variance: VarianceEstimate,
    /// Absent for `r = 1`.
    pub entropy: Option<EntropyEstimate>,
    pub interval: Option<ConfidenceInterval>,
    pub mode: Mode,
    pub n1: usize,
    pub n2: usize,
    pub epsilon: f64,
    /// Average `a_i + b_i`.
    pub mean_neighbors: f64,
}

/// Estimate, variance, entropy and (optionally) an interval in one counting pass.
///
/// `level = None` skips the interval; an interval that is undefined because
/// the estimate is zero is reported as absent rather than as an error.
pub fn analyze(
    x: &Sample,
    y: Option<&Sample>,
    order: FunctionalOrder,
    epsilon: f64,
    mode: Mode,
    level: Option<f64>,
) -> Result<EstimateReport> {
    if mode == Mode::Continuous && !(epsilon > 0.0 && epsilon.is_finite()) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    let c = Coincidences::prepare(x, y, order, epsilon, mode)?;
    let work = order.working().0;
    let q = QEstimate {
        order,
        ..c.estimate(work)?
    };
    let variance = variance_from(&c, work)?;
    let n = c.n();
    let entropy = if order.r() >= 2 {
        Some(entropy_estimate(q, n)?)
    } else {
        None
    };
    let interval = match (entropy.as_ref(), level) {
        (Some(h), Some(level)) => match confidence_interval(h, &variance, n, level) {
            Ok(ci) => Some(ci),
            Err(Error::UndefinedInterval(_)) => None,
            Err(e) => return Err(e),
        },
        (None, Some(level)) if !(level > 0.0 && level < 1.0) => {
            return invalid(format!("confidence level must lie in (0,1), got {level}"))
        }
        _ => None,
    };
    let counts = &c.counts;
    let mean_neighbors = if counts.n1 == 0 {
        0.0
    } else {
        counts.a.iter().zip(&counts.b).map(|(a, b)| (a + b) as f64).sum::<f64>() / counts.n1 as f64
    };
    Ok(EstimateReport {
        q,
        variance,
        entropy,
        interval,
        mode,
        n1: counts.n1,
        n2: counts.n2,
        epsilon: if mode == Mode::Discrete { 0.0 } else { epsilon },
        mean_neighbors,
    })
}
