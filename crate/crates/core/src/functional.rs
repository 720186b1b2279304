//! Rényi entropy functionals `q_(r1,r2) = ∫ p_X^r1 p_Y^r2` and their
//! ε-coincidence U-statistic estimators.
//!
//! The generalized U-statistic averages, over every `r1`-subset `S` of X and
//! `r2`-subset `T` of Y, the symmetrized kernel `(1/r1) Σ_{i∈S} ψ^(i)(S;T)`,
//! where `ψ^(i)` indicates that all of `S` and `T` lie within ε of `X_i`.
//! Because `ψ^(i)` only depends on which points are ε-close to `X_i`, the
//! subset sum collapses to
//!
//! ```text
//! Q = [C(n1,r1) C(n2,r2) r1]^-1 Σ_i C(a_i, r1-1) C(b_i, r2)
//!   = (1/n1) Σ_i [C(a_i, r1-1) / C(n1-1, r1-1)] [C(b_i, r2) / C(n2, r2)]
//! ```
//!
//! with `a_i`, `b_i` the ε-neighbor counts of `X_i` in X (self excluded) and
//! in Y. The second line is what is evaluated: each binomial ratio is a
//! product of falling-factorial ratios, so nothing overflows.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::neighbor;
use crate::sample::{Mode, Sample};

/// Pair of exponents `(r1, r2)` of a functional `q_(r1,r2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FunctionalOrder {
    pub r1: u32,
    pub r2: u32,
}

impl FunctionalOrder {
    pub fn new(r1: u32, r2: u32) -> Result<Self> {
        if r1 + r2 == 0 {
            return Err(Error::InvalidOrder("r1 + r2 must be at least 1".into()));
        }
        Ok(Self { r1, r2 })
    }

    pub fn r(&self) -> u32 {
        self.r1 + self.r2
    }

    /// Order with the sample roles exchanged: `q_(r1,r2)(X,Y) = q_(r2,r1)(Y,X)`.
    pub fn swapped(&self) -> Self {
        Self {
            r1: self.r2,
            r2: self.r1,
        }
    }

    /// The working order used for estimation and whether the samples must be
    /// exchanged to obtain it (only when `r1 = 0`).
    pub fn working(&self) -> (Self, bool) {
        if self.r1 == 0 {
            (self.swapped(), true)
        } else {
            (*self, false)
        }
    }
}

impl std::fmt::Display for FunctionalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.r1, self.r2)
    }
}

/// Per-point neighbor counts around each `X_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborCounts {
    /// `a_i = #{ j != i : d(X_i, X_j) <= ε }`
    pub a: Vec<usize>,
    /// `b_i = #{ k : d(X_i, Y_k) <= ε }`
    pub b: Vec<usize>,
    pub epsilon: f64,
    pub n1: usize,
    pub n2: usize,
}

impl NeighborCounts {
    pub fn new(a: Vec<usize>, b: Vec<usize>, epsilon: f64, n1: usize, n2: usize) -> Result<Self> {
        let c = Self {
            a,
            b,
            epsilon,
            n1,
            n2,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.n1 || self.b.len() != self.n1 {
            return invalid(format!(
                "count vectors have lengths {} and {}, expected n1 = {}",
                self.a.len(),
                self.b.len(),
                self.n1
            ));
        }
        if let Some(i) = self.a.iter().position(|&a| a + 1 > self.n1) {
            return invalid(format!("a[{i}] = {} exceeds n1 - 1", self.a[i]));
        }
        if let Some(i) = self.b.iter().position(|&b| b > self.n2) {
            return invalid(format!("b[{i}] = {} exceeds n2 = {}", self.b[i], self.n2));
        }
        if !(self.epsilon >= 0.0) {
            return invalid("epsilon must be non-negative");
        }
        Ok(())
    }
}

/// A U-statistic estimate: raw `Q_n` (estimates `q_(r,ε)`) or normalized
/// `Q̃_n = Q_n / b_ε(d)^(r-1)` (estimates `q_r` as ε → 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QEstimate {
    pub value: f64,
    pub order: FunctionalOrder,
    pub epsilon: f64,
    pub normalized: bool,
}

/// Volume of the unit ball in `R^d`, `2 π^(d/2) / (d Γ(d/2))`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return invalid("dimension must be at least 1");
    }
    // b(d) = b(d-2) * 2π/d, seeded with b(1) = 2 and b(2) = π
    let mut v = if d % 2 == 1 { 2.0 } else { std::f64::consts::PI };
    let mut k = if d % 2 == 1 { 1 } else { 2 };
    while k < d {
        k += 2;
        v *= 2.0 * std::f64::consts::PI / k as f64;
    }
    Ok(v)
}

/// Volume `b_ε(d) = ε^d b_1(d)` of a `d`-dimensional ball of radius `epsilon`.
pub fn ball_volume(d: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    Ok(epsilon.powi(d as i32) * unit_ball_volume(d)?)
}

/// `C(a, k) / C(n, k)` as a product of falling-factorial ratios; zero when `a < k`.
#[inline]
pub(crate) fn binomial_ratio(a: usize, n: usize, k: u32) -> f64 {
    let k = k as usize;
    if a < k {
        return 0.0;
    }
    let mut r = 1.0;
    for j in 0..k {
        r *= (a - j) as f64 / (n - j) as f64;
    }
    r
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Raw U-statistic `Q_n` from neighbor counts centred on X.
///
/// `order.r1` must be at least one; callers holding an order with `r1 = 0`
/// swap the samples first (see [`FunctionalOrder::working`]).
pub fn q_from_counts(counts: &NeighborCounts, order: FunctionalOrder) -> Result<QEstimate> {
    let FunctionalOrder { r1, r2 } = order;
    if r1 == 0 {
        return Err(Error::InvalidOrder(
            "q_from_counts needs r1 >= 1; swap the samples for r1 = 0".into(),
        ));
    }
    if counts.n1 < r1 as usize {
        return Err(Error::InsufficientSample(format!(
            "order {order} needs n1 >= {r1}, got n1 = {}",
            counts.n1
        )));
    }
    if counts.n2 < r2 as usize {
        return Err(Error::InsufficientSample(format!(
            "order {order} needs n2 >= {r2}, got n2 = {}",
            counts.n2
        )));
    }
    counts.validate()?;

    let n1 = counts.n1;
    let n2 = counts.n2;
    let total = compensated_sum(
        counts
            .a
            .iter()
            .zip(&counts.b)
            .map(|(&a, &b)| binomial_ratio(a, n1 - 1, r1 - 1) * binomial_ratio(b, n2, r2)),
    );
    Ok(QEstimate {
        value: (total / n1 as f64).clamp(0.0, 1.0),
        order,
        epsilon: counts.epsilon,
        normalized: false,
    })
}

/// Divides a raw estimate by `b_ε(d)^(r-1)`.
pub fn normalize(raw: QEstimate, d: usize) -> Result<QEstimate> {
    if raw.normalized {
        return Ok(raw);
    }
    let vol = ball_volume(d, raw.epsilon)?;
    Ok(QEstimate {
        value: raw.value / vol.powi(raw.order.r() as i32 - 1),
        normalized: true,
        ..raw
    })
}

/// Neighbor counts for a sample pair, already oriented for a working order
/// with `r1 >= 1`. One pass of counting serves every order with the same
/// orientation and ε, which is how the variance plug-ins reuse it.
#[derive(Debug, Clone)]
pub struct Coincidences {
    pub counts: NeighborCounts,
    pub mode: Mode,
    pub dim: usize,
    /// Whether X and Y were exchanged to make `r1 >= 1`.
    pub swapped: bool,
}

impl Coincidences {
    /// Counts neighbors for `order`. Y is ignored entirely when the working
    /// order has `r2 = 0`. In discrete mode `epsilon` is ignored (exact matches).
    pub fn prepare(
        x: &Sample,
        y: Option<&Sample>,
        order: FunctionalOrder,
        epsilon: f64,
        mode: Mode,
    ) -> Result<Self> {
        let (work, swapped) = order.working();
        let (centre, other) = if swapped {
            let y = y.ok_or_else(|| {
                Error::InsufficientSample(format!("order {order} needs a sample Y"))
            })?;
            (y, Some(x))
        } else {
            (x, y)
        };
        let other = if work.r2 == 0 { None } else { other };
        if work.r2 > 0 && other.is_none() {
            return Err(Error::InsufficientSample(format!(
                "order {order} needs a sample Y"
            )));
        }
        if let Some(o) = other {
            if o.dim() != centre.dim() {
                return invalid(format!(
                    "dimension mismatch: d={} vs d={}",
                    centre.dim(),
                    o.dim()
                ));
            }
        }
        let counts = match mode {
            Mode::Continuous => neighbor::neighbor_counts(centre, other, epsilon)?,
            Mode::Discrete => neighbor::exact_match_counts(centre, other)?,
        };
        Ok(Self {
            counts,
            mode,
            dim: centre.dim(),
            swapped,
        })
    }

    /// Estimate of a working-orientation order: raw in discrete mode, normalized in continuous mode.
    pub fn estimate(&self, working_order: FunctionalOrder) -> Result<QEstimate> {
        let raw = q_from_counts(&self.counts, working_order)?;
        match self.mode {
            Mode::Discrete => Ok(raw),
            Mode::Continuous => normalize(raw, self.dim),
        }
    }

    /// `n = n1 + n2` in the working orientation (`n2 = 0` when Y is unused).
    pub fn n(&self) -> usize {
        self.counts.n1 + self.counts.n2
    }
}

/// Normalized estimate `Q̃_n` of `q_r` from continuous samples.
pub fn estimate_q(
    x: &Sample,
    y: Option<&Sample>,
    order: FunctionalOrder,
    epsilon: f64,
) -> Result<QEstimate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    let c = Coincidences::prepare(x, y, order, epsilon, Mode::Continuous)?;
    let (work, _) = order.working();
    Ok(QEstimate {
        order,
        ..c.estimate(work)?
    })
}

/// Unbiased estimate of `q_r` from discrete samples (exact coincidences, ε = 0).
pub fn estimate_q_discrete(
    x: &Sample,
    y: Option<&Sample>,
    order: FunctionalOrder,
) -> Result<QEstimate> {
    let c = Coincidences::prepare(x, y, order, 0.0, Mode::Discrete)?;
    let (work, _) = order.working();
    Ok(QEstimate {
        order,
        ..c.estimate(work)?
    })
}
