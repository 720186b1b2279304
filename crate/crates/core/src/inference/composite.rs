//! Functionals built from several `q` estimates.
//!
//! Each estimator picks its path from the sample mode: discrete samples use
//! exact coincidences (`epsilon` is ignored), continuous samples use the
//! normalized ε-ball statistic.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::functional::{unit_ball_volume, Coincidences, FunctionalOrder, QEstimate};
use crate::sample::Sample;

use super::{entropy_estimate, EntropyEstimate};

fn ord(r1: u32, r2: u32) -> FunctionalOrder {
    FunctionalOrder { r1, r2 }
}

fn estimate_with(
    x: &Sample,
    y: Option<&Sample>,
    order: FunctionalOrder,
    epsilon: f64,
) -> Result<(QEstimate, usize)> {
    let c = Coincidences::prepare(x, y, order, epsilon, x.mode())?;
    let q = c.estimate(order.working().0)?;
    Ok((QEstimate { order, ..q }, c.n()))
}

/// Variability `v = h_(1,1) = -log q_(1,1)`.
pub fn variability_estimate(x: &Sample, y: &Sample, epsilon: f64) -> Result<EntropyEstimate> {
    let (q, n) = estimate_with(x, Some(y), ord(1, 1), epsilon)?;
    entropy_estimate(q, n)
}

/// Rényi entropy `h_s = log(q_(s,0)) / (1 - s)` for an integer `s >= 2`.
pub fn renyi_entropy_estimate(x: &Sample, s: u32, epsilon: f64) -> Result<EntropyEstimate> {
    if s < 2 {
        return Err(Error::InvalidOrder(format!("Rényi order must be at least 2, got {s}")));
    }
    let (q, n) = estimate_with(x, None, ord(s, 0), epsilon)?;
    entropy_estimate(q, n)
}

/// The `q` estimates behind a Bregman distance between X's density `p` and Y's density `q`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BregmanEstimate {
    pub value: f64,
    pub s: u32,
    pub symmetrized: bool,
    /// `∫ p^s`
    pub q_x: f64,
    /// `∫ q^s`
    pub q_y: f64,
    /// `∫ p q^(s-1)`, centred on X.
    pub q_cross_x: f64,
    /// `∫ q p^(s-1)`, centred on Y; only computed for the symmetrized distance.
    pub q_cross_y: Option<f64>,
}

/// `B_s(p,q) = ∫ q^s + ∫ p^s / (s-1) - s ∫ p q^(s-1) / (s-1)`.
pub fn bregman_from_components(q_x: f64, q_y: f64, q_cross_x: f64, s: u32) -> f64 {
    let s = s as f64;
    q_y + q_x / (s - 1.0) - s * q_cross_x / (s - 1.0)
}

/// `K_s(p,q) = (B_s(p,q) + B_s(q,p)) / s`, where `B_s(q,p)` uses the Y-centred cross term.
pub fn symmetrized_bregman_from_components(
    q_x: f64,
    q_y: f64,
    q_cross_x: f64,
    q_cross_y: f64,
    s: u32,
) -> f64 {
    (bregman_from_components(q_x, q_y, q_cross_x, s) + bregman_from_components(q_y, q_x, q_cross_y, s))
        / s as f64
}

/// Bregman distance `B_s(p,q)` (or the symmetrized `K_s`) between the
/// distributions of X and Y. Finite-sample estimates can be negative and are
/// returned unclipped.
pub fn bregman_estimate(
    x: &Sample,
    y: &Sample,
    s: u32,
    epsilon: f64,
    symmetrized: bool,
) -> Result<BregmanEstimate> {
    if s < 2 {
        return Err(Error::InvalidOrder(format!("Bregman order must be at least 2, got {s}")));
    }
    if x.mode() != y.mode() {
        return invalid("X and Y must share a mode");
    }
    let mode = x.mode();
    // X-centred counts with Y serve ∫p^s and ∫p q^(s-1); Y-centred counts serve the rest.
    let cx = Coincidences::prepare(x, Some(y), ord(1, s - 1), epsilon, mode)?;
    let cy = if symmetrized {
        Coincidences::prepare(y, Some(x), ord(1, s - 1), epsilon, mode)?
    } else {
        Coincidences::prepare(y, None, ord(s, 0), epsilon, mode)?
    };
    let q_x = cx.estimate(ord(s, 0))?.value;
    let q_cross_x = cx.estimate(ord(1, s - 1))?.value;
    let q_y = cy.estimate(ord(s, 0))?.value;
    let q_cross_y = if symmetrized {
        Some(cy.estimate(ord(1, s - 1))?.value)
    } else {
        None
    };
    let value = match q_cross_y {
        Some(qcy) => symmetrized_bregman_from_components(q_x, q_y, q_cross_x, qcy, s),
        None => bregman_from_components(q_x, q_y, q_cross_x, s),
    };
    Ok(BregmanEstimate {
        value,
        s,
        symmetrized,
        q_x,
        q_y,
        q_cross_x,
        q_cross_y,
    })
}

/// Expected ε-join size `m1 m2 ε^d b_1(d) e^{-v}` for tables of `m1` and `m2`
/// records with estimated variability `v_hat`.
pub fn join_size_estimate(m1: u64, m2: u64, epsilon: f64, d: usize, v_hat: f64) -> Result<f64> {
    if m1 == 0 || m2 == 0 {
        return invalid("table sizes must be positive");
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    if v_hat.is_nan() {
        return invalid("variability is NaN");
    }
    Ok(m1 as f64 * m2 as f64 * epsilon.powi(d as i32) * unit_ball_volume(d)? * (-v_hat).exp())
}
