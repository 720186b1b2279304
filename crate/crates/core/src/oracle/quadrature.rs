//! Composite-Simpson quadrature oracle for `∫ p_X^r1 p_Y^r2` (d <= 2).

use crate::error::{invalid, Error, Result};
use crate::functional::FunctionalOrder;

use super::catalog::DistributionSpec;

/// Default number of Simpson intervals for one-dimensional integrals.
pub const DEFAULT_GRID_1D: usize = 20_000;
/// Default number of Simpson intervals per axis for two-dimensional integrals.
pub const DEFAULT_GRID_2D: usize = 600;

/// Composite Simpson rule on `[a, b]` with `n` intervals (`n` is rounded up to even).
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Tensor-product Simpson rule on a rectangle with `n` intervals per axis.
pub fn simpson_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    n: usize,
) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let hx = (bx - ax) / n as f64;
    let hy = (by - ay) / n as f64;
    let weight = |k: usize| {
        if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut acc = 0.0;
    for i in 0..=n {
        let x = ax + i as f64 * hx;
        let wi = weight(i);
        let mut row = 0.0;
        for j in 0..=n {
            row += weight(j) * f(x, ay + j as f64 * hy);
        }
        acc += wi * row;
    }
    acc * hx * hy / 9.0
}

/// Integrates `p_X(x)^r1 p_Y(x)^r2` over a box with composite Simpson.
///
/// `px` and `py` are arbitrary evaluable densities; `domain` has one interval
/// per axis and must have length 1 or 2.
pub fn numeric_q_with<FX, FY>(
    px: FX,
    py: FY,
    order: FunctionalOrder,
    domain: &[(f64, f64)],
    grid: usize,
) -> Result<f64>
where
    FX: Fn(&[f64]) -> f64,
    FY: Fn(&[f64]) -> f64,
{
    let (r1, r2) = (order.r1 as i32, order.r2 as i32);
    let mut bad = false;
    let mut integrand = |x: &[f64]| {
        let a = if r1 > 0 { px(x) } else { 1.0 };
        let b = if r2 > 0 { py(x) } else { 1.0 };
        if !(a.is_finite() && b.is_finite()) {
            bad = true;
            return 0.0;
        }
        a.powi(r1) * b.powi(r2)
    };
    let value = match domain {
        [(a, b)] => simpson(|t| integrand(&[t]), *a, *b, grid),
        [dx, dy] => simpson_2d(|s, t| integrand(&[s, t]), *dx, *dy, grid),
        _ => return Err(Error::Unsupported(format!("quadrature in {} dimensions", domain.len()))),
    };
    if bad || !value.is_finite() {
        return invalid("density evaluated to a non-finite value");
    }
    Ok(value)
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    a.iter()
        .zip(b)
        .map(|(&(a0, a1), &(b0, b1))| (a0.max(b0), a1.min(b1)))
        .collect()
}

/// Quadrature value of `q_(r1,r2)` for continuous catalog distributions.
///
/// The integration box is the truncation box of X (or of Y when `r1 = 0`),
/// intersected with the other one when both exponents are positive.
/// `grid` defaults to [`DEFAULT_GRID_1D`] or [`DEFAULT_GRID_2D`] intervals per axis.
pub fn numeric_q(
    x: &DistributionSpec,
    y: Option<&DistributionSpec>,
    order: FunctionalOrder,
    grid: Option<usize>,
) -> Result<f64> {
    let need_y = order.r2 > 0;
    let y = if need_y {
        Some(y.ok_or_else(|| Error::InvalidArgument(format!("order {order} needs a Y distribution")))?)
    } else {
        None
    };
    for s in std::iter::once(x).chain(y) {
        s.validate()?;
        if s.mode() != crate::sample::Mode::Continuous {
            return Err(Error::Unsupported(format!("quadrature for discrete {s}")));
        }
    }
    let d = x.dim();
    if let Some(y) = y {
        if y.dim() != d {
            return invalid("dimension mismatch");
        }
    }
    if d > 2 {
        return Err(Error::Unsupported(format!("quadrature in {d} dimensions")));
    }

    let domain = match (order.r1 > 0, y) {
        (true, Some(y)) => intersect(&x.truncation_box()?, &y.truncation_box()?),
        (true, None) => x.truncation_box()?,
        (false, Some(y)) => y.truncation_box()?,
        (false, None) => return invalid("order has r1 = r2 = 0"),
    };
    if domain.iter().any(|&(a, b)| a >= b) {
        return Ok(0.0);
    }
    let grid = grid.unwrap_or(if d == 1 { DEFAULT_GRID_1D } else { DEFAULT_GRID_2D });
    numeric_q_with(
        |p| x.pdf(p).unwrap_or(f64::NAN),
        |p| y.map_or(1.0, |y| y.pdf(p).unwrap_or(f64::NAN)),
        order,
        &domain,
        grid,
    )
}

/// ε-coincidence probability `q_(r,ε) = E p_{X,ε}(X)^(r1-1) p_{Y,ε}(X)^r2`
/// for one-dimensional continuous catalog pairs, by quadrature over X's density.
/// This is the exact expectation of the raw U-statistic.
pub fn coincidence_q(
    x: &DistributionSpec,
    y: Option<&DistributionSpec>,
    order: FunctionalOrder,
    epsilon: f64,
    grid: Option<usize>,
) -> Result<f64> {
    let (order, x, y) = if order.r1 == 0 {
        let y = y.ok_or_else(|| Error::InvalidArgument("order needs a Y distribution".into()))?;
        (order.swapped(), y, Some(x))
    } else {
        (order, x, y)
    };
    if x.dim() != 1 || x.mode() != crate::sample::Mode::Continuous {
        return Err(Error::Unsupported(format!("coincidence probability for {x}")));
    }
    let (r1, r2) = (order.r1 as i32, order.r2 as i32);
    let y = if r2 > 0 {
        Some(y.ok_or_else(|| Error::InvalidArgument("order needs a Y distribution".into()))?)
    } else {
        None
    };
    // probe for support of the ball probability
    x.ball_probability(0.0, epsilon)?;
    if let Some(y) = y {
        y.ball_probability(0.0, epsilon)?;
    }
    let (a, b) = x.truncation_box()?[0];
    let value = simpson(
        |t| {
            let px = x.pdf(&[t]).unwrap_or(0.0);
            if px == 0.0 {
                return 0.0;
            }
            let bx = x.ball_probability(t, epsilon).unwrap_or(0.0);
            let by = y.map_or(1.0, |y| y.ball_probability(t, epsilon).unwrap_or(0.0));
            px * bx.powi(r1 - 1) * by.powi(r2)
        },
        a,
        b,
        grid.unwrap_or(DEFAULT_GRID_1D),
    );
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ord(r1: u32, r2: u32) -> FunctionalOrder {
        FunctionalOrder::new(r1, r2).unwrap()
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 2);
        assert!((v - (4.0 - 0.25 - 3.0 + 3.0)).abs() < 1e-14);
    }

    #[test]
    fn exponential_self() {
        let e = DistributionSpec::Exponential { rate: 1.0 };
        let v = numeric_q(&e, None, ord(2, 0), None).unwrap();
        assert!((v - 0.5).abs() < 1e-8, "{v}");
    }

    #[test]
    fn standard_normal_quadratic() {
        let g = DistributionSpec::Gaussian1d { mean: 0.0, var: 1.0 };
        let v = numeric_q(&g, None, ord(2, 0), None).unwrap();
        assert!((v - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn student_r_normalises() {
        let s = DistributionSpec::StudentR { mean: vec![0.0], cov: vec![1.0], s: 2 };
        let v = numeric_q(&s, None, ord(1, 0), None).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn two_dimensional_gaussian() {
        let g = DistributionSpec::GaussianIso { dim: 2 };
        let v = numeric_q(&g, None, ord(3, 0), None).unwrap();
        assert!((v - 1.0 / (12.0 * PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn rejects_discrete_and_high_dimension() {
        let b = DistributionSpec::BernoulliProduct { dim: 1, p: 0.3 };
        assert!(numeric_q(&b, None, ord(2, 0), None).is_err());
        let g = DistributionSpec::GaussianIso { dim: 3 };
        assert!(matches!(numeric_q(&g, None, ord(2, 0), None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn coincidence_probability_tends_to_scaled_functional() {
        // q_(2,ε) / (2ε) -> ∫ p² as ε -> 0
        let g = DistributionSpec::Gaussian1d { mean: 0.0, var: 1.0 };
        let eps = 1e-3;
        let v = coincidence_q(&g, None, ord(2, 0), eps, None).unwrap() / (2.0 * eps);
        assert!((v - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-6);
    }
}
