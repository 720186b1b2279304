//! Distribution catalog and closed-form values of `q_(r1,r2)`.
//!
//! Closed forms (X ~ first spec, Y ~ second spec, `r = r1 + r2`):
//!
//! * Gaussian `N(μ1,σ1²)`, `N(μ2,σ2²)`: the integrand `φ1^r1 φ2^r2` is an
//!   unnormalised Gaussian in x with precision `A = r1/σ1² + r2/σ2²`, linear
//!   coefficient `B = r1 μ1/σ1² + r2 μ2/σ2²` and constant
//!   `C = r1 μ1²/σ1² + r2 μ2²/σ2²`, so
//!   `q = (2πσ1²)^(-r1/2) (2πσ2²)^(-r2/2) sqrt(2π/A) exp(-(C - B²/A)/2)`.
//! * Isotropic standard Gaussian in `d` dimensions: the 1-d value to the power `d`.
//! * Exponential rates `β1`, `β2`: `∫_0^∞ β1^r1 β2^r2 e^{-(r1β1 + r2β2)x} dx
//!   = β1^r1 β2^r2 / (r1β1 + r2β2)`.
//! * Bernoulli products on `{0,1}^d`: per coordinate `p1^r1 p2^r2 + (1-p1)^r1 (1-p2)^r2`,
//!   multiplied over the `d` coordinates.
//! * Uniform on `{1..m1}` and `{1..m2}`: `min(m1,m2) m1^-r1 m2^-r2`, i.e. `m^(1-r)` when equal.
//!
//! Every closed form is cross-checked against [`super::numeric_q`] in tests.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::functional::FunctionalOrder;
use crate::inference::student_r_density;
use crate::sample::Mode;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// `N(mean, var)` on the real line.
    Gaussian1d { mean: f64, var: f64 },
    /// `N(0, I_d)`.
    GaussianIso { dim: usize },
    /// `Exp(rate)`, density `rate · e^{-rate x}` on `x > 0`.
    Exponential { rate: f64 },
    /// `d` independent Bernoulli(`p`) coordinates.
    BernoulliProduct { dim: usize, p: f64 },
    /// Uniform on the integers `1..=m`.
    UniformDiscrete { m: u32 },
    /// Compactly supported Student-r density with mean `mean`, covariance
    /// `cov` (row-major `d × d`) and Rényi order `s`.
    StudentR { mean: Vec<f64>, cov: Vec<f64>, s: u32 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian1d { mean, var } => {
                if !(mean.is_finite() && *var > 0.0 && var.is_finite()) {
                    return invalid(format!("gaussian1d needs finite mean and var > 0, got ({mean}, {var})"));
                }
            }
            Self::GaussianIso { dim } | Self::BernoulliProduct { dim, .. } if *dim == 0 => {
                return invalid("dimension must be at least 1");
            }
            Self::GaussianIso { .. } => {}
            Self::Exponential { rate } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return invalid(format!("exponential rate must be positive, got {rate}"));
                }
            }
            Self::BernoulliProduct { p, .. } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return invalid(format!("bernoulli p must lie in (0,1), got {p}"));
                }
            }
            Self::UniformDiscrete { m } => {
                if *m == 0 {
                    return invalid("uniformDiscrete needs m >= 1");
                }
            }
            Self::StudentR { mean, cov, s } => {
                let d = mean.len();
                if d == 0 || cov.len() != d * d {
                    return invalid("studentR needs a d-vector mean and d x d covariance");
                }
                if *s < 2 {
                    return invalid("studentR needs s >= 2");
                }
                // positive definiteness is checked by evaluating the density
                student_r_density(mean, mean, cov, *s)?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gaussian1d { .. } | Self::Exponential { .. } | Self::UniformDiscrete { .. } => 1,
            Self::GaussianIso { dim } | Self::BernoulliProduct { dim, .. } => *dim,
            Self::StudentR { mean, .. } => mean.len(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Self::BernoulliProduct { .. } | Self::UniformDiscrete { .. } => Mode::Discrete,
            _ => Mode::Continuous,
        }
    }

    /// Density at `x` (continuous families only).
    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Self::Gaussian1d { mean, var } => gauss(x[0], *mean, *var),
            Self::GaussianIso { .. } => x.iter().map(|&v| gauss(v, 0.0, 1.0)).product(),
            Self::Exponential { rate } => {
                if x[0] < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x[0]).exp()
                }
            }
            Self::StudentR { mean, cov, s } => student_r_density(x, mean, cov, *s)?,
            Self::BernoulliProduct { .. } | Self::UniformDiscrete { .. } => {
                return invalid("discrete distributions have no density")
            }
        })
    }

    /// Per-axis truncation box outside which the density is negligible (or zero).
    ///
    /// Gaussian: `μ ± 12σ`; exponential: `[0, 40/β]`; Student-r: its exact support box.
    pub fn truncation_box(&self) -> Result<Vec<(f64, f64)>> {
        Ok(match self {
            Self::Gaussian1d { mean, var } => {
                let sd = var.sqrt();
                vec![(mean - 12.0 * sd, mean + 12.0 * sd)]
            }
            Self::GaussianIso { dim } => vec![(-12.0, 12.0); *dim],
            Self::Exponential { rate } => vec![(0.0, 40.0 / rate)],
            Self::StudentR { mean, cov, s } => {
                let d = mean.len();
                let m = d as f64 + 2.0 / (*s as f64 - 1.0);
                (0..d)
                    .map(|k| {
                        let half = ((m + 2.0) * cov[k * d + k]).sqrt();
                        (mean[k] - half, mean[k] + half)
                    })
                    .collect()
            }
            Self::BernoulliProduct { .. } | Self::UniformDiscrete { .. } => {
                return invalid("discrete distributions have no truncation box")
            }
        })
    }

    /// `P{ |X - x| <= eps }` for one-dimensional continuous families.
    pub fn ball_probability(&self, x: f64, eps: f64) -> Result<f64> {
        use super::normal::normal_cdf;
        match self {
            Self::Gaussian1d { mean, var } => {
                let sd = var.sqrt();
                Ok(normal_cdf((x + eps - mean) / sd) - normal_cdf((x - eps - mean) / sd))
            }
            Self::GaussianIso { dim: 1 } => Ok(normal_cdf(x + eps) - normal_cdf(x - eps)),
            Self::Exponential { rate } => {
                let cdf = |t: f64| if t <= 0.0 { 0.0 } else { -(-rate * t).exp_m1() };
                Ok(cdf(x + eps) - cdf(x - eps))
            }
            _ => Err(Error::Unsupported(format!("ball probability for {self}"))),
        }
    }

    fn as_gaussian_1d(&self) -> Option<(f64, f64)> {
        match self {
            Self::Gaussian1d { mean, var } => Some((*mean, *var)),
            Self::GaussianIso { dim: 1 } => Some((0.0, 1.0)),
            _ => None,
        }
    }
}

fn gauss(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

fn gaussian_q(r1: u32, r2: u32, (m1, v1): (f64, f64), (m2, v2): (f64, f64)) -> f64 {
    let (r1, r2) = (r1 as f64, r2 as f64);
    let a = r1 / v1 + r2 / v2;
    let b = r1 * m1 / v1 + r2 * m2 / v2;
    let c = r1 * m1 * m1 / v1 + r2 * m2 * m2 / v2;
    (2.0 * PI * v1).powf(-r1 / 2.0)
        * (2.0 * PI * v2).powf(-r2 / 2.0)
        * (2.0 * PI / a).sqrt()
        * (-(c - b * b / a) / 2.0).exp()
}

/// Closed-form `q_(r1,r2)` for a catalog pair, or [`Error::Unsupported`].
///
/// `y` may be omitted when `r2 = 0`; with `r1 = 0` the roles are exchanged.
pub fn closed_form_q(
    x: &DistributionSpec,
    y: Option<&DistributionSpec>,
    order: FunctionalOrder,
) -> Result<f64> {
    x.validate()?;
    if let Some(y) = y {
        y.validate()?;
    }
    let (order, x, y) = if order.r1 == 0 {
        let y = y.ok_or_else(|| Error::InvalidArgument(format!("order {order} needs a Y distribution")))?;
        (order.swapped(), y, Some(x))
    } else {
        (order, x, y)
    };
    let FunctionalOrder { r1, r2 } = order;
    // With r2 = 0, Y is irrelevant; pair X with itself so each family has one arm.
    let y = if r2 == 0 { x } else {
        y.ok_or_else(|| Error::InvalidArgument(format!("order {order} needs a Y distribution")))?
    };
    let unsupported = || Error::Unsupported(format!("no closed form for {x} vs {y}"));

    if let (Some(gx), Some(gy)) = (x.as_gaussian_1d(), y.as_gaussian_1d()) {
        return Ok(gaussian_q(r1, r2, gx, gy));
    }
    match (x, y) {
        (DistributionSpec::GaussianIso { dim: dx }, DistributionSpec::GaussianIso { dim: dy }) if dx == dy => {
            Ok(gaussian_q(r1, r2, (0.0, 1.0), (0.0, 1.0)).powi(*dx as i32))
        }
        (DistributionSpec::Exponential { rate: b1 }, DistributionSpec::Exponential { rate: b2 }) => {
            let (f1, f2) = (r1 as f64, r2 as f64);
            Ok(b1.powi(r1 as i32) * b2.powi(r2 as i32) / (f1 * b1 + f2 * b2))
        }
        (
            DistributionSpec::BernoulliProduct { dim: dx, p: p1 },
            DistributionSpec::BernoulliProduct { dim: dy, p: p2 },
        ) if dx == dy => {
            let per = p1.powi(r1 as i32) * p2.powi(r2 as i32)
                + (1.0 - p1).powi(r1 as i32) * (1.0 - p2).powi(r2 as i32);
            Ok(per.powi(*dx as i32))
        }
        (DistributionSpec::UniformDiscrete { m: m1 }, DistributionSpec::UniformDiscrete { m: m2 }) => {
            let common = (*m1).min(*m2) as f64;
            Ok(common * (*m1 as f64).powi(-(r1 as i32)) * (*m2 as f64).powi(-(r2 as i32)))
        }
        _ => Err(unsupported()),
    }
}

/// Reference value of `q_(r1,r2)`: the closed form when the catalog has one,
/// otherwise composite-Simpson quadrature for continuous pairs with `d <= 2`.
pub fn true_q(
    x: &DistributionSpec,
    y: Option<&DistributionSpec>,
    order: FunctionalOrder,
) -> Result<f64> {
    match closed_form_q(x, y, order) {
        Err(Error::Unsupported(msg)) => {
            super::quadrature::numeric_q(x, y, order, None).map_err(|e| match e {
                Error::Unsupported(inner) => Error::Unsupported(format!("{msg}; {inner}")),
                other => other,
            })
        }
        other => other,
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian1d { mean, var } => write!(f, "gaussian1d({mean},{var})"),
            Self::GaussianIso { dim } => write!(f, "gaussianIsoD({dim})"),
            Self::Exponential { rate } => write!(f, "exponential({rate})"),
            Self::BernoulliProduct { dim, p } => write!(f, "bernoulliProduct({dim},{p})"),
            Self::UniformDiscrete { m } => write!(f, "uniformDiscrete({m})"),
            Self::StudentR { mean, cov, s } if mean.len() == 1 => {
                write!(f, "studentR({},{},{s})", mean[0], cov[0])
            }
            Self::StudentR { mean, cov, s } => write!(f, "studentR({mean:?},{cov:?},{s})"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `name(arg, ...)`: `gaussian1d(mean,var)`, `gaussianIsoD(d)`,
    /// `exponential(rate)` (alias `exp`), `bernoulliProduct(d,p)`,
    /// `uniformDiscrete(m)`, `studentR(mean,var,s)` (one-dimensional).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse distribution {s:?}"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = s[..open].trim();
        let args: Vec<&str> = s[open + 1..s.len() - 1]
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .collect();
        let num = |i: usize| -> Result<f64> { args.get(i).ok_or_else(bad)?.parse::<f64>().map_err(|_| bad()) };
        let int = |i: usize| -> Result<u64> { args.get(i).ok_or_else(bad)?.parse::<u64>().map_err(|_| bad()) };
        let arity = |k: usize| if args.len() == k { Ok(()) } else { Err(bad()) };

        let spec = match name {
            "gaussian1d" | "gaussian" | "normal" => {
                arity(2)?;
                Self::Gaussian1d { mean: num(0)?, var: num(1)? }
            }
            "gaussianIsoD" | "gaussianIso" => {
                arity(1)?;
                Self::GaussianIso { dim: int(0)? as usize }
            }
            "exponential" | "exp" => {
                arity(1)?;
                Self::Exponential { rate: num(0)? }
            }
            "bernoulliProduct" | "bernoulliProductD" | "bernoulli" => {
                arity(2)?;
                Self::BernoulliProduct { dim: int(0)? as usize, p: num(1)? }
            }
            "uniformDiscrete" | "uniform" => {
                arity(1)?;
                Self::UniformDiscrete { m: u32::try_from(int(0)?).map_err(|_| bad())? }
            }
            "studentR" => {
                arity(3)?;
                Self::StudentR {
                    mean: vec![num(0)?],
                    cov: vec![num(1)?],
                    s: u32::try_from(int(2)?).map_err(|_| bad())?,
                }
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}
