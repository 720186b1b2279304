use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};

/// Student-r density maximizing the Rényi `s`-entropy for mean `mu` and covariance `sigma`.
///
/// With `m = d + 2/(s-1)` and `C = (m+2) Σ`,
/// `p(x) = A (1 - (x-μ)ᵀ C⁻¹ (x-μ))^{1/(s-1)}` inside the ellipsoid and zero outside,
/// where `A = Γ(m/2 + 1) / (|πC|^{1/2} Γ((m-d)/2 + 1))`.
///
/// `sigma` is row-major `d × d` and must be symmetric positive definite.
pub fn student_r_density(x: &[f64], mu: &[f64], sigma: &[f64], s: u32) -> Result<f64> {
    let d = mu.len();
    if d == 0 || x.len() != d || sigma.len() != d * d {
        return invalid("student_r_density: x, mu and sigma dimensions disagree");
    }
    if s < 2 {
        return invalid(format!("student_r_density needs s >= 2, got {s}"));
    }
    let cov = DMatrix::from_row_slice(d, d, sigma);
    if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
        return invalid("covariance is not symmetric");
    }
    let chol = cov
        .cholesky()
        .ok_or_else(|| crate::Error::InvalidArgument("covariance is not positive definite".into()))?;

    let df = d as f64;
    let m = df + 2.0 / (s as f64 - 1.0);
    let diff = DVector::from_iterator(d, x.iter().zip(mu).map(|(a, b)| a - b));
    let white = chol
        .l()
        .solve_lower_triangular(&diff)
        .ok_or_else(|| crate::Error::InvalidArgument("singular covariance".into()))?;
    let quad = white.norm_squared() / (m + 2.0);
    if quad > 1.0 {
        return Ok(0.0);
    }
    // |πC|^{1/2} = (π(m+2))^{d/2} |Σ|^{1/2}, and |Σ|^{1/2} is the product of L's diagonal
    let sqrt_det: f64 = chol.l().diagonal().iter().product();
    let norm = (std::f64::consts::PI * (m + 2.0)).powf(df / 2.0) * sqrt_det;
    let a = gamma(m / 2.0 + 1.0) / (norm * gamma((m - df) / 2.0 + 1.0));
    Ok(a * (1.0 - quad).powf(1.0 / (s as f64 - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::simpson;

    #[test]
    fn support_and_peak() {
        assert_eq!(student_r_density(&[10.0], &[0.0], &[1.0], 2).unwrap(), 0.0);
        // d=1, s=2: m=3, C=5, A = Γ(5/2) / (√(5π) Γ(2))
        let a = gamma(2.5) / (5.0 * std::f64::consts::PI).sqrt();
        assert!((student_r_density(&[0.0], &[0.0], &[1.0], 2).unwrap() - a).abs() < 1e-14);
    }

    #[test]
    fn normalised_with_unit_variance() {
        for s in [2u32, 3, 5] {
            let half = (1.0f64 + 2.0 / (s as f64 - 1.0) + 2.0).sqrt();
            let (lo, hi) = (-half, half);
            let n = 200_000;
            let mass = simpson(|t| student_r_density(&[t], &[0.0], &[1.0], s).unwrap(), lo, hi, n);
            let var = simpson(|t| t * t * student_r_density(&[t], &[0.0], &[1.0], s).unwrap(), lo, hi, n);
            let tol = if s == 2 { 1e-10 } else { 1e-5 };
            assert!((mass - 1.0).abs() < tol, "s={s} mass={mass}");
            assert!((var - 1.0).abs() < tol, "s={s} var={var}");
        }
    }

    #[test]
    fn rejects_bad_covariance() {
        assert!(student_r_density(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 2.0, 2.0, 1.0], 2).is_err());
        assert!(student_r_density(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.5, 0.4, 1.0], 2).is_err());
        assert!(student_r_density(&[0.0], &[0.0], &[-1.0], 2).is_err());
        assert!(student_r_density(&[0.0], &[0.0], &[1.0], 1).is_err());
    }

    #[test]
    fn bivariate_mass() {
        use crate::oracle::simpson_2d;
        let sigma = [1.0, 0.3, 0.3, 0.5];
        let m = 2.0 + 2.0;
        let (hx, hy) = (((m + 2.0) * 1.0f64).sqrt(), ((m + 2.0) * 0.5f64).sqrt());
        let mass = simpson_2d(
            |a, b| student_r_density(&[a, b], &[0.0, 0.0], &sigma, 2).unwrap(),
            (-hx, hx),
            (-hy, hy),
            1200,
        );
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    }
}
