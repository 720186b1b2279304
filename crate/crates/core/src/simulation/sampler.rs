//! Seeded samplers for the catalog distributions.
//!
//! All randomness comes from ChaCha8 streams. Replication `i` of a run with
//! seed `s` draws from the stream seeded with `s ^ i`, X first and then Y.
//!
//! * Gaussian: Marsaglia polar transform of uniforms.
//! * Exponential: inverse CDF, `-ln(1 - U) / β`.
//! * Bernoulli: threshold, `U < p`.
//! * Uniform discrete: `rand`'s unbiased integer range sampling.
//! * Student-r: `μ + sqrt(m+2) L z`, with `Σ = L Lᵀ`, `z = sqrt(B) u`,
//!   `B ~ Beta(d/2, 1/(s-1) + 1)` and `u` uniform on the unit sphere.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{invalid, Result};
use crate::oracle::DistributionSpec;
use crate::sample::Sample;

pub type SimRng = ChaCha8Rng;

/// Stream for replication `index` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, index: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

/// Fills `out` with standard normal draws using the polar method.
pub fn standard_normals<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut k = 0;
    while k < out.len() {
        let (u, v, s) = loop {
            let u = 2.0 * rng.random::<f64>() - 1.0;
            let v = 2.0 * rng.random::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                break (u, v, s);
            }
        };
        let f = (-2.0 * s.ln() / s).sqrt();
        out[k] = u * f;
        if k + 1 < out.len() {
            out[k + 1] = v * f;
        }
        k += 2;
    }
}

/// Draws `n` i.i.d. observations from `spec`.
pub fn sample<R: Rng + ?Sized>(spec: &DistributionSpec, n: usize, rng: &mut R) -> Result<Sample> {
    spec.validate()?;
    match spec {
        DistributionSpec::Gaussian1d { mean, var } => {
            let mut z = vec![0.0; n];
            standard_normals(rng, &mut z);
            let sd = var.sqrt();
            Sample::continuous(1, z.into_iter().map(|v| mean + sd * v).collect())
        }
        DistributionSpec::GaussianIso { dim } => {
            let mut z = vec![0.0; n * dim];
            standard_normals(rng, &mut z);
            Sample::continuous(*dim, z)
        }
        DistributionSpec::Exponential { rate } => {
            let xs = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln() / rate).collect();
            Sample::continuous(1, xs)
        }
        DistributionSpec::BernoulliProduct { dim, p } => {
            let xs = (0..n * dim).map(|_| i64::from(rng.random::<f64>() < *p)).collect();
            Sample::discrete(*dim, xs)
        }
        DistributionSpec::UniformDiscrete { m } => {
            let xs = (0..n).map(|_| rng.random_range(1..=i64::from(*m))).collect();
            Sample::discrete(1, xs)
        }
        DistributionSpec::StudentR { mean, cov, s } => sample_student_r(mean, cov, *s, n, rng),
    }
}

fn sample_student_r<R: Rng + ?Sized>(
    mean: &[f64],
    cov: &[f64],
    s: u32,
    n: usize,
    rng: &mut R,
) -> Result<Sample> {
    let d = mean.len();
    let m = d as f64 + 2.0 / (s as f64 - 1.0);
    let l = DMatrix::from_row_slice(d, d, cov)
        .cholesky()
        .ok_or_else(|| crate::Error::InvalidArgument("covariance is not positive definite".into()))?
        .unpack();
    let scale = (m + 2.0).sqrt();
    let beta = match Beta::new(d as f64 / 2.0, 1.0 / (s as f64 - 1.0) + 1.0) {
        Ok(b) => b,
        Err(e) => return invalid(format!("student-r radius law: {e}")),
    };
    let mut out = Vec::with_capacity(n * d);
    let mut dir = vec![0.0; d];
    for _ in 0..n {
        let norm = loop {
            standard_normals(rng, &mut dir);
            let nn = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nn > 0.0 {
                break nn;
            }
        };
        let radius = beta.sample(rng).sqrt();
        let z = DVector::from_iterator(d, dir.iter().map(|v| v / norm * radius));
        let x = &l * z * scale;
        out.extend(x.iter().zip(mean).map(|(a, b)| a + b));
    }
    Sample::continuous(d, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn bernoulli_frequency() {
        let mut rng = replication_rng(5, 0);
        let s = sample(&DistributionSpec::BernoulliProduct { dim: 3, p: 0.8 }, 100_000, &mut rng).unwrap();
        let c = s.lattice_coords().unwrap();
        for axis in 0..3 {
            let m = c.iter().skip(axis).step_by(3).filter(|&&v| v == 1).count() as f64 / 100_000.0;
            assert!((m - 0.8).abs() < 0.01);
        }
    }

    #[test]
    fn exponential_mean() {
        let mut rng = replication_rng(6, 0);
        let n = 20_000;
        let s = sample(&DistributionSpec::Exponential { rate: 3.0 }, n, &mut rng).unwrap();
        let se = (1.0 / 3.0) / (n as f64).sqrt();
        assert!((mean(s.real_coords().unwrap()) - 1.0 / 3.0).abs() < 3.0 * se);
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = replication_rng(7, 0);
        let n = 50_000;
        let s = sample(&DistributionSpec::Gaussian1d { mean: 2.0, var: 0.5 }, n, &mut rng).unwrap();
        let xs = s.real_coords().unwrap();
        let m = mean(xs);
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0);
        assert!((m - 2.0).abs() < 4.0 * (0.5f64 / n as f64).sqrt());
        assert!((v - 0.5).abs() < 0.02);
    }

    #[test]
    fn deterministic_streams() {
        let spec = DistributionSpec::GaussianIso { dim: 2 };
        let a = sample(&spec, 31, &mut replication_rng(9, 3)).unwrap();
        let b = sample(&spec, 31, &mut replication_rng(9, 3)).unwrap();
        let c = sample(&spec, 31, &mut replication_rng(9, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 31);
    }

    #[test]
    fn uniform_discrete_range() {
        let s = sample(&DistributionSpec::UniformDiscrete { m: 4 }, 1000, &mut replication_rng(1, 1)).unwrap();
        let c = s.lattice_coords().unwrap();
        assert!(c.iter().all(|&v| (1..=4).contains(&v)));
        for k in 1..=4 {
            assert!(c.contains(&k));
        }
    }

    #[test]
    fn student_r_support_and_variance() {
        let spec = DistributionSpec::StudentR { mean: vec![1.0], cov: vec![2.0], s: 2 };
        let n = 40_000;
        let s = sample(&spec, n, &mut replication_rng(2, 0)).unwrap();
        let xs = s.real_coords().unwrap();
        let half = (5.0f64 * 2.0).sqrt();
        assert!(xs.iter().all(|x| (x - 1.0).abs() <= half));
        let m = mean(xs);
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
        assert!((m - 1.0).abs() < 0.03);
        assert!((v - 2.0).abs() < 0.06, "{v}");
    }
}
