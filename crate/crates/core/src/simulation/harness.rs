use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{Coincidences, FunctionalOrder};
use crate::inference::{
    bregman_estimate, bregman_from_components, confidence_interval, entropy_estimate, normalized_residual,
    standardized_q, variance_from,
};
use crate::oracle::true_q;

use super::config::{ExperimentConfig, Target};
use super::ks::{ks_test, KsResult};
use super::sampler::{replication_rng, sample};

/// One replication's output. `k_n` and `residual` are absent for Bregman targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub estimate: f64,
    /// Functional estimate behind `estimate` (equal to it for target `q`).
    pub q: f64,
    pub k_n: Option<f64>,
    pub residual: Option<f64>,
    /// Whether the interval at the configured level covered the truth.
    pub covered: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub n_sim: usize,
    pub epsilon: f64,
    pub truth: f64,
    pub mean: f64,
    /// Sample standard deviation (zero for a single replication).
    pub sd: f64,
    pub bias: f64,
    pub mse: f64,
    pub residual_mean: Option<f64>,
    pub residual_sd: Option<f64>,
    pub ks: Option<KsResult>,
    pub coverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationResult {
    pub config: ExperimentConfig,
    pub records: Vec<ReplicationRecord>,
    pub summary: ReplicationSummary,
}

/// Mean of `(estimate - truth)²`.
pub fn empirical_mse(estimates: &[f64], truth: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput("empirical_mse needs at least one estimate".into()));
    }
    Ok(estimates.iter().map(|e| (e - truth) * (e - truth)).sum::<f64>() / estimates.len() as f64)
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Reference value of the configured target.
pub fn target_truth(cfg: &ExperimentConfig) -> Result<f64> {
    let x = &cfg.dist_x;
    let y = cfg.dist_y.as_ref();
    match cfg.target {
        Target::Q => true_q(x, y, cfg.order),
        Target::Entropy | Target::Variability => {
            let q = true_q(x, y, cfg.order)?;
            Ok(q.ln() / (1.0 - cfg.order.r() as f64))
        }
        Target::Bregman { s, symmetrized } => {
            let y = y.ok_or_else(|| Error::Config("bregman target needs y".into()))?;
            let o = |r1, r2| FunctionalOrder { r1, r2 };
            let q_x = true_q(x, None, o(s, 0))?;
            let q_y = true_q(y, None, o(s, 0))?;
            let q_xy = true_q(x, Some(y), o(1, s - 1))?;
            let b = bregman_from_components(q_x, q_y, q_xy, s);
            if symmetrized {
                let q_yx = true_q(y, Some(x), o(1, s - 1))?;
                Ok((b + bregman_from_components(q_y, q_x, q_yx, s)) / s as f64)
            } else {
                Ok(b)
            }
        }
    }
}

fn replicate(cfg: &ExperimentConfig, index: usize, epsilon: f64, truth: f64) -> Result<ReplicationRecord> {
    let mut rng = replication_rng(cfg.seed, index as u64);
    let x = sample(&cfg.dist_x, cfg.n1, &mut rng)?;
    let y = match &cfg.dist_y {
        Some(spec) if cfg.n2 > 0 => Some(sample(spec, cfg.n2, &mut rng)?),
        _ => None,
    };
    let abort = |e: Error| match e {
        Error::InsufficientSample(m) => Error::InsufficientSample(format!("replication {index}: {m}")),
        other => other,
    };

    if let Target::Bregman { s, symmetrized } = cfg.target {
        let y = y.as_ref().ok_or_else(|| Error::Config("bregman target needs y".into()))?;
        let b = bregman_estimate(&x, y, s, epsilon, symmetrized).map_err(abort)?;
        return Ok(ReplicationRecord {
            replication: index,
            estimate: b.value,
            q: b.q_cross_x,
            k_n: None,
            residual: None,
            covered: None,
        });
    }

    let c = Coincidences::prepare(&x, y.as_ref(), cfg.order, epsilon, cfg.mode).map_err(abort)?;
    let work = cfg.order.working().0;
    let q = crate::functional::QEstimate {
        order: cfg.order,
        ..c.estimate(work).map_err(abort)?
    };
    let var = variance_from(&c, work).map_err(abort)?;
    let n = c.n();
    let k = var.kappa_hat;
    let (estimate, residual, covered) = match cfg.target {
        Target::Q => (q.value, standardized_q(q.value, truth, k, n), None),
        _ => {
            let h = entropy_estimate(q, n)?;
            let res = normalized_residual(h.h_hat, truth, k, q.value, n, cfg.order.r());
            let covered = match cfg.ci_level {
                Some(level) => match confidence_interval(&h, &var, n, level) {
                    Ok(ci) => Some(ci.contains(truth)),
                    Err(Error::UndefinedInterval(_)) => Some(false),
                    Err(e) => return Err(e),
                },
                None => None,
            };
            (h.h_hat, res, covered)
        }
    };
    Ok(ReplicationRecord {
        replication: index,
        estimate,
        q: q.value,
        k_n: Some(k),
        residual: Some(residual),
        covered,
    })
}

/// Summary statistics recomputed from a list of records.
pub fn summarize(records: &[ReplicationRecord], truth: f64, epsilon: f64) -> Result<ReplicationSummary> {
    let estimates: Vec<f64> = records.iter().map(|r| r.estimate).collect();
    let mse = empirical_mse(&estimates, truth)?;
    let (mean, sd) = mean_sd(&estimates);
    let residuals: Vec<f64> = records.iter().filter_map(|r| r.residual).collect();
    let (residual_mean, residual_sd, ks) = if residuals.is_empty() {
        (None, None, None)
    } else {
        let (m, s) = mean_sd(&residuals);
        (Some(m), Some(s), Some(ks_test(&residuals)?))
    };
    let flags: Vec<bool> = records.iter().filter_map(|r| r.covered).collect();
    let coverage = (!flags.is_empty())
        .then(|| flags.iter().filter(|&&c| c).count() as f64 / flags.len() as f64);
    Ok(ReplicationSummary {
        n_sim: records.len(),
        epsilon,
        truth,
        mean,
        sd,
        bias: mean - truth,
        mse,
        residual_mean,
        residual_sd,
        ks,
        coverage,
    })
}

/// Runs `cfg.n_sim` independent replications in parallel on the current rayon
/// pool. Replication `i` uses the stream seeded with `seed ^ i`, so the result
/// does not depend on the number of threads.
pub fn run_replications(cfg: &ExperimentConfig) -> Result<ReplicationResult> {
    cfg.validate()?;
    let truth = target_truth(cfg)?;
    let epsilon = cfg.epsilon()?;
    let records = (0..cfg.n_sim)
        .into_par_iter()
        .map(|i| replicate(cfg, i, epsilon, truth))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&records, truth, epsilon)?;
    Ok(ReplicationResult {
        config: cfg.clone(),
        records,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::config::preset;

    #[test]
    fn mse_examples() {
        assert_eq!(empirical_mse(&[0.3, 0.3], 0.3).unwrap(), 0.0);
        assert_eq!(empirical_mse(&[0.0, 1.0], 0.5).unwrap(), 0.25);
        assert!(matches!(empirical_mse(&[], 0.0), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn single_replication_summary() {
        let mut cfg = preset("example2").unwrap().cells[0].clone();
        cfg.n_sim = 1;
        let r = run_replications(&cfg).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.summary.mean, r.records[0].estimate);
        assert_eq!(r.summary.sd, 0.0);
        assert_eq!(r.summary.residual_mean, r.records[0].residual);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let mut cfg = preset("example3").unwrap().cells[0].clone();
        cfg.n_sim = 12;
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_replications(&cfg).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn truths() {
        let e2 = preset("example2").unwrap().cells[0].clone();
        assert!((target_truth(&e2).unwrap() - (2.0 * std::f64::consts::PI.sqrt() * 1f64.exp()).ln()).abs() < 1e-12);
        let e3 = preset("example3").unwrap().cells[0].clone();
        assert!((target_truth(&e3).unwrap() - (12f64.sqrt() * std::f64::consts::PI).ln()).abs() < 1e-12);
        let e4 = preset("example4").unwrap().cells[0].clone();
        assert!((target_truth(&e4).unwrap() - 0.5).abs() < 1e-12);
    }
}
