use entrofunc::functional::{q_from_counts, FunctionalOrder};
use entrofunc::neighbor::neighbor_counts;
use entrofunc::oracle::{closed_form_q, coincidence_q, numeric_q, true_q, DistributionSpec, DEFAULT_GRID_1D};
use entrofunc::simulation::{replication_rng, sample};

fn ord(r1: u32, r2: u32) -> FunctionalOrder {
    FunctionalOrder::new(r1, r2).unwrap()
}

fn one_d_catalog() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::Gaussian1d { mean: 0.0, var: 1.5 },
        DistributionSpec::Gaussian1d { mean: 2.0, var: 0.5 },
        DistributionSpec::Gaussian1d { mean: -1.0, var: 1.0 },
        DistributionSpec::Exponential { rate: 1.0 },
        DistributionSpec::Exponential { rate: 3.0 },
    ]
}

#[test]
fn closed_forms_agree_with_quadrature() {
    let orders = [(2, 0), (3, 0), (1, 1), (2, 1), (1, 2), (0, 2)];
    let cat = one_d_catalog();
    let mut checked = 0;
    for x in &cat {
        for y in &cat {
            // the exponential closed form is for two exponentials only
            let exp = |s: &DistributionSpec| matches!(s, DistributionSpec::Exponential { .. });
            if exp(x) != exp(y) {
                continue;
            }
            for (r1, r2) in orders {
                let o = ord(r1, r2);
                let exact = true_q(x, Some(y), o).unwrap();
                let quad = numeric_q(x, Some(y), o, None).unwrap();
                assert!((exact - quad).abs() < 1e-7, "{x} {y} {o}: {exact} vs {quad}");
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn isotropic_gaussian_matches_2d_quadrature() {
    let g = DistributionSpec::GaussianIso { dim: 2 };
    for r in 2..=4 {
        let exact = closed_form_q(&g, None, ord(r, 0)).unwrap();
        let quad = numeric_q(&g, None, ord(r, 0), None).unwrap();
        assert!((exact - quad).abs() < 1e-9, "r={r}");
    }
    let h = true_q(&g, None, ord(3, 0)).unwrap().ln() / -2.0;
    assert!((h - (12f64.sqrt() * std::f64::consts::PI).ln()).abs() < 1e-12);
}

#[test]
fn quadrature_converges_under_grid_halving() {
    for x in one_d_catalog() {
        for o in [ord(2, 0), ord(3, 0)] {
            let coarse = numeric_q(&x, None, o, Some(DEFAULT_GRID_1D)).unwrap();
            let fine = numeric_q(&x, None, o, Some(2 * DEFAULT_GRID_1D)).unwrap();
            assert!((coarse - fine).abs() < 1e-8, "{x} {o}");
        }
    }
}

#[test]
fn reference_values() {
    let p = DistributionSpec::BernoulliProduct { dim: 3, p: 0.8 };
    assert!((true_q(&p, None, ord(3, 0)).unwrap() - 0.140_608).abs() < 1e-15);
    let a = DistributionSpec::Gaussian1d { mean: 0.0, var: 1.5 };
    let b = DistributionSpec::Gaussian1d { mean: 2.0, var: 0.5 };
    let v = -true_q(&a, Some(&b), ord(1, 1)).unwrap().ln();
    assert!((v - (2.0 * std::f64::consts::PI.sqrt() * 1f64.exp()).ln()).abs() < 1e-12);
    let e1 = DistributionSpec::Exponential { rate: 1.0 };
    let e3 = DistributionSpec::Exponential { rate: 3.0 };
    let b2 = true_q(&e3, None, ord(2, 0)).unwrap() + true_q(&e1, None, ord(2, 0)).unwrap()
        - 2.0 * true_q(&e1, Some(&e3), ord(1, 1)).unwrap();
    assert!((b2 - 0.5).abs() < 1e-15);
}

/// Mean of the raw statistic over seeded replications against the exact ε-coincidence probability.
fn unbiasedness(x: &DistributionSpec, y: Option<&DistributionSpec>, o: FunctionalOrder, eps: f64, n1: usize, n2: usize) {
    let reps = 2000;
    let values: Vec<f64> = (0..reps)
        .map(|i| {
            let mut rng = replication_rng(11, i);
            let xs = sample(x, n1, &mut rng).unwrap();
            let ys = y.map(|y| sample(y, n2, &mut rng).unwrap());
            let counts = neighbor_counts(&xs, ys.as_ref(), eps).unwrap();
            q_from_counts(&counts, o).unwrap().value
        })
        .collect();
    let n = reps as f64;
    let mean = values.iter().sum::<f64>() / n;
    let se = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0) / n).sqrt();
    let target = coincidence_q(x, y, o, eps, None).unwrap();
    assert!((mean - target).abs() < 4.0 * se, "{o}: mean {mean} target {target} se {se}");
}

#[test]
fn raw_statistic_is_unbiased_one_sample() {
    unbiasedness(&DistributionSpec::Gaussian1d { mean: 0.0, var: 1.0 }, None, ord(3, 0), 0.2, 40, 0);
}

#[test]
fn raw_statistic_is_unbiased_two_sample() {
    let x = DistributionSpec::Exponential { rate: 1.0 };
    let y = DistributionSpec::Exponential { rate: 3.0 };
    unbiasedness(&x, Some(&y), ord(2, 1), 0.1, 30, 25);
    let a = DistributionSpec::Gaussian1d { mean: 0.0, var: 1.5 };
    let b = DistributionSpec::Gaussian1d { mean: 2.0, var: 0.5 };
    unbiasedness(&a, Some(&b), ord(1, 1), 0.1, 50, 60);
}
