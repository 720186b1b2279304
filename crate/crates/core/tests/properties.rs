use entrofunc::functional::{q_from_counts, Coincidences, FunctionalOrder};
use entrofunc::inference::{entropy_estimate, variance_estimate};
use entrofunc::neighbor::{build_grid, count_within, count_within_linear, neighbor_counts, neighbor_counts_brute};
use entrofunc::oracle::brute_force_q;
use entrofunc::simulation::{empirical_mse, kolmogorov_tail, ks_test};
use entrofunc::{Mode, Sample};
use proptest::prelude::*;

const ORDERS: [(u32, u32); 6] = [(2, 0), (3, 0), (1, 1), (2, 1), (2, 2), (0, 2)];

fn ord(r1: u32, r2: u32) -> FunctionalOrder {
    FunctionalOrder::new(r1, r2).unwrap()
}

/// Coordinates on a coarse lattice so that ties and boundary distances occur.
fn coords(n: std::ops::RangeInclusive<usize>, d: usize) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(move |n| prop::collection::vec((-8i32..8).prop_map(|v| v as f64 * 0.25), n * d))
}

fn pair(d: usize) -> impl Strategy<Value = (Sample, Sample)> {
    (coords(1..=12, d), coords(1..=12, d)).prop_map(move |(a, b)| {
        (Sample::continuous(d, a).unwrap(), Sample::continuous(d, b).unwrap())
    })
}

fn raw_q(x: &Sample, y: &Sample, order: FunctionalOrder, eps: f64) -> Option<f64> {
    let (work, swapped) = order.working();
    let (c, o) = if swapped { (y, x) } else { (x, y) };
    let o = (work.r2 > 0).then_some(o);
    let counts = neighbor_counts(c, o, eps).ok()?;
    q_from_counts(&counts, work).ok().map(|q| q.value)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_matches_subset_enumeration(
        (x, y) in (1usize..=3).prop_flat_map(pair),
        oi in 0usize..ORDERS.len(),
        eps in 0.05f64..1.5,
    ) {
        let order = ord(ORDERS[oi].0, ORDERS[oi].1);
        let brute = brute_force_q(&x, Some(&y), order, eps);
        match (raw_q(&x, &y, order, eps), brute) {
            (Some(fast), Ok(b)) => {
                let exact = b.value();
                prop_assert!(fast >= 0.0 && fast <= 1.0);
                prop_assert!((fast - exact).abs() <= 1e-12 * exact.abs().max(f64::MIN_POSITIVE), "{fast} vs {exact}");
            }
            (None, Err(_)) => {}
            (fast, brute) => prop_assert!(false, "disagree on feasibility: {fast:?} {brute:?}"),
        }
    }

    #[test]
    fn permutation_invariance((x, y) in pair(2), eps in 0.1f64..1.0, rot in 0usize..12) {
        let px: Vec<usize> = (0..x.len()).map(|i| (i + rot) % x.len()).rev().collect();
        let py: Vec<usize> = (0..y.len()).rev().collect();
        for (r1, r2) in ORDERS {
            let o = ord(r1, r2);
            prop_assert_eq!(raw_q(&x, &y, o, eps), raw_q(&x.permuted(&px), &y.permuted(&py), o, eps));
        }
    }

    #[test]
    fn scale_equivariance((x, y) in pair(3), eps in 0.1f64..1.0, k in -3i32..4) {
        // powers of two keep every product exact
        let lambda = 2f64.powi(k);
        let (xs, ys) = (x.scaled(lambda).unwrap(), y.scaled(lambda).unwrap());
        for (r1, r2) in ORDERS {
            let o = ord(r1, r2);
            prop_assert_eq!(raw_q(&x, &y, o, eps), raw_q(&xs, &ys, o, eps * lambda));
        }
    }

    #[test]
    fn monotone_in_epsilon((x, y) in pair(2), e1 in 0.05f64..1.0, de in 0.0f64..1.0) {
        for (r1, r2) in ORDERS {
            let o = ord(r1, r2);
            if let (Some(a), Some(b)) = (raw_q(&x, &y, o, e1), raw_q(&x, &y, o, e1 + de)) {
                prop_assert!(a <= b, "{o}: {a} > {b}");
            }
        }
    }

    #[test]
    fn y_irrelevant_when_r2_is_zero((x, y) in pair(1), eps in 0.1f64..1.0) {
        let c1 = Coincidences::prepare(&x, Some(&y), ord(3, 0), eps, Mode::Continuous);
        let c2 = Coincidences::prepare(&x, None, ord(3, 0), eps, Mode::Continuous);
        prop_assert_eq!(c1.map(|c| c.counts), c2.map(|c| c.counts));
    }

    #[test]
    fn grid_counts_are_exact(
        d in prop::sample::select(vec![1usize, 2, 3, 5]),
        n in 1usize..80,
        eps in 0.01f64..2.0,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // half the points on a lattice with spacing eps so exact-boundary distances occur
        let pts: Vec<f64> = (0..n * d)
            .map(|i| if i % 2 == 0 { rng.random_range(-4i32..4) as f64 * eps } else { rng.random_range(-3.0..3.0) })
            .collect();
        let grid = build_grid(&pts, d, eps).unwrap();
        for i in 0..n {
            let c = &pts[i * d..(i + 1) * d];
            prop_assert_eq!(count_within(&grid, c, eps).unwrap(), count_within_linear(&pts, d, c, eps));
        }
        let s = Sample::continuous(d, pts).unwrap();
        prop_assert_eq!(neighbor_counts(&s, None, eps).unwrap(), neighbor_counts_brute(&s, None, eps).unwrap());
    }

    #[test]
    fn k_n_floor((x, y) in pair(1), eps in 0.05f64..1.0, oi in 0usize..ORDERS.len()) {
        let o = ord(ORDERS[oi].0, ORDERS[oi].1);
        if let Ok(v) = variance_estimate(&x, Some(&y), o, eps, Mode::Continuous) {
            prop_assert!(v.kappa_hat >= 1.0 / v.n as f64);
            prop_assert!(v.kappa_hat >= v.raw_k);
        }
    }

    #[test]
    fn mse_decomposition(values in prop::collection::vec(-10.0f64..10.0, 1..200), truth in -5.0f64..5.0) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let mse = empirical_mse(&values, truth).unwrap();
        prop_assert!((mse - ((mean - truth).powi(2) + var)).abs() < 1e-12 * mse.max(1.0));
    }

    #[test]
    fn ks_p_decreases_with_distance(l1 in 0.0f64..3.0, dl in 0.0f64..1.0) {
        prop_assert!(kolmogorov_tail(l1 + dl) <= kolmogorov_tail(l1));
    }
}

#[test]
fn ks_p_monotone_for_shifted_samples() {
    let base: Vec<f64> = (1..=200)
        .map(|i| entrofunc::oracle::normal_quantile((i as f64 - 0.5) / 200.0).unwrap())
        .collect();
    let mut last = (0.0, 1.0);
    for k in 0..30 {
        let shifted: Vec<f64> = base.iter().map(|v| v + k as f64 * 0.02).collect();
        let r = ks_test(&shifted).unwrap();
        assert!(r.statistic >= last.0 && r.p_value <= last.1);
        last = (r.statistic, r.p_value);
    }
}

#[test]
fn entropy_decreases_in_q() {
    let mut last = f64::INFINITY;
    for k in 1..100 {
        let q = entrofunc::QEstimate { value: k as f64 * 0.01, order: ord(3, 0), epsilon: 0.0, normalized: false };
        let h = entropy_estimate(q, 1000).unwrap().h_hat;
        assert!(h < last);
        last = h;
    }
}

#[test]
fn self_exclusion_and_duplicates() {
    let x = Sample::from_scalars(&[0.0, 0.3, 0.9, 2.0]).unwrap();
    let base = neighbor_counts(&x, None, 0.5).unwrap();
    assert!(base.a.iter().all(|&a| a < x.len()));
    let dup = Sample::from_scalars(&[0.0, 0.3, 0.9, 2.0, 2.0]).unwrap();
    let c = neighbor_counts(&dup, None, 0.5).unwrap();
    assert_eq!(c.a[3], base.a[3] + 1);
    // symmetry of the X-vs-X relation
    for eps in [0.25, 0.6, 1.1] {
        let pts = Sample::from_scalars(&[0.0, 0.25, 0.5, 1.6, 1.7, 2.2]).unwrap();
        let n = pts.len();
        let adj: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i != j && (pts.real_point(i).unwrap()[0] - pts.real_point(j).unwrap()[0]).abs() <= eps).collect())
            .collect();
        let counts = neighbor_counts(&pts, None, eps).unwrap();
        for i in 0..n {
            assert_eq!(counts.a[i], adj[i].iter().filter(|&&b| b).count());
            for j in 0..n {
                assert_eq!(adj[i][j], adj[j][i]);
            }
        }
    }
}
