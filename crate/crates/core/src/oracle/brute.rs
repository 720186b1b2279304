//! Literal subset-enumeration U-statistic.
//!
//! Shares nothing with the closed-form path except the ε-closeness predicate.

use crate::error::{Error, Result};
use crate::functional::FunctionalOrder;
use crate::neighbor::within;
use crate::sample::{Mode, Sample};

/// Maximum number of `(S, T)` subset pairs [`brute_force_q`] will visit.
pub const MAX_SUBSET_PAIRS: u128 = 1_000_000;

/// Exact value of the subset-enumeration U-statistic as a ratio of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceQ {
    /// `Σ_{S,T} Σ_{i∈S} ψ^(i)(S;T)`
    pub hits: u128,
    /// `r1 · C(n1,r1) · C(n2,r2)`
    pub denominator: u128,
}

impl BruteForceQ {
    pub fn value(&self) -> f64 {
        self.hits as f64 / self.denominator as f64
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for j in 0..k {
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    c
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                break;
            }
            if pos == 0 {
                return;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

enum Points<'a> {
    Real(&'a [f64]),
    Lattice(&'a [i64]),
}

fn points(s: &Sample) -> Points<'_> {
    match s.mode() {
        Mode::Continuous => Points::Real(s.real_coords().unwrap()),
        Mode::Discrete => Points::Lattice(s.lattice_coords().unwrap()),
    }
}

fn close(a: &Points, i: usize, b: &Points, j: usize, d: usize, eps: f64) -> bool {
    match (a, b) {
        (Points::Real(a), Points::Real(b)) => within(&a[i * d..(i + 1) * d], &b[j * d..(j + 1) * d], eps),
        (Points::Lattice(a), Points::Lattice(b)) => a[i * d..(i + 1) * d] == b[j * d..(j + 1) * d],
        _ => false,
    }
}

/// Evaluates the U-statistic by iterating over all `S ∈ S(n1,r1)`, `T ∈ S(n2,r2)`
/// and averaging the symmetrized kernel. Discrete samples use exact equality
/// and ignore `epsilon`. An order with `r1 = 0` is evaluated on the exchanged pair.
pub fn brute_force_q(
    x: &Sample,
    y: Option<&Sample>,
    order: FunctionalOrder,
    epsilon: f64,
) -> Result<BruteForceQ> {
    let (order, x, y) = if order.r1 == 0 {
        let y = y.ok_or_else(|| Error::InsufficientSample("order needs sample Y".into()))?;
        (order.swapped(), y, Some(x))
    } else {
        (order, x, y)
    };
    let (r1, r2) = (order.r1 as usize, order.r2 as usize);
    let n1 = x.len();
    let n2 = if r2 == 0 { 0 } else { y.map_or(0, Sample::len) };
    if n1 < r1 || n2 < r2 {
        return Err(Error::InsufficientSample(format!(
            "order {order} with n1={n1}, n2={n2}"
        )));
    }
    let pairs = binomial(n1, r1) * binomial(n2, r2);
    if pairs > MAX_SUBSET_PAIRS {
        return Err(Error::CombinatorialExplosion(pairs, MAX_SUBSET_PAIRS));
    }

    let d = x.dim();
    let px = points(x);
    let py = y.map(points);
    let mut hits: u128 = 0;
    for_each_subset(n1, r1, |s| {
        for_each_subset(n2, r2, |t| {
            for &i in s {
                let xs_close = s.iter().all(|&j| close(&px, i, &px, j, d, epsilon));
                let ys_close = t
                    .iter()
                    .all(|&k| close(&px, i, py.as_ref().unwrap(), k, d, epsilon));
                if xs_close && ys_close {
                    hits += 1;
                }
            }
        });
    });

    Ok(BruteForceQ {
        hits,
        denominator: r1 as u128 * pairs,
    })
}
