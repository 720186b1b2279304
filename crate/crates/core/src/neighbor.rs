//! Fixed-radius neighbor counting.
//!
//! Continuous samples are bucketed on a uniform grid whose cell side equals the
//! radius, so a closed ball touches only the adjacent cells on every axis.
//! Discrete samples are counted through hash multisets of exact coordinates.
//! Above [`GRID_MAX_DIM`] dimensions the 3^d cell sweep costs more than a
//! linear scan at practical sample sizes, and a double loop is used instead.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::functional::NeighborCounts;
use crate::sample::{Mode, Sample};

/// Largest dimension for which [`neighbor_counts`] uses the grid index.
pub const GRID_MAX_DIM: usize = 8;

// Relative widening of the query box so that rounding in the distance test
// can never accept a point that lives outside the scanned cells.
const QUERY_SLACK: f64 = 1e-12;

/// Squared Euclidean distance. Every ε-closeness decision in the crate goes
/// through [`within`], which compares this value against `eps * eps`.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Closed-ball membership test: `|a - b| <= eps`, decided on squared values.
#[inline]
pub fn within(a: &[f64], b: &[f64], eps: f64) -> bool {
    squared_distance(a, b) <= eps * eps
}

#[inline]
fn cell_of(x: f64, side: f64) -> i64 {
    (x / side).floor() as i64
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Uniform grid over a point set with cell side ε.
#[derive(Debug, Clone)]
pub struct GridIndex {
    dim: usize,
    cell_side: f64,
    // Coordinates regrouped so that every cell is a contiguous run.
    coords: Vec<f64>,
    cells: HashMap<Box<[i64]>, (usize, usize)>,
}

impl GridIndex {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Integer lattice cell holding `point`.
    pub fn cell_key(&self, point: &[f64]) -> Vec<i64> {
        point.iter().map(|&x| cell_of(x, self.cell_side)).collect()
    }

    /// Number of indexed points stored in the cell `key`.
    pub fn bucket_len(&self, key: &[i64]) -> usize {
        self.cells.get(key).map_or(0, |&(_, len)| len)
    }

    /// Whether an indexed point equal to `point` sits in the cell computed for it.
    pub fn contains(&self, point: &[f64]) -> bool {
        let key = self.cell_key(point);
        let d = self.dim;
        self.cells.get(key.as_slice()).is_some_and(|&(start, len)| {
            (start..start + len).any(|k| &self.coords[k * d..(k + 1) * d] == point)
        })
    }

    /// Counts indexed points in the closed ε-ball around `center`, with ε the cell side.
    pub fn count_within(&self, center: &[f64]) -> Result<usize> {
        if center.len() != self.dim {
            return invalid(format!(
                "query has dimension {} but index has dimension {}",
                center.len(),
                self.dim
            ));
        }
        Ok(self.count_unchecked(center))
    }

    fn count_unchecked(&self, center: &[f64]) -> usize {
        if self.cells.is_empty() {
            return 0;
        }
        let d = self.dim;
        let eps = self.cell_side;
        let reach = eps * (1.0 + QUERY_SLACK);
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for &c in center {
            lo.push(cell_of(next_down(c - reach), eps));
            hi.push(cell_of(next_up(c + reach), eps));
        }

        let mut key = lo.clone();
        let mut count = 0;
        loop {
            if let Some(&(start, len)) = self.cells.get(key.as_slice()) {
                count += self.coords[start * d..(start + len) * d]
                    .chunks_exact(d)
                    .filter(|p| within(p, center, eps))
                    .count();
            }
            // odometer over the box lo..=hi
            let mut axis = 0;
            loop {
                if axis == d {
                    return count;
                }
                if key[axis] < hi[axis] {
                    key[axis] += 1;
                    break;
                }
                key[axis] = lo[axis];
                axis += 1;
            }
        }
    }
}

/// Buckets `coords` (row-major, dimension `dim`) on a grid with cell side `epsilon`.
pub fn build_grid(coords: &[f64], dim: usize, epsilon: f64) -> Result<GridIndex> {
    if dim == 0 {
        return invalid("dimension must be at least 1");
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return invalid(format!("epsilon must be positive and finite, got {epsilon}"));
    }
    if coords.len() % dim != 0 {
        return invalid("coordinate count is not a multiple of the dimension");
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return invalid("non-finite coordinate");
    }

    let mut members: HashMap<Box<[i64]>, Vec<usize>> = HashMap::new();
    for (i, p) in coords.chunks_exact(dim).enumerate() {
        let key: Box<[i64]> = p.iter().map(|&x| cell_of(x, epsilon)).collect();
        members.entry(key).or_default().push(i);
    }

    let mut sorted = Vec::with_capacity(coords.len());
    let mut cells = HashMap::with_capacity(members.len());
    for (key, idx) in members {
        let start = sorted.len() / dim;
        for &i in &idx {
            sorted.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        cells.insert(key, (start, idx.len()));
    }

    Ok(GridIndex {
        dim,
        cell_side: epsilon,
        coords: sorted,
        cells,
    })
}

/// Counts points of `index` within `epsilon` of `center`. `epsilon` must equal the index cell side.
pub fn count_within(index: &GridIndex, center: &[f64], epsilon: f64) -> Result<usize> {
    if epsilon != index.cell_side {
        return invalid(format!(
            "query radius {epsilon} differs from index cell side {}",
            index.cell_side
        ));
    }
    index.count_within(center)
}

/// Linear-scan count of rows of `coords` within `epsilon` of `center`.
pub fn count_within_linear(coords: &[f64], dim: usize, center: &[f64], epsilon: f64) -> usize {
    coords
        .chunks_exact(dim)
        .filter(|p| within(p, center, epsilon))
        .count()
}

fn check_pair<'a>(x: &'a Sample, y: Option<&'a Sample>, mode: Mode) -> Result<()> {
    if x.mode() != mode {
        return invalid(format!("sample X is {} but {mode} mode was requested", x.mode()));
    }
    if let Some(y) = y {
        if y.mode() != mode {
            return invalid(format!("sample Y is {} but {mode} mode was requested", y.mode()));
        }
        if y.dim() != x.dim() {
            return invalid(format!(
                "dimension mismatch: X has d={}, Y has d={}",
                x.dim(),
                y.dim()
            ));
        }
    }
    Ok(())
}

/// ε-neighbor counts for continuous samples: `a_i` counts other X points and
/// `b_i` counts Y points in the closed ε-ball around `X_i`.
pub fn neighbor_counts(x: &Sample, y: Option<&Sample>, epsilon: f64) -> Result<NeighborCounts> {
    check_pair(x, y, Mode::Continuous)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return invalid(format!("epsilon must be positive and finite, got {epsilon}"));
    }
    let d = x.dim();
    let xs = x.real_coords().expect("continuous");
    let ys = y.map(|s| s.real_coords().expect("continuous"));

    let (a, b) = if d > GRID_MAX_DIM {
        brute_counts(xs, ys, d, epsilon)
    } else {
        let gx = build_grid(xs, d, epsilon)?;
        let gy = ys.map(|c| build_grid(c, d, epsilon)).transpose()?;
        xs.par_chunks_exact(d)
            .map(|p| {
                // the ball around X_i always contains X_i itself
                let a = gx.count_unchecked(p) - 1;
                let b = gy.as_ref().map_or(0, |g| g.count_unchecked(p));
                (a, b)
            })
            .unzip()
    };

    Ok(NeighborCounts {
        a,
        b,
        epsilon,
        n1: x.len(),
        n2: y.map_or(0, Sample::len),
    })
}

fn brute_counts(xs: &[f64], ys: Option<&[f64]>, d: usize, eps: f64) -> (Vec<usize>, Vec<usize>) {
    xs.par_chunks_exact(d)
        .enumerate()
        .map(|(i, p)| {
            let a = xs
                .chunks_exact(d)
                .enumerate()
                .filter(|&(j, q)| j != i && within(p, q, eps))
                .count();
            let b = ys.map_or(0, |c| count_within_linear(c, d, p, eps));
            (a, b)
        })
        .unzip()
}

/// O(n1·(n1+n2)) reference for [`neighbor_counts`], independent of the grid.
pub fn neighbor_counts_brute(x: &Sample, y: Option<&Sample>, epsilon: f64) -> Result<NeighborCounts> {
    check_pair(x, y, Mode::Continuous)?;
    let d = x.dim();
    let (a, b) = brute_counts(
        x.real_coords().expect("continuous"),
        y.map(|s| s.real_coords().expect("continuous")),
        d,
        epsilon,
    );
    Ok(NeighborCounts {
        a,
        b,
        epsilon,
        n1: x.len(),
        n2: y.map_or(0, Sample::len),
    })
}

/// Exact-coincidence counts for discrete samples: `a_i` is the multiplicity of
/// `X_i` in X minus one, `b_i` its multiplicity in Y.
pub fn exact_match_counts(x: &Sample, y: Option<&Sample>) -> Result<NeighborCounts> {
    check_pair(x, y, Mode::Discrete)?;
    let d = x.dim();
    let xs = x.lattice_coords().expect("discrete");

    let mut mult: HashMap<&[i64], (usize, usize)> = HashMap::with_capacity(x.len());
    for p in xs.chunks_exact(d) {
        mult.entry(p).or_default().0 += 1;
    }
    if let Some(ys) = y.and_then(Sample::lattice_coords) {
        for p in ys.chunks_exact(d) {
            if let Some(m) = mult.get_mut(p) {
                m.1 += 1;
            }
        }
    }

    let (a, b) = xs
        .chunks_exact(d)
        .map(|p| {
            let (mx, my) = mult[p];
            (mx - 1, my)
        })
        .unzip();
    Ok(NeighborCounts {
        a,
        b,
        epsilon: 0.0,
        n1: x.len(),
        n2: y.map_or(0, Sample::len),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn buckets_follow_floor() {
        let g = build_grid(&[0.0, 0.1, 5.0], 1, 0.2).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.cell_key(&[0.0]), vec![0]);
        assert_eq!(g.cell_key(&[0.1]), vec![0]);
        assert_eq!(g.cell_key(&[5.0]), vec![25]);
        assert_eq!(g.bucket_len(&[0]), 2);
        assert_eq!(g.bucket_len(&[25]), 1);
        assert_eq!(g.cell_count(), 2);
    }

    #[test]
    fn empty_index() {
        let g = build_grid(&[], 1, 1.0).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.count_within(&[0.0]).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_grid(&[0.0, f64::NAN], 1, 1.0).is_err());
        assert!(build_grid(&[0.0], 1, 0.0).is_err());
        assert!(build_grid(&[0.0], 1, -1.0).is_err());
        let g = build_grid(&[0.0, 1.0], 2, 1.0).unwrap();
        assert!(g.count_within(&[0.0]).is_err());
        assert!(count_within(&g, &[0.0, 0.0], 0.5).is_err());
    }

    #[test]
    fn small_counts() {
        let g = build_grid(&[0.0, 0.1, 5.0], 1, 0.2).unwrap();
        assert_eq!(count_within(&g, &[0.0], 0.2).unwrap(), 2);
        assert_eq!(count_within(&g, &[5.0], 0.2).unwrap(), 1);
    }

    #[test]
    fn every_point_findable_in_its_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let coords: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let g = build_grid(&coords, 2, 0.05).unwrap();
        for p in coords.chunks_exact(2) {
            assert!(g.contains(p));
        }
    }

    #[test]
    fn random_queries_match_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let coords: Vec<f64> = (0..400).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = build_grid(&coords, 2, 0.3).unwrap();
        for _ in 0..50 {
            let c = [rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)];
            assert_eq!(g.count_within(&c).unwrap(), count_within_linear(&coords, 2, &c, 0.3));
        }
    }

    #[test]
    fn boundary_ties_are_inclusive() {
        // 0.25 and 0.5 are exact binary fractions, so |0.5 - 0.25| == 0.25 exactly.
        let g = build_grid(&[0.25, 0.75], 1, 0.25).unwrap();
        assert_eq!(g.count_within(&[0.5]).unwrap(), 2);
    }

    #[test]
    fn pair_counts() {
        let x = Sample::from_scalars(&[0.0, 0.1, 5.0]).unwrap();
        let c = neighbor_counts(&x, None, 0.2).unwrap();
        assert_eq!(c.a, vec![1, 1, 0]);
        assert_eq!(c.b, vec![0, 0, 0]);

        let x = Sample::from_scalars(&[0.0]).unwrap();
        let y = Sample::from_scalars(&[0.1, 0.3]).unwrap();
        let c = neighbor_counts(&x, Some(&y), 0.2).unwrap();
        assert_eq!(c.a, vec![0]);
        assert_eq!(c.b, vec![1]);
    }

    #[test]
    fn mode_and_dimension_checks() {
        let x = Sample::from_ints(&[1, 2]).unwrap();
        assert!(neighbor_counts(&x, None, 0.1).is_err());
        let x = Sample::from_scalars(&[1.0]).unwrap();
        let y = Sample::continuous(2, vec![0.0, 0.0]).unwrap();
        assert!(neighbor_counts(&x, Some(&y), 0.1).is_err());
        assert!(exact_match_counts(&x, None).is_err());
    }

    #[test]
    fn exact_matches() {
        let x = Sample::from_ints(&[1, 1, 2]).unwrap();
        let y = Sample::from_ints(&[1, 2, 2]).unwrap();
        let c = exact_match_counts(&x, Some(&y)).unwrap();
        assert_eq!(c.a, vec![1, 1, 0]);
        assert_eq!(c.b, vec![1, 1, 2]);

        let x = Sample::from_ints(&[4, 5, 6, 7]).unwrap();
        let c = exact_match_counts(&x, None).unwrap();
        assert!(c.a.iter().all(|&a| a == 0));
    }

    #[test]
    fn high_dimension_uses_linear_fallback() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = 10;
        let xs: Vec<f64> = (0..60 * d).map(|_| rng.random_range(0.0..1.0)).collect();
        let x = Sample::continuous(d, xs).unwrap();
        let fast = neighbor_counts(&x, Some(&x), 1.0).unwrap();
        let slow = neighbor_counts_brute(&x, Some(&x), 1.0).unwrap();
        assert_eq!(fast, slow);
        assert!(fast.a.iter().any(|&a| a > 0));
    }
}
