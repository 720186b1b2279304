//! Observation samples in either continuous (real) or discrete (integer lattice) mode.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Continuous,
    Discrete,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Continuous => f.write_str("continuous"),
            Mode::Discrete => f.write_str("discrete"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "continuous" => Ok(Mode::Continuous),
            "discrete" => Ok(Mode::Discrete),
            other => invalid(format!("unknown mode {other:?} (expected continuous|discrete)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Points {
    Real(Vec<f64>),
    Lattice(Vec<i64>),
}

/// An ordered set of `d`-dimensional observations stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    dim: usize,
    points: Points,
}

impl Sample {
    /// Builds a continuous sample from row-major coordinates. Every coordinate must be finite.
    pub fn continuous(dim: usize, coords: Vec<f64>) -> Result<Self> {
        check_shape(dim, coords.len())?;
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return invalid(format!(
                "non-finite coordinate in observation {}",
                pos / dim
            ));
        }
        Ok(Self {
            dim,
            points: Points::Real(coords),
        })
    }

    /// Builds a discrete sample from row-major integer coordinates.
    pub fn discrete(dim: usize, coords: Vec<i64>) -> Result<Self> {
        check_shape(dim, coords.len())?;
        Ok(Self {
            dim,
            points: Points::Lattice(coords),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(1, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("rows have differing dimensions");
        }
        Self::continuous(dim, rows.concat())
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.first().map_or(1, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("rows have differing dimensions");
        }
        Self::discrete(dim, rows.concat())
    }

    /// One-dimensional continuous sample.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::continuous(1, values.to_vec())
    }

    /// One-dimensional discrete sample.
    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::discrete(1, values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        match &self.points {
            Points::Real(c) => c.len() / self.dim,
            Points::Lattice(c) => c.len() / self.dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> Mode {
        match self.points {
            Points::Real(_) => Mode::Continuous,
            Points::Lattice(_) => Mode::Discrete,
        }
    }

    /// Row-major real coordinates, or `None` for a discrete sample.
    pub fn real_coords(&self) -> Option<&[f64]> {
        match &self.points {
            Points::Real(c) => Some(c),
            Points::Lattice(_) => None,
        }
    }

    /// Row-major integer coordinates, or `None` for a continuous sample.
    pub fn lattice_coords(&self) -> Option<&[i64]> {
        match &self.points {
            Points::Lattice(c) => Some(c),
            Points::Real(_) => None,
        }
    }

    pub fn real_point(&self, i: usize) -> Option<&[f64]> {
        self.real_coords().map(|c| &c[i * self.dim..(i + 1) * self.dim])
    }

    pub fn lattice_point(&self, i: usize) -> Option<&[i64]> {
        self.lattice_coords()
            .map(|c| &c[i * self.dim..(i + 1) * self.dim])
    }

    /// Returns the sample with every coordinate multiplied by `factor` (continuous only).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match &self.points {
            Points::Real(c) => Self::continuous(self.dim, c.iter().map(|x| x * factor).collect()),
            Points::Lattice(_) => invalid("cannot scale a discrete sample"),
        }
    }

    /// Returns a copy with observations reordered by `perm` (`perm[k]` is the source row of row `k`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let d = self.dim;
        let points = match &self.points {
            Points::Real(c) => Points::Real(perm.iter().flat_map(|&i| c[i * d..(i + 1) * d].iter().copied()).collect()),
            Points::Lattice(c) => {
                Points::Lattice(perm.iter().flat_map(|&i| c[i * d..(i + 1) * d].iter().copied()).collect())
            }
        };
        Self { dim: d, points }
    }
}

fn check_shape(dim: usize, len: usize) -> Result<()> {
    if dim == 0 {
        return invalid("dimension must be at least 1");
    }
    if len % dim != 0 {
        return invalid(format!(
            "coordinate count {len} is not a multiple of dimension {dim}"
        ));
    }
    Ok(())
}
