//! Independent ground truth: literal subset enumeration, closed-form and
//! quadrature values of the functionals, and normal distribution references.

mod brute;
mod catalog;
mod normal;
mod quadrature;

pub use brute::{brute_force_q, BruteForceQ, MAX_SUBSET_PAIRS};
pub use catalog::{closed_form_q, true_q, DistributionSpec};
pub use normal::{normal_cdf, normal_pdf, normal_quantile};
pub use quadrature::{
    coincidence_q, numeric_q, numeric_q_with, simpson, simpson_2d, DEFAULT_GRID_1D, DEFAULT_GRID_2D,
};
