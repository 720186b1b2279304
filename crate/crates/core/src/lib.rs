//! Estimation of Rényi entropy functionals `q_(r1,r2) = ∫ p_X^r1 p_Y^r2` with
//! ε-coincidence U-statistics, together with the entropy, variability and
//! Bregman estimators built on them, asymptotic inference, reference oracles
//! and a Monte Carlo harness.

pub mod cli;
pub mod error;
pub mod functional;
pub mod inference;
pub mod neighbor;
pub mod oracle;
pub mod sample;
pub mod simulation;

pub use error::{Error, Result};
pub use functional::{estimate_q, estimate_q_discrete, FunctionalOrder, QEstimate};
pub use sample::{Mode, Sample};
