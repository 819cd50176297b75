//! Distributionally robust weighted k-nearest-neighbor classification.
//!
//! Training reweights every sample with the per-class least favorable
//! distributions (LFDs) inside Wasserstein balls around the empirical class
//! distributions; queries are then classified by LFD-weighted k-NN votes.
//!
//! The crate is organized as
//!
//! - [`domain`]: samples, ground costs, empirical distributions, risk.
//! - [`lfd`]: the least-favorable-distribution and Lipschitz linear programs.
//! - [`classifiers`]: Dr.k-NN, vanilla and inverse-distance k-NN, kernel
//!   smoothing and entropy truncation.
//! - [`embedding`]: PCA/SVD projections used by the baselines.
//! - [`eval`]: few-shot episodes, accuracy, radius cross-validation, sweeps.
//! - [`verify`]: brute-force oracles for tiny instances.
//! - [`data`], [`report`], [`cli`]: file formats and the `drknn` binary.

pub mod classifiers;
pub mod cli;
pub mod data;
pub mod domain;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod lfd;
mod lp;
pub mod report;
pub mod verify;

pub use domain::{
    empirical_distributions, euclidean_cost, minimal_risk, risk, ClassifierAssignment, CostMatrix, Dataset,
    EmpiricalDistribution, LabeledSample,
};
pub use error::{Error, Result};
pub use lfd::{solve_lfd, solve_lipschitz, LfdSolution, RadiusVector};
