//! Exact computation of how well the median treatment effect can be
//! approximated from marginal outcome information.
//!
//! The observed side of an experiment determines only the marginal outcome
//! distributions of the two arms, never their coupling, so the median of the
//! per-unit effect vector is not identifiable. What is computable, exactly,
//! is the range of ranks each candidate effect can occupy across all
//! couplings consistent with the marginals. This crate provides:
//!
//! - [`core`]: exact rationals, outcome spaces, distributions, quantiles;
//! - [`variability`]: greedy solvers for the rank range of a candidate
//!   effect and the minimum median width over all candidates;
//! - [`oracle`]: an independent max-flow solver for the same optima, used
//!   as ground truth for the greedy path;
//! - [`estimator`]: the median estimator over Bernoulli-design responses;
//! - [`sim`]: seeded samplers, hard instances, and experiment harnesses;
//! - [`cli`]: the `mte` command-line front end.

pub mod cli;
pub mod core;
pub mod error;
pub mod estimator;
pub mod oracle;
pub mod sim;
pub mod variability;

pub use error::{Error, Result};
