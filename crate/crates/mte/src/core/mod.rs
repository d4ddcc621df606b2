//! Exact arithmetic, outcome spaces, distributions, and quantile machinery.

mod dist;
mod outcome;
mod quantile;
mod rational;

pub use dist::{Joint, Marginal};
pub use outcome::{OutcomeSpace, OutcomeVectorPair, MAX_K, MAX_POPULATION};
pub use quantile::{in_quantile_band, q_lower_joint, q_lower_vec, q_upper_joint, q_upper_vec};
pub use rational::Rational;
