use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a simplex point: {0}")]
    NotASimplexPoint(String),

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("empty vector")]
    EmptyVector,

    #[error("bad quantile band [{lo}, {hi}]: need 0 <= lo <= hi <= 1")]
    BadBand { lo: String, hi: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("estimate {r} outside the treatment-effect range [{lo}, {hi}]")]
    ROutOfRange { r: i64, lo: i64, hi: i64 },

    #[error("cell ({x}, {y}) has mass {mass}, which is not a multiple of 1/{n}")]
    NotIntegral {
        x: usize,
        y: usize,
        mass: String,
        n: usize,
    },

    #[error("k must be at least 2 (got {k})")]
    BadK { k: usize },

    #[error("{group} group has no observations")]
    EmptyGroup { group: &'static str },

    #[error("outcome {outcome} outside 0..{k}")]
    OutcomeOutOfRange { outcome: i64, k: usize },

    #[error("beta must be positive (got {0})")]
    BadBeta(String),

    #[error("the two joints do not share the same marginals")]
    MarginalsDiffer,

    #[error("duplicate unit {unit}")]
    DuplicateUnit { unit: u64 },

    #[error("unit {unit} outside 1..={n}")]
    UnitOutOfRange { unit: u64, n: usize },

    #[error("population size {n} exceeds the supported maximum {max}")]
    PopulationTooLarge { n: usize, max: usize },

    #[error("scaled marginals exceed the 128-bit capacity range")]
    ScaleOverflow,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
