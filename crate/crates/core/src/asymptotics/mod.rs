//! Large-coupling asymptotics: theorem constants, the lower bound on
//! `|f - mu|` at a working height, certificates comparing the predicted
//! `log|lambda| + I[E/lambda - f](0)` with measured exponents, stratified
//! versions on intervals of `mu` free of critical values, zero-set geometry,
//! and the numerical splitting constants.

mod geometry;
mod kconstants;
mod stratified;
mod large_coupling;

pub use geometry::*;
pub use kconstants::*;
pub use stratified::*;
pub use large_coupling::*;

use serde::Serialize;

/// Outcome of a verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Estimator precision too coarse to decide.
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    /// Worst of two outcomes (fail > inconclusive > pass).
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

/// Lyapunov estimator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorParams {
    /// Iterates `n` (the estimator also runs `2n`).
    pub n: usize,
    /// Phase-grid size `M`.
    pub m: usize,
    /// Difference step for accelerations.
    pub t: f64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self { n: 10_000, m: 256, t: 1e-2 }
    }
}

/// One named inequality with its two sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub ok: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, ok: value <= limit }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, ok: value >= limit }
    }
}
