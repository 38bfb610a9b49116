use serde::Serialize;

use crate::constants::{c_plus, k_threshold, lower_branch, small_m_lower, splitting_bounds};
use crate::error::{Error, Result};

pub const REFERENCE_K2: f64 = 8.4985;
pub const REFERENCE_K3: f64 = 6.5451;
pub const REFERENCE_CASE1_C: f64 = 5.4407;
pub const REFERENCE_TOL: f64 = 5e-4;

const GRID_POINTS: usize = 100_000;
const REFINE_POINTS: usize = 10_000;
const M_MAX: f64 = 50.0;

/// Supremum of a case expression and where it is attained.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CaseRecord {
    pub value: f64,
    pub argmax: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KConstantsReport {
    pub grid_points: usize,
    /// Case 1 (`2 < m <= k`, `sigma = 1`): lower constant `c`.
    pub case1_lower: CaseRecord,
    /// Case 1 upper constant.
    pub case1_upper: f64,
    /// Case 2 (`m >= k`): `d_- = (c_+^2 + sup f)/2`.
    pub case2_lower: CaseRecord,
    /// Case 2: `d_+ = (c_+ + 1)^2 / 2`.
    pub case2_upper: f64,
    pub k2: f64,
    pub k3: f64,
    /// `sup m^2 |lower bound|` over the grid, evaluated directly.
    pub direct_lower: CaseRecord,
    /// `sup m^2 upper bound` over the grid, evaluated directly.
    pub direct_upper: CaseRecord,
    /// Direct suprema do not exceed `K2`, `K3`.
    pub direct_ok: bool,
    pub reference_ok: bool,
}

fn grid() -> Vec<f64> {
    let k = k_threshold();
    let mut ms: Vec<f64> = (1..=GRID_POINTS)
        .map(|i| 2.0 + (M_MAX - 2.0) * i as f64 / GRID_POINTS as f64)
        .collect();
    ms.extend((0..=REFINE_POINTS).map(|i| k - 1e-3 + 2e-3 * i as f64 / REFINE_POINTS as f64));
    ms.push(k);
    ms.sort_by(f64::total_cmp);
    ms.dedup();
    ms
}

fn sup<F: Fn(f64) -> f64>(ms: &[f64], f: F) -> CaseRecord {
    ms.iter().fold(CaseRecord { value: f64::NEG_INFINITY, argmax: f64::NAN }, |acc, &m| {
        let v = f(m);
        if v > acc.value {
            CaseRecord { value: v, argmax: m }
        } else {
            acc
        }
    })
}

/// Recomputes the splitting constants from the two-case analysis on a
/// dense grid of `m` in `(2, 50]`.
pub fn rederive_k_constants() -> KConstantsReport {
    let ms = grid();
    let k = k_threshold();
    let small: Vec<f64> = ms.iter().copied().filter(|&m| m <= k).collect();
    let large: Vec<f64> = ms.iter().copied().filter(|&m| m >= k).collect();

    let case1_lower = sup(&small, small_m_lower);
    let case1_upper: f64 = 2.0;
    let branch = sup(&large, lower_branch);
    let case2_lower = CaseRecord {
        value: 0.5 * (c_plus().powi(2) + branch.value),
        argmax: branch.argmax,
    };
    let case2_upper = 0.5 * (c_plus() + 1.0).powi(2);
    let k2 = case1_lower.value.max(case2_lower.value);
    let k3 = case1_upper.max(case2_upper);

    let direct_lower = sup(&ms, |m| -m * m * splitting_bounds(m).0);
    let direct_upper = sup(&ms, |m| m * m * splitting_bounds(m).1);
    let direct_ok = direct_lower.value <= k2 && direct_upper.value <= k3;
    let reference_ok = (k2 - REFERENCE_K2).abs() < REFERENCE_TOL
        && (k3 - REFERENCE_K3).abs() < REFERENCE_TOL
        && (case1_lower.value - REFERENCE_CASE1_C).abs() < REFERENCE_TOL;
    KConstantsReport {
        grid_points: ms.len(),
        case1_lower,
        case1_upper,
        case2_lower,
        case2_upper,
        k2,
        k3,
        direct_lower,
        direct_upper,
        direct_ok,
        reference_ok,
    }
}

/// [`rederive_k_constants`] as a check against the reference values.
pub fn check_k_constants() -> Result<KConstantsReport> {
    let r = rederive_k_constants();
    let pairs = [
        ("K2", r.k2, REFERENCE_K2, r.case2_lower.argmax),
        ("K3", r.k3, REFERENCE_K3, f64::NAN),
        ("c", r.case1_lower.value, REFERENCE_CASE1_C, r.case1_lower.argmax),
    ];
    for (name, got, want, m) in pairs {
        if (got - want).abs() >= REFERENCE_TOL {
            return Err(Error::Numeric(format!("{name} = {got} differs from {want} (at m = {m})")));
        }
    }
    if !r.direct_ok {
        return Err(Error::Numeric(format!(
            "direct bound exceeds constants: m^2|lower| = {} at m = {}, m^2 upper = {} at m = {}",
            r.direct_lower.value, r.direct_lower.argmax, r.direct_upper.value, r.direct_upper.argmax
        )));
    }
    Ok(r)
}
