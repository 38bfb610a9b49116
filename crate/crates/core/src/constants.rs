//! Absolute constants in closed form.

use std::f64::consts::{LN_2, PI};

/// `e^{-2 pi} / (2 e^{2 pi} + 2)`.
pub fn k1() -> f64 {
    (-2.0 * PI).exp() / (2.0 * (2.0 * PI).exp() + 2.0)
}

/// Threshold `(3 + sqrt 5)/2` separating the two regimes of `sigma(g)`.
pub fn k_threshold() -> f64 {
    (3.0 + 5f64.sqrt()) / 2.0
}

/// `(sqrt 5 + 1)/(sqrt 5 - 1)`; equal to [`k_threshold`].
pub fn c_plus() -> f64 {
    (5f64.sqrt() + 1.0) / (5f64.sqrt() - 1.0)
}

/// The decreasing rational function bounding the lower estimate for `m >= k`.
pub fn lower_branch(m: f64) -> f64 {
    let a = 2.0 * c_plus() - 1.0;
    let m2 = m * m;
    let m4 = m2 * m2;
    (a * m4 - m2) / (m4 - a * m2 + 1.0)
}

/// `d_- = (c_+^2 + f(k)) / 2`.
pub fn k2() -> f64 {
    0.5 * (c_plus().powi(2) + lower_branch(k_threshold()))
}

/// `d_+ = (c_+ + 1)^2 / 2`.
pub fn k3() -> f64 {
    0.5 * (c_plus() + 1.0).powi(2)
}

/// Integrand of the small-`m` lower constant; increasing in `m`.
pub fn small_m_lower(m: f64) -> f64 {
    let m2 = m * m;
    2.0 * (m - 1.0) * m2 / (2.0 * (m2 - 2.0 * (m - 1.0))) + 0.5 * LN_2 * m2
}

/// The small-`m` lower constant, attained at `m = k`.
pub fn case1_c() -> f64 {
    small_m_lower(k_threshold())
}

/// `sigma(g) = min(1, (m - 1)/(m (m - 2)))` for `m > 2`.
pub fn sigma(m: f64) -> f64 {
    (1.0f64).min((m - 1.0) / (m * (m - 2.0)))
}

/// Bounds on `L(alpha, D)` for `D = (1, g^{-1}; g^{-1}, 0)` with `inf |g| = m > 2`.
pub fn splitting_bounds(m: f64) -> (f64, f64) {
    let s = sigma(m);
    let lower = 0.5 * ((((1.0 - s / m).powi(2)) + 1.0 / (m * m)) / (1.0 + s * s)).ln();
    let upper = 0.5 * ((1.0 + s / m).powi(2) + 1.0 / (m * m)).ln();
    (lower, upper)
}
