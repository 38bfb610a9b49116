//! The functional `I[f](y) = \int_T log|f(x+iy)| dx` and its acceleration
//! `omega[f](y) = (1/2pi) D_+ I[f](y)`.
//!
//! For `f - mu = w^{-d} P(w)`, `P(w) = a w^s prod_j (w - w_j)`, averaging
//! `log|.|` over the circle `|w| = e^{-2 pi y}` gives the closed form
//!
//! ```text
//! I(y) = log|a| + 2 pi y (d - s) - 2 pi sum_j min(y, Im z_j)
//! ```
//!
//! since `log max(e^{-2 pi y}, |w_j|) = -2 pi min(y, Im z_j)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::potential::FourierPotential;
use crate::zeros::{laurent_roots, winding_number, HeightInterval, ZeroFreePart, ZeroSet};

const TWO_PI: f64 = 2.0 * PI;

/// Default number of quadrature nodes.
pub const DEFAULT_QUADRATURE_POINTS: usize = 512;
/// Minimum distance between the quadrature height and any zero height.
pub const QUADRATURE_MARGIN: f64 = 1e-3;
/// Step of the finite-difference acceleration diagnostic.
pub const FD_STEP: f64 = 1e-4;
/// Heights closer than this to a zero height are treated as zero heights.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// `I[f - mu](y)` from the zeros (closed form).
pub fn jensen_integral(p: &FourierPotential, mu: Complex64, y: f64) -> Result<f64> {
    conventions_checked()?;
    let zs = laurent_roots(p, mu)?;
    Ok(jensen_from_zeros(&zs, y))
}

/// Closed-form `I(y)` for an already computed zero set. Valid for any real `y`.
pub fn jensen_from_zeros(zs: &ZeroSet, y: f64) -> f64 {
    let d = zs.potential_degree as f64;
    let s = zs.zero_root_order as f64;
    let crossing: f64 = zs
        .all_zeros()
        .map(|z| z.multiplicity as f64 * y.min(z.height()))
        .sum();
    zs.leading.norm().ln() + TWO_PI * y * (d - s) - TWO_PI * crossing
}

/// Right derivative `omega(y)` doubled, from the closed form: every root
/// strictly above `y` still pulls the slope down.
pub fn two_omega_from_zeros(zs: &ZeroSet, y: f64) -> i64 {
    let d = zs.potential_degree as i64;
    let s = zs.zero_root_order as i64;
    let above: i64 = zs
        .all_zeros()
        .filter(|z| z.height() > y)
        .map(|z| z.multiplicity as i64)
        .sum();
    2 * (d - s - above)
}

/// Checks the closed form against the trapezoid rule on three fixed cases.
/// Runs once per process; every later call returns the cached verdict.
pub fn conventions_checked() -> Result<()> {
    static CHECK: OnceLock<std::result::Result<(), String>> = OnceLock::new();
    CHECK
        .get_or_init(|| {
            let amo = FourierPotential::amo();
            let skew = FourierPotential::from_triples(
                &[(-2, 0.3, -0.1), (0, 0.2, 0.0), (1, 1.0, 0.5)],
                0.5,
            )
            .expect("fixed case");
            let cases = [
                (amo.clone(), Complex64::new(0.0, 0.0), 0.1),
                (amo, Complex64::new(3.0, 0.0), -0.05),
                (skew, Complex64::new(0.1, 0.2), 0.37),
            ];
            for (p, mu, y) in cases {
                let zs = laurent_roots(&p, mu).map_err(|e| e.to_string())?;
                let closed = jensen_from_zeros(&zs, y);
                let quad = trapezoid_log_modulus(&p, mu, y, 2048);
                if (closed - quad).abs() > 1e-9 {
                    return Err(format!(
                        "Jensen closed form {closed} disagrees with quadrature {quad} at y = {y}"
                    ));
                }
            }
            Ok(())
        })
        .clone()
        .map_err(Error::Numeric)
}

fn trapezoid_log_modulus(p: &FourierPotential, mu: Complex64, y: f64, m: usize) -> f64 {
    let vals: Vec<f64> = (0..m)
        .map(|j| (p.eval_unchecked(Complex64::new(j as f64 / m as f64, y)) - mu).norm().ln())
        .collect();
    par::pairwise_sum(&vals) / m as f64
}

/// Margin a quadrature height must keep from every zero height with `m`
/// nodes: the trapezoid error decays like `e^{-2 pi m dist}`, so the margin
/// is `max(1e-3, 3/m)`.
pub fn quadrature_margin(m: usize) -> f64 {
    QUADRATURE_MARGIN.max(3.0 / m as f64)
}

/// `I[f - mu](y)` by the `m`-point periodic trapezoid rule.
pub fn jensen_integral_quadrature(p: &FourierPotential, mu: Complex64, y: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Contract("quadrature needs at least one node".into()));
    }
    if y.abs() > p.strip_height() {
        return Err(Error::Domain(format!("height {y} outside the strip")));
    }
    let zs = laurent_roots(p, mu)?;
    let margin = quadrature_margin(m);
    if let Some(z) = zs.all_zeros().find(|z| (z.height() - y).abs() < margin) {
        return Err(Error::Contract(format!(
            "height {y} is within {margin} of a zero at {}; use the closed form",
            z.z
        )));
    }
    Ok(trapezoid_log_modulus(p, mu, y, m))
}

/// The acceleration `omega[f - mu](y)` with its cross-checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccelerationValue {
    pub y: f64,
    /// `2 omega` (omega is a half-integer).
    pub two_omega: i64,
    /// `y` lies on a zero height; the right-limit value is returned.
    pub boundary: bool,
    /// `2 omega` from `-ind_{g(.+i0)}(0) - N_{(y,h]}`.
    pub two_omega_winding: i64,
    /// Finite-difference estimate `(I(y+t) - I(y)) / (2 pi t)`.
    pub fd_estimate: f64,
    /// The step `[y, y+t]` crosses no zero height, so the estimate must match.
    pub fd_applicable: bool,
}

impl AccelerationValue {
    pub fn omega(&self) -> f64 {
        self.two_omega as f64 / 2.0
    }

    pub fn fd_ok(&self) -> bool {
        !self.fd_applicable || (self.fd_estimate - self.omega()).abs() < 1e-6
    }
}

/// `2 (-ind_{g(.+i0)}(0) - N_{(y,h]}(f - mu))`, with `g` the zero-free part of
/// `f - mu` on the strip and the index computed by sampling.
pub fn two_omega_by_winding(p: &FourierPotential, zs: &ZeroSet, y: f64) -> Result<i64> {
    let h = p.strip_height();
    let g = ZeroFreePart::build(p, zs, |z| z.height().abs() <= h, false, h)?;
    let ind = winding_number(|x| g.eval_unchecked(Complex64::new(x, 0.0)))?;
    let above = zs.count(HeightInterval::left_open(y, h)) as i64;
    Ok(2 * (-ind.index - above))
}

/// `omega[f - mu](y)`: for real-analytic `f` and real `mu`, half the number
/// of zeros with height in `(-y, y]` (right limit on zero heights, so the
/// count at `y = 0` is the number of real zeros); for general `f` the
/// winding form. Both are always computed and returned.
pub fn acceleration_functional(p: &FourierPotential, mu: Complex64, y: f64) -> Result<AccelerationValue> {
    let h = p.strip_height();
    let real = p.is_real_analytic() && mu.im == 0.0;
    if real && !(0.0..=h).contains(&y) {
        return Err(Error::Domain(format!("need 0 <= y <= h = {h}, got {y}")));
    }
    if y.abs() > h {
        return Err(Error::Domain(format!("|y| = {} exceeds h = {h}", y.abs())));
    }
    conventions_checked()?;
    let zs = laurent_roots(p, mu)?;
    let heights: Vec<f64> = zs.all_zeros().map(|z| z.height()).collect();
    let boundary = heights.iter().any(|&t| (t - y).abs() <= BOUNDARY_TOL || (real && (t + y).abs() <= BOUNDARY_TOL));

    let two_omega_winding = two_omega_by_winding(p, &zs, y)?;
    let two_omega = if real {
        let interval = if boundary || y == 0.0 {
            HeightInterval::closed(-y - BOUNDARY_TOL, y + BOUNDARY_TOL)
        } else {
            HeightInterval::left_open(-y, y)
        };
        zs.count(interval) as i64
    } else {
        two_omega_winding
    };

    let t = FD_STEP;
    let fd_estimate = (jensen_from_zeros(&zs, y + t) - jensen_from_zeros(&zs, y)) / (TWO_PI * t);
    let fd_applicable = !boundary && !heights.iter().any(|&s| s > y && s <= y + t);
    Ok(AccelerationValue {
        y,
        two_omega,
        boundary,
        two_omega_winding,
        fd_estimate,
        fd_applicable,
    })
}

/// One height of [`verify_prop31`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop31Row {
    pub y: f64,
    pub fd_estimate: f64,
    pub two_omega_zero_count: i64,
    pub two_omega_winding: i64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop31Report {
    pub rows: Vec<Prop31Row>,
    /// Failures, each naming the height and the values involved.
    pub failures: Vec<String>,
}

impl Prop31Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, at each height, that the finite-difference slope, the winding
/// form and the zero-count form of the acceleration agree, and that the
/// acceleration is constant on every zero-free band between grid heights.
pub fn verify_prop31(p: &FourierPotential, mu: f64, heights: &[f64]) -> Result<Prop31Report> {
    if !p.is_real_analytic() {
        return Err(Error::Contract("the zero-count form needs a real-analytic potential".into()));
    }
    let zs = laurent_roots(p, Complex64::new(mu, 0.0))?;
    for &y in heights {
        if let Some(z) = zs.all_zeros().find(|z| (z.height().abs() - y).abs() < QUADRATURE_MARGIN) {
            return Err(Error::Contract(format!(
                "height {y} is within {QUADRATURE_MARGIN} of the zero at {}",
                z.z
            )));
        }
    }
    let values = par::try_map(heights, |&y| acceleration_functional(p, Complex64::new(mu, 0.0), y))?;
    let mut rows = Vec::with_capacity(values.len());
    let mut failures = Vec::new();
    for v in &values {
        let fd_match = (v.fd_estimate - v.omega()).abs() < 1e-6;
        let agree = fd_match && v.two_omega == v.two_omega_winding;
        if !agree {
            failures.push(format!(
                "y = {}: finite difference {}, zero count {}, winding {}",
                v.y,
                v.fd_estimate,
                v.omega(),
                v.two_omega_winding as f64 / 2.0
            ));
        }
        rows.push(Prop31Row {
            y: v.y,
            fd_estimate: v.fd_estimate,
            two_omega_zero_count: v.two_omega,
            two_omega_winding: v.two_omega_winding,
            agree,
        });
    }
    // Constancy across zero-free bands.
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].y.partial_cmp(&rows[b].y).unwrap());
    for pair in order.windows(2) {
        let (a, b) = (&rows[pair[0]], &rows[pair[1]]);
        let zero_between = zs
            .all_zeros()
            .any(|z| z.height().abs() > a.y && z.height().abs() <= b.y);
        if !zero_between && a.two_omega_zero_count != b.two_omega_zero_count {
            failures.push(format!(
                "acceleration changes on the zero-free band [{}, {}]: {} vs {}",
                a.y,
                b.y,
                a.two_omega_zero_count as f64 / 2.0,
                b.two_omega_zero_count as f64 / 2.0
            ));
        }
    }
    Ok(Prop31Report { rows, failures })
}

/// How a profile value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JensenMethod {
    Roots,
    Quadrature,
}

impl JensenMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            JensenMethod::Roots => "roots",
            JensenMethod::Quadrature => "quadrature",
        }
    }
}

/// `I` and `omega` sampled on a grid of heights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JensenProfile {
    pub heights: Vec<f64>,
    pub values: Vec<f64>,
    pub two_omega: Vec<i64>,
    pub methods: Vec<JensenMethod>,
}

impl JensenProfile {
    /// Minimum second divided difference scaled to unit spacing (should be >= -1e-9).
    pub fn min_convexity_defect(&self) -> f64 {
        let (y, v) = (&self.heights, &self.values);
        (1..y.len().saturating_sub(1))
            .map(|i| {
                let s1 = (v[i] - v[i - 1]) / (y[i] - y[i - 1]);
                let s2 = (v[i + 1] - v[i]) / (y[i + 1] - y[i]);
                s2 - s1
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn omega_nondecreasing(&self) -> bool {
        self.two_omega.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Profile of `I[f - mu]` and `omega` over sorted `heights` within the strip.
/// With `quadrature` set, heights that respect the quadrature margin use the
/// trapezoid rule; all others (and the default) use the closed form.
pub fn jensen_profile(p: &FourierPotential, mu: Complex64, heights: &[f64], quadrature: bool) -> Result<JensenProfile> {
    let h = p.strip_height();
    if heights.iter().any(|y| y.abs() > h) {
        return Err(Error::Domain(format!("profile heights must lie in [-{h}, {h}]")));
    }
    conventions_checked()?;
    let mut ys = heights.to_vec();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let zs = laurent_roots(p, mu)?;
    let margin = quadrature_margin(DEFAULT_QUADRATURE_POINTS);
    let rows = par::map(&ys, |&y| {
        let near = zs.all_zeros().any(|z| (z.height() - y).abs() < margin);
        let (value, method) = if quadrature && !near {
            (trapezoid_log_modulus(p, mu, y, DEFAULT_QUADRATURE_POINTS), JensenMethod::Quadrature)
        } else {
            (jensen_from_zeros(&zs, y), JensenMethod::Roots)
        };
        (value, two_omega_from_zeros(&zs, y), method)
    });
    Ok(JensenProfile {
        heights: ys,
        values: rows.iter().map(|r| r.0).collect(),
        two_omega: rows.iter().map(|r| r.1).collect(),
        methods: rows.iter().map(|r| r.2).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn conventions_hold() {
        conventions_checked().unwrap();
    }

    #[test]
    fn constant_integral() {
        let f = FourierPotential::constant(-2.5, 0.5).unwrap();
        assert!((jensen_integral(&f, c(0.0), 0.3).unwrap() - 2.5f64.ln()).abs() < 1e-15);
        assert!((jensen_integral_quadrature(&f, c(0.0), 0.3, 1).unwrap() - 2.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn amo_integral_is_two_pi_abs_y() {
        let f = FourierPotential::amo();
        for &y in &[-0.3, -0.1, 0.0, 0.1, 0.45] {
            let v = jensen_integral(&f, c(0.0), y).unwrap();
            assert!((v - TWO_PI * y.abs()).abs() < 1e-13, "y = {y}");
        }
        let q = jensen_integral_quadrature(&f, c(0.0), 0.1, 512).unwrap();
        assert!((q - 0.2 * PI).abs() < 1e-10);
    }

    #[test]
    fn amo_integral_off_range() {
        let f = FourierPotential::amo();
        let want = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((jensen_integral(&f, c(3.0), 0.0).unwrap() - want).abs() < 1e-13);
        assert!((want - 0.96242).abs() < 1e-5);
    }

    #[test]
    fn quadrature_spectral_convergence_and_refusal() {
        let f = FourierPotential::bichromatic();
        let a = jensen_integral_quadrature(&f, c(0.3), 0.21, 256).unwrap();
        let b = jensen_integral_quadrature(&f, c(0.3), 0.21, 512).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(jensen_integral_quadrature(&FourierPotential::amo(), c(0.0), 0.0, 512).is_err());
    }

    #[test]
    fn acceleration_examples() {
        let f = FourierPotential::amo();
        let a = acceleration_functional(&f, c(0.0), 0.1).unwrap();
        assert_eq!(a.two_omega, 2);
        assert_eq!(a.two_omega_winding, 2);
        assert!(a.fd_ok());
        let b = acceleration_functional(&f, c(3.0), 0.1).unwrap();
        assert_eq!(b.two_omega, 0);
        assert_eq!(b.two_omega_winding, 0);
        let k = FourierPotential::constant(2.0, 0.5).unwrap();
        assert_eq!(acceleration_functional(&k, c(0.0), 0.2).unwrap().two_omega, 0);
    }

    #[test]
    fn acceleration_at_zero_height_is_right_limit() {
        let f = FourierPotential::amo();
        // Real zeros at y = 0: right limit counts both.
        let a = acceleration_functional(&f, c(0.0), 0.0).unwrap();
        assert_eq!(a.two_omega, 2);
        assert!(a.boundary);
        assert_eq!(a.two_omega_winding, 2);
        // Conjugate pair at +-y0.
        let y0 = ((3.0 + 5f64.sqrt()) / 2.0).ln() / TWO_PI;
        let b = acceleration_functional(&f, c(3.0), y0).unwrap();
        assert!(b.boundary);
        assert_eq!(b.two_omega, 2);
        assert_eq!(b.two_omega_winding, 2);
    }

    #[test]
    fn prop31_examples() {
        let f = FourierPotential::amo();
        let r = verify_prop31(&f, 0.0, &[0.05, 0.1, 0.15]).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.rows.iter().all(|row| row.two_omega_zero_count == 2));
        let r = verify_prop31(&f, 3.0, &[0.05, 0.1, 0.2]).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let two: Vec<i64> = r.rows.iter().map(|row| row.two_omega_zero_count).collect();
        assert_eq!(two, vec![0, 0, 2]);
        let one = FourierPotential::constant(1.0, 0.5).unwrap();
        let r = verify_prop31(&one, 0.0, &[0.1, 0.3]).unwrap();
        assert!(r.rows.iter().all(|row| row.two_omega_zero_count == 0));
    }

    #[test]
    fn prop31_rejects_heights_on_zeros() {
        let f = FourierPotential::amo();
        assert!(verify_prop31(&f, 0.0, &[0.0]).is_err());
    }

    #[test]
    fn profile_is_convex_and_even() {
        let f = FourierPotential::bichromatic();
        let ys: Vec<f64> = (0..21).map(|i| -0.45 + 0.045 * i as f64).collect();
        let prof = jensen_profile(&f, c(0.7), &ys, false).unwrap();
        assert!(prof.min_convexity_defect() >= -1e-9);
        assert!(prof.omega_nondecreasing());
        for i in 0..ys.len() {
            let j = ys.len() - 1 - i;
            assert!((prof.values[i] - prof.values[j]).abs() < 1e-10);
        }
    }
}
