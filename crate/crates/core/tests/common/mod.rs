#![allow(dead_code)]

use std::f64::consts::PI;

use cocycle_core::FourierPotential;
use num_complex::Complex64;
use rand::Rng;

/// Real trigonometric polynomial of degree `1..=max_degree`, strip height 0.5.
pub fn random_real_trig<R: Rng>(rng: &mut R, max_degree: i64) -> FourierPotential {
    let d = rng.random_range(1..=max_degree);
    let mut pairs = vec![(0, Complex64::new(rng.random_range(-1.0..1.0), 0.0))];
    for k in 1..=d {
        let c = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..2.0 * PI));
        pairs.push((k, c));
        pairs.push((-k, c.conj()));
    }
    FourierPotential::from_coefficients(&pairs, 0.5).unwrap()
}

/// `f(x + iy)` summed directly from the coefficients.
pub fn eval(p: &FourierPotential, x: f64, y: f64) -> Complex64 {
    let d = p.degree() as i64;
    (-d..=d)
        .map(|k| p.coeff(k) * Complex64::from_polar((-2.0 * PI * k as f64 * y).exp(), 2.0 * PI * k as f64 * x))
        .sum()
}

/// `int_T log|f(x + iy) - mu| dx` by an `n`-point trapezoid rule.
pub fn jensen_trapezoid(p: &FourierPotential, mu: f64, y: f64, n: usize) -> f64 {
    (0..n).map(|j| (eval(p, j as f64 / n as f64, y) - mu).norm().ln()).sum::<f64>() / n as f64
}

/// Winding number of `x -> f(x + iy) - mu` around 0 by accumulated argument increments.
pub fn winding(p: &FourierPotential, mu: f64, y: f64, n: usize) -> i64 {
    let mut total = 0.0;
    let mut prev = eval(p, 0.0, y) - mu;
    for j in 1..=n {
        let cur = eval(p, j as f64 / n as f64, y) - mu;
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i64
}

/// Largest modulus eigenvalue of a real 2x2 matrix.
pub fn spectral_radius(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        ((tr.abs() + disc.sqrt()) / 2.0).abs()
    } else {
        det.abs().sqrt()
    }
}
