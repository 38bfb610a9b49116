//! Analytic sampling functions as finite Fourier series on the strip
//! `{x + iy : x in T, |y| <= h}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

const TWO_PI: f64 = 2.0 * PI;

/// Tolerance used when deciding whether a root of `f'` sits on the real axis.
const REAL_AXIS_TOL: f64 = 1e-5;

/// `f(z) = sum_{k=-d}^{d} c_k e^{2 pi i k z}` with a declared strip height `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialLiteral", into = "PotentialLiteral")]
pub struct FourierPotential {
    degree: usize,
    /// `coeffs[k + degree] = c_k`.
    coeffs: Vec<Complex64>,
    strip_height: f64,
}

/// Wire form: `(k, Re c_k, Im c_k)` triples plus `h`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialLiteral {
    pub h: f64,
    pub coefficients: Vec<(i64, f64, f64)>,
}

impl TryFrom<PotentialLiteral> for FourierPotential {
    type Error = Error;

    fn try_from(lit: PotentialLiteral) -> Result<Self> {
        if lit.coefficients.iter().all(|&(_, re, im)| re == 0.0 && im == 0.0) {
            return FourierPotential::zero(lit.h);
        }
        FourierPotential::from_triples(&lit.coefficients, lit.h)
    }
}

impl From<FourierPotential> for PotentialLiteral {
    fn from(p: FourierPotential) -> Self {
        let d = p.degree as i64;
        let coefficients = (-d..=d)
            .map(|k| (k, p.coeff(k)))
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, c)| (k, c.re, c.im))
            .collect();
        PotentialLiteral {
            h: p.strip_height,
            coefficients,
        }
    }
}

/// Scalar statistics of a real-analytic potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialStats {
    pub min_torus: f64,
    pub max_torus: f64,
    pub probe_h: f64,
    /// `sup |f|` over the strip of height `probe_h`.
    pub sup_norm: f64,
    /// Critical points `x` with `f'(x) = 0` on the torus. Empty for constants.
    pub critical_points: Vec<f64>,
    /// Critical values `f(x)` at the critical points, sorted and deduplicated.
    pub critical_values: Vec<f64>,
}

impl FourierPotential {
    /// Builds a potential from `(k, c_k)` pairs. Duplicate modes are rejected.
    pub fn from_coefficients(pairs: &[(i64, Complex64)], h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!("strip height must be positive, got {h}")));
        }
        let degree = pairs.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        let mut seen = vec![false; 2 * degree + 1];
        for &(k, c) in pairs {
            let idx = (k + degree as i64) as usize;
            if seen[idx] {
                return Err(Error::Contract(format!("duplicate Fourier mode k = {k}")));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Domain(format!("non-finite coefficient at k = {k}")));
            }
            seen[idx] = true;
            coeffs[idx] = c;
        }
        let p = Self::from_dense(coeffs, h);
        if p.coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::Degenerate("potential vanishes identically".into()));
        }
        Ok(p)
    }

    pub fn from_triples(triples: &[(i64, f64, f64)], h: f64) -> Result<Self> {
        let pairs: Vec<(i64, Complex64)> = triples
            .iter()
            .map(|&(k, re, im)| (k, Complex64::new(re, im)))
            .collect();
        Self::from_coefficients(&pairs, h)
    }

    /// Dense constructor; trims vanishing outer modes. No nonzero check.
    fn from_dense(mut coeffs: Vec<Complex64>, h: f64) -> Self {
        let mut degree = (coeffs.len() - 1) / 2;
        while degree > 0
            && coeffs[0].norm() == 0.0
            && coeffs[coeffs.len() - 1].norm() == 0.0
        {
            coeffs.remove(0);
            coeffs.pop();
            degree -= 1;
        }
        Self {
            degree,
            coeffs,
            strip_height: h,
        }
    }

    /// The identically vanishing potential. Only meaningful where `f` enters
    /// multiplied by the coupling (cocycles, the spectrum bound); operations
    /// that need `f` to be nonzero reject it.
    pub fn zero(h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!("strip height must be positive, got {h}")));
        }
        Ok(Self::from_dense(vec![Complex64::new(0.0, 0.0)], h))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn constant(c: f64, h: f64) -> Result<Self> {
        Self::from_coefficients(&[(0, Complex64::new(c, 0.0))], h)
    }

    /// `2 cos(2 pi x)` on the strip of height 0.5.
    pub fn amo() -> Self {
        Self::from_triples(&[(-1, 1.0, 0.0), (1, 1.0, 0.0)], 0.5).expect("valid preset")
    }

    /// `2 cos(2 pi x) + cos(4 pi x)` on the strip of height 0.5.
    pub fn bichromatic() -> Self {
        Self::from_triples(
            &[(-2, 0.5, 0.0), (-1, 1.0, 0.0), (1, 1.0, 0.0), (2, 0.5, 0.0)],
            0.5,
        )
        .expect("valid preset")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "amo" => Some(Self::amo()),
            "bichromatic" => Some(Self::bichromatic()),
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn strip_height(&self) -> f64 {
        self.strip_height
    }

    pub fn with_strip_height(&self, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Domain(format!("strip height must be positive, got {h}")));
        }
        Ok(Self {
            strip_height: h,
            ..self.clone()
        })
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let d = self.degree as i64;
        if k.abs() > d {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + d) as usize]
        }
    }

    pub fn is_constant(&self) -> bool {
        let d = self.degree as i64;
        (-d..=d).filter(|&k| k != 0).all(|k| self.coeff(k).norm() == 0.0)
    }

    /// `c_{-k} == conj(c_k)` for every mode.
    pub fn is_real_analytic(&self) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = 1e-13 * scale.max(1.0);
        let d = self.degree as i64;
        (0..=d).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
    }

    /// The potential translated by `s`, i.e. `x -> f(x + s)`.
    pub fn translated(&self, s: f64) -> Self {
        let d = self.degree as i64;
        let coeffs = (-d..=d)
            .map(|k| self.coeff(k) * Complex64::from_polar(1.0, TWO_PI * k as f64 * s))
            .collect();
        Self::from_dense(coeffs, self.strip_height)
    }

    /// The potential minus a real constant (shifts `c_0`).
    pub fn shifted(&self, mu: f64) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        coeffs[self.degree] -= Complex64::new(mu, 0.0);
        let p = Self::from_dense(coeffs, self.strip_height);
        if p.coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::Degenerate(format!("f - {mu} vanishes identically")));
        }
        Ok(p)
    }

    /// `offset + scale * f`. May vanish identically.
    pub fn affine(&self, scale: f64, offset: f64) -> Self {
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c * scale).collect();
        coeffs[self.degree] += Complex64::new(offset, 0.0);
        Self::from_dense(coeffs, self.strip_height)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn check_strip(&self, z: Complex64) -> Result<()> {
        if !(z.im.abs() <= self.strip_height * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!(
                "|Im z| = {} exceeds strip height {}",
                z.im.abs(),
                self.strip_height
            )));
        }
        Ok(())
    }

    /// `f(z)` for `|Im z| <= h`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_strip(z)?;
        Ok(self.eval_unchecked(z))
    }

    /// `f(z)` without the strip check.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.derivative_unchecked(z, 0)
    }

    /// `f^{(order)}(z)` (derivative in `z`).
    pub fn derivative(&self, z: Complex64, order: u32) -> Result<Complex64> {
        self.check_strip(z)?;
        Ok(self.derivative_unchecked(z, order))
    }

    pub(crate) fn derivative_unchecked(&self, z: Complex64, order: u32) -> Complex64 {
        let d = self.degree as i64;
        // Reduce Re z into [0, 1) so the exponentials stay well scaled.
        let z = Complex64::new(z.re - z.re.floor(), z.im);
        let w = (Complex64::i() * TWO_PI * z).exp();
        let winv = w.inv();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut wp = Complex64::new(1.0, 0.0);
        let mut wn = Complex64::new(1.0, 0.0);
        acc += self.coeff(0) * if order == 0 { 1.0 } else { 0.0 };
        for k in 1..=d {
            wp *= w;
            wn *= winv;
            let fac = Complex64::new(0.0, TWO_PI * k as f64).powu(order);
            let fac_neg = Complex64::new(0.0, -TWO_PI * k as f64).powu(order);
            acc += self.coeff(k) * wp * fac + self.coeff(-k) * wn * fac_neg;
        }
        acc
    }

    /// The series `f'` as a Fourier series (may vanish identically, so it is
    /// returned as a raw coefficient vector indexed by `k + d`).
    pub(crate) fn derivative_coeffs(&self) -> Vec<Complex64> {
        let d = self.degree as i64;
        (-d..=d)
            .map(|k| self.coeff(k) * Complex64::new(0.0, TWO_PI * k as f64))
            .collect()
    }

    /// `P(w) = w^d (f(z) - mu)` with `w = e^{2 pi i z}`.
    pub fn laurent_poly(&self, mu: Complex64) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs[self.degree] -= mu;
        Poly::new(coeffs)
    }

    /// `sum |c_k| e^{2 pi |k| y}`, an upper bound for `|f|` on the strip of height `y`.
    pub fn norm_bound(&self, y: f64) -> f64 {
        let d = self.degree as i64;
        (-d..=d)
            .map(|k| self.coeff(k).norm() * (TWO_PI * k.abs() as f64 * y).exp())
            .sum()
    }

    /// Upper bound on `|f'|` over the strip of height `y`.
    pub fn lipschitz_bound(&self, y: f64) -> f64 {
        let d = self.degree as i64;
        (-d..=d)
            .map(|k| TWO_PI * k.abs() as f64 * self.coeff(k).norm() * (TWO_PI * k.abs() as f64 * y).exp())
            .sum()
    }

    /// `sup |f|` over the strip of height `probe_h`, by the maximum principle
    /// scanned only on the two boundary lines (4096-point grid, then
    /// golden-section refinement around the best grid cells).
    pub fn sup_norm(&self, probe_h: f64) -> Result<f64> {
        if !(probe_h >= 0.0) || probe_h > self.strip_height * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "probe height {probe_h} outside [0, {}]",
                self.strip_height
            )));
        }
        let mut best = 0.0f64;
        let ys: &[f64] = if probe_h == 0.0 { &[0.0] } else { &[probe_h, -probe_h] };
        for &y in ys {
            let g = |x: f64| self.eval_unchecked(Complex64::new(x, y)).norm();
            best = best.max(maximize_periodic(&g, 4096));
        }
        Ok(best)
    }

    /// Min/max on the torus, critical points and critical values, and the
    /// strip sup norm at `probe_h`.
    pub fn stats(&self, probe_h: f64) -> Result<PotentialStats> {
        if !self.is_real_analytic() {
            return Err(Error::Contract(
                "min/max and critical values need a real-analytic potential".into(),
            ));
        }
        let sup_norm = self.sup_norm(probe_h)?;
        if self.is_constant() {
            let c = self.coeff(0).re;
            return Ok(PotentialStats {
                min_torus: c,
                max_torus: c,
                probe_h,
                sup_norm,
                critical_points: Vec::new(),
                critical_values: vec![c],
            });
        }
        let critical_points = self.critical_points()?;
        let f = |x: f64| self.eval_unchecked(Complex64::new(x, 0.0)).re;
        let mut values: Vec<f64> = critical_points.iter().map(|&x| f(x)).collect();
        values.push(f(0.0));
        let min_torus = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max_torus = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        values.pop();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let scale = max_torus.abs().max(min_torus.abs()).max(1.0);
        values.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
        Ok(PotentialStats {
            min_torus,
            max_torus,
            probe_h,
            sup_norm,
            critical_points,
            critical_values: values,
        })
    }

    /// Real zeros of `f'` in `[0, 1)`, sorted, via the Laurent roots of the
    /// derivative series.
    pub fn critical_points(&self) -> Result<Vec<f64>> {
        let poly = Poly::new(self.derivative_coeffs());
        if poly.is_zero() {
            return Ok(Vec::new());
        }
        let mut xs: Vec<f64> = poly
            .roots()?
            .into_iter()
            .filter_map(|w| {
                let y = -w.norm().ln() / TWO_PI;
                (y.abs() <= REAL_AXIS_TOL).then(|| {
                    let x = w.arg() / TWO_PI;
                    x - x.floor()
                })
            })
            .map(|x| self.polish_critical_point(x))
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| circle_dist(*a, *b) < 1e-7);
        if xs.len() > 1 && circle_dist(xs[0], xs[xs.len() - 1]) < 1e-7 {
            xs.pop();
        }
        Ok(xs)
    }

    fn polish_critical_point(&self, x0: f64) -> f64 {
        let mut x = x0;
        for _ in 0..30 {
            let d1 = self.derivative_unchecked(Complex64::new(x, 0.0), 1).re;
            let d2 = self.derivative_unchecked(Complex64::new(x, 0.0), 2).re;
            if d2 == 0.0 {
                break;
            }
            let step = d1 / d2;
            if step.abs() > 1e-4 || !step.is_finite() {
                break;
            }
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x - x.floor()
    }

    /// Range of `mu = E / lambda` compatible with the spectrum bound
    /// `[-2 + lambda min f, 2 + lambda max f]`.
    pub fn admissible_energy_interval(&self, lambda: f64) -> Result<(f64, f64)> {
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("coupling must be positive, got {lambda}")));
        }
        let s = self.stats(0.0)?;
        Ok((-2.0 / lambda + s.min_torus, 2.0 / lambda + s.max_torus))
    }
}

pub(crate) fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Maximum of a 1-periodic function sampled on `n` points, refined by
/// golden-section search around the eight best grid cells.
pub(crate) fn maximize_periodic<F: Fn(f64) -> f64>(g: &F, n: usize) -> f64 {
    let dx = 1.0 / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| g(i as f64 * dx)).collect();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| vals[i] >= vals[(i + n - 1) % n] && vals[i] >= vals[(i + 1) % n])
        .collect();
    idx.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    idx.truncate(8);
    let mut best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for i in idx {
        let c = i as f64 * dx;
        best = best.max(golden_max(g, c - dx, c + dx));
    }
    best
}

/// Minimum of a 1-periodic function, same scheme as [`maximize_periodic`].
/// Returns `(min, argmin)`.
pub(crate) fn minimize_periodic<F: Fn(f64) -> f64>(g: &F, n: usize) -> (f64, f64) {
    let dx = 1.0 / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| g(i as f64 * dx)).collect();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| vals[i] <= vals[(i + n - 1) % n] && vals[i] <= vals[(i + 1) % n])
        .collect();
    idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    idx.truncate(8);
    let (mut best, mut arg) = (f64::INFINITY, 0.0);
    for (i, &v) in vals.iter().enumerate() {
        if v < best {
            best = v;
            arg = i as f64 * dx;
        }
    }
    for i in idx {
        let c = i as f64 * dx;
        let (v, x) = golden_min(g, c - dx, c + dx);
        if v < best {
            best = v;
            arg = x;
        }
    }
    (best, arg - arg.floor())
}

fn golden_max<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> f64 {
    let (v, _) = golden_min(&|x| -g(x), a, b);
    -v
}

fn golden_min<F: Fn(f64) -> f64>(g: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..60 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    if gc < gd {
        (gc, c)
    } else {
        (gd, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amo_values() {
        let f = FourierPotential::amo();
        assert!((f.eval(Complex64::new(0.0, 0.0)).unwrap() - 2.0).norm() < 1e-15);
        let v = f.eval(Complex64::new(0.0, 0.25)).unwrap();
        assert!((v.re - 2.0 * (PI / 2.0).cosh()).abs() < 1e-13);
        assert!(v.im.abs() < 1e-13);
    }

    #[test]
    fn constant_everywhere() {
        let f = FourierPotential::constant(3.5, 0.4).unwrap();
        let v = f.eval(Complex64::new(0.731, -0.3)).unwrap();
        assert_eq!(v, Complex64::new(3.5, 0.0));
        let s = f.stats(0.2).unwrap();
        assert_eq!((s.min_torus, s.max_torus), (3.5, 3.5));
        assert_eq!(s.critical_values, vec![3.5]);
    }

    #[test]
    fn strip_violation_is_domain_error() {
        let f = FourierPotential::amo();
        assert!(matches!(f.eval(Complex64::new(0.0, 0.6)), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_potential_rejected() {
        assert!(FourierPotential::from_triples(&[(1, 0.0, 0.0)], 0.5).is_err());
        assert!(FourierPotential::from_triples(&[(1, 1.0, 0.0), (1, 2.0, 0.0)], 0.5).is_err());
    }

    #[test]
    fn real_analytic_flag() {
        assert!(FourierPotential::amo().is_real_analytic());
        let f = FourierPotential::from_triples(&[(1, 1.0, 0.0)], 0.5).unwrap();
        assert!(!f.is_real_analytic());
        assert!(matches!(f.stats(0.1), Err(Error::Contract(_))));
    }

    #[test]
    fn amo_stats() {
        let s = FourierPotential::amo().stats(0.25).unwrap();
        assert!((s.min_torus + 2.0).abs() < 1e-12);
        assert!((s.max_torus - 2.0).abs() < 1e-12);
        assert_eq!(s.critical_values.len(), 2);
        assert!((s.critical_values[0] + 2.0).abs() < 1e-12);
        assert!((s.critical_values[1] - 2.0).abs() < 1e-12);
        assert!((s.sup_norm - 2.0 * (PI / 2.0).cosh()).abs() < 1e-10);
    }

    #[test]
    fn admissible_interval() {
        let f = FourierPotential::amo();
        let (lo, hi) = f.admissible_energy_interval(10.0).unwrap();
        assert!((lo + 2.2).abs() < 1e-12 && (hi - 2.2).abs() < 1e-12);
        let (lo, hi) = f.admissible_energy_interval(1e9).unwrap();
        assert!((lo + 2.0).abs() < 1e-8 && (hi - 2.0).abs() < 1e-8);
        let zero = FourierPotential::zero(0.5).unwrap();
        assert_eq!(zero.admissible_energy_interval(4.0).unwrap(), (-0.5, 0.5));
        assert!(f.admissible_energy_interval(0.0).is_err());
    }

    #[test]
    fn serde_literal_round_trip() {
        let f = FourierPotential::bichromatic();
        let s = serde_json::to_string(&f).unwrap();
        let g: FourierPotential = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
