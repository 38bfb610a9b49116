use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::geometry::{theta, TorusZeroFree};
use super::{Check, EstimatorParams, Status};
use crate::cocycle::{acceleration, lyapunov_exponent, AccelerationEstimate, CocycleSpec, LyapunovEstimate};
use crate::constants;
use crate::error::{Error, Result};
use crate::jensen::jensen_integral;
use crate::par;
use crate::potential::{maximize_periodic, minimize_periodic, FourierPotential};

/// Minimum distance from a stratum to the critical values.
pub const CRITICAL_VALUE_TOL: f64 = 1e-9;
const N0_SAMPLES: usize = 11;
const BETA_SAMPLES: usize = 41;
const BAND_HEIGHTS: usize = 33;

#[derive(Debug, Clone, Serialize)]
pub struct StratumConstants {
    pub mu1: f64,
    pub mu2: f64,
    pub h: f64,
    /// Torus zero count of `f - mu`, constant on the stratum.
    pub n0: usize,
    /// `min |f'|` over `f^{-1}([mu1, mu2])`.
    pub tau0: f64,
    /// `max_mu ||f - mu||_h`.
    pub m0: f64,
    /// `min_mu min_T |g_mu|`.
    pub beta0: f64,
    /// `h theta_{M0}(tau0 h^{N0})`.
    pub zeta0: f64,
    /// `h theta_{M0}(beta0 zeta0^{N0})`.
    pub gamma0: f64,
    pub r0: f64,
    /// `min_mu min_{T_{R0}} |g_mu|`.
    pub beta_hat: f64,
    /// `max(2^{N0} beta^, R0^{-1/2})^{2 N0 + 1}`.
    pub lambda_tilde0: f64,
    /// `max(2^{N0 + 1} / beta^, R0^{-1/2})^{2 N0 + 1}`, the threshold at which
    /// `2^{-N0} beta^ lambda^{1/(2 N0 + 1)} > 2` and `delta < R0`.
    pub lambda_tilde0_consistent: f64,
}

impl StratumConstants {
    pub fn r0_from_components(&self) -> f64 {
        self.zeta0 * self.gamma0 / (self.zeta0 * self.zeta0 + self.gamma0 * self.gamma0).sqrt()
    }

    pub fn lambda_tilde0_from_components(&self) -> f64 {
        (2f64.powi(self.n0 as i32) * self.beta_hat)
            .max(self.r0.powf(-0.5))
            .powi(2 * self.n0 as i32 + 1)
    }

    /// `beta^ (delta/2)^{N0}`.
    pub fn eta(&self, delta: f64) -> f64 {
        self.beta_hat * (0.5 * delta).powi(self.n0 as i32)
    }

    /// `delta = lambda^{-2/(2 N0 + 1)}`.
    pub fn delta_of(&self, lambda: f64) -> f64 {
        lambda.abs().powf(-2.0 / (2.0 * self.n0 as f64 + 1.0))
    }

    /// Constant in the residual bound: `2 pi N0 + K2 4^{N0} / beta^^2`.
    pub fn residual_constant(&self) -> f64 {
        let n0 = self.n0 as i32;
        2.0 * PI * self.n0 as f64 + constants::k2() * 4f64.powi(n0) / (self.beta_hat * self.beta_hat)
    }

    pub fn contains(&self, mu: f64) -> bool {
        mu >= self.mu1 - 1e-12 && mu <= self.mu2 + 1e-12
    }
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn tau0(p: &FourierPotential, mu1: f64, mu2: f64) -> f64 {
    let n = 65_536;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let z = Complex64::new(i as f64 / n as f64, 0.0);
        let v = p.eval_unchecked(z).re;
        if v >= mu1 && v <= mu2 {
            best = best.min(p.derivative_unchecked(z, 1).norm());
        }
    }
    for mu in [mu1, mu2] {
        if let Ok(fac) = TorusZeroFree::new(p, mu) {
            for z in &fac.zeros {
                best = best.min(p.derivative_unchecked(Complex64::new(z.x, 0.0), 1).norm());
            }
        }
    }
    best
}

/// Constants of a stratum `[mu1, mu2]` free of critical values.
pub fn stratum_quantities(p: &FourierPotential, mu1: f64, mu2: f64) -> Result<StratumConstants> {
    if !p.is_real_analytic() || p.is_constant() {
        return Err(Error::Contract("strata need a non-constant real-analytic potential".into()));
    }
    let h = p.strip_height();
    if h >= 1.0 {
        return Err(Error::Contract(format!("need h < 1, got {h}")));
    }
    if !(mu1 <= mu2) {
        return Err(Error::Contract(format!("need mu1 <= mu2, got [{mu1}, {mu2}]")));
    }
    let re = |x: f64| p.eval_unchecked(Complex64::new(x, 0.0)).re;
    let fmin = minimize_periodic(&re, 4096).0;
    let fmax = maximize_periodic(&re, 4096);
    if mu1 < fmin || mu2 > fmax {
        return Err(Error::Contract(format!(
            "stratum [{mu1}, {mu2}] not inside the range [{fmin}, {fmax}] of f"
        )));
    }
    for x in p.critical_points()? {
        let v = re(x);
        let dist = if v < mu1 { mu1 - v } else if v > mu2 { v - mu2 } else { 0.0 };
        if dist <= CRITICAL_VALUE_TOL {
            return Err(Error::Contract(format!(
                "stratum [{mu1}, {mu2}] meets the critical value {v} (at x = {x})"
            )));
        }
    }

    let mus = grid(mu1, mu2, N0_SAMPLES);
    let facs = par::try_map(&mus, |&mu| TorusZeroFree::new(p, mu))?;
    let n0 = facs[0].count();
    if let Some((mu, f)) = mus.iter().zip(&facs).find(|(_, f)| f.count() != n0) {
        return Err(Error::Numeric(format!(
            "torus zero count not constant on the stratum: {n0} at {mu1}, {} at {mu}",
            f.count()
        )));
    }
    if n0 == 0 {
        return Err(Error::Contract("f - mu has no zeros on the torus".into()));
    }
    let m0 = par::try_map(&mus, |&mu| p.shifted(mu).and_then(|f| f.sup_norm(h)))?
        .into_iter()
        .fold(0.0, f64::max);
    let tau0 = tau0(p, mu1, mu2);

    let fine = grid(mu1, mu2, BETA_SAMPLES);
    let fine_facs = par::try_map(&fine, |&mu| TorusZeroFree::new(p, mu))?;
    let beta0 = par::map(&fine_facs, |f| f.torus_min()).into_iter().fold(f64::INFINITY, f64::min);

    let zeta0 = h * theta(m0, tau0 * h.powi(n0 as i32));
    let gamma0 = h * theta(m0, beta0 * zeta0.powi(n0 as i32));
    let r0 = zeta0 * gamma0 / (zeta0 * zeta0 + gamma0 * gamma0).sqrt();
    let beta_hat = par::map(&fine_facs, |f| f.strip_min(r0, 1024, 33))
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let mut sc = StratumConstants {
        mu1,
        mu2,
        h,
        n0,
        tau0,
        m0,
        beta0,
        zeta0,
        gamma0,
        r0,
        beta_hat,
        lambda_tilde0: 0.0,
        lambda_tilde0_consistent: (2f64.powi(n0 as i32 + 1) / beta_hat)
            .max(r0.powf(-0.5))
            .powi(2 * n0 as i32 + 1),
    };
    sc.lambda_tilde0 = sc.lambda_tilde0_from_components();
    Ok(sc)
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumEnergyResult {
    pub energy: f64,
    pub mu: f64,
    pub predicted: f64,
    pub measured: LyapunovEstimate,
    pub residual: f64,
    pub bound: f64,
    pub omega0: AccelerationEstimate,
    /// `N0 / 2`.
    pub omega0_bound: f64,
    /// `min` over the band heights of `min_x |lambda f(x + iy) - E|`.
    pub band_min_modulus: f64,
    pub checks: Vec<Check>,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumReport {
    pub constants: StratumConstants,
    pub alpha: f64,
    pub lambda: f64,
    pub delta: f64,
    pub above_threshold: bool,
    /// `2^{-N0} beta^ lambda^{1/(2 N0 + 1)}`.
    pub band_floor: f64,
    /// Every height in `(delta/2, delta)` works for every energy.
    pub band_ok: bool,
    pub residual_constant: f64,
    pub rows: Vec<StratumEnergyResult>,
    pub status: Status,
}

/// Asymptotic formula, acceleration bound and uniform working band on a
/// stratum. With `enforce_threshold` a coupling at or below the threshold
/// is a contract error; otherwise it is recorded as a failed check.
pub fn verify_stratum(
    sc: &StratumConstants,
    p: &FourierPotential,
    alpha: f64,
    lambda: f64,
    energies: &[f64],
    est: EstimatorParams,
    enforce_threshold: bool,
) -> Result<StratumReport> {
    if !(lambda > 0.0) {
        return Err(Error::Contract(format!("need lambda > 0, got {lambda}")));
    }
    let above_threshold = lambda > sc.lambda_tilde0;
    if enforce_threshold && !above_threshold {
        return Err(Error::Contract(format!(
            "need lambda > lambda~0 = {:.6e}, got {lambda}",
            sc.lambda_tilde0
        )));
    }
    if let Some(e) = energies.iter().find(|&&e| !sc.contains(e / lambda)) {
        return Err(Error::Contract(format!(
            "E/lambda = {} outside the stratum [{}, {}]",
            e / lambda,
            sc.mu1,
            sc.mu2
        )));
    }
    let delta = sc.delta_of(lambda);
    if delta >= sc.h {
        return Err(Error::Contract(format!("delta = {delta} not below h = {}", sc.h)));
    }
    let heights: Vec<f64> = (1..=BAND_HEIGHTS)
        .map(|j| 0.5 * delta + 0.5 * delta * j as f64 / (BAND_HEIGHTS + 1) as f64)
        .collect();
    let k = sc.residual_constant();
    let bound = k * lambda.powf(-2.0 / (2.0 * sc.n0 as f64 + 1.0));

    let mut rows = Vec::with_capacity(energies.len());
    for &energy in energies {
        let mu = energy / lambda;
        let band_min_modulus = par::map(&heights, |&y| {
            minimize_periodic(
                &|x| (p.eval_unchecked(Complex64::new(x, y)) * lambda - energy).norm(),
                4096,
            )
            .0
        })
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        let predicted = lambda.ln() + jensen_integral(p, Complex64::new(mu, 0.0), 0.0)?;
        let c = CocycleSpec::new(p.clone(), alpha, lambda, energy, 0.0)?;
        let measured = lyapunov_exponent(&c, est.n, est.m)?;
        let residual = (measured.value - predicted).abs();
        let omega0 = acceleration(&c, 0.0, est.t, est.n, est.m)?;
        let omega0_bound = sc.n0 as f64 / 2.0;
        let checks = vec![
            Check::at_most("residual", residual, bound + 2.0 * measured.spread),
            Check::at_most("omega0", omega0.quantized as f64, omega0_bound),
            Check::at_least("band", band_min_modulus, 2.0),
        ];
        let status = if checks.iter().any(|c| !c.ok) {
            Status::Fail
        } else if bound <= 3.0 * measured.spread {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        rows.push(StratumEnergyResult {
            energy,
            mu,
            predicted,
            measured,
            residual,
            bound,
            omega0,
            omega0_bound,
            band_min_modulus,
            checks,
            status,
        });
    }
    let band_ok = rows.iter().all(|r| r.band_min_modulus > 2.0);
    let mut status = rows.iter().fold(Status::Pass, |s, r| s.and(r.status));
    if !above_threshold {
        status = Status::Fail;
    }
    Ok(StratumReport {
        constants: sc.clone(),
        alpha,
        lambda,
        delta,
        above_threshold,
        band_floor: 2f64.powi(-(sc.n0 as i32)) * sc.beta_hat * lambda.powf(1.0 / (2.0 * sc.n0 as f64 + 1.0)),
        band_ok,
        residual_constant: k,
        rows,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amo_stratum() {
        let sc = stratum_quantities(&FourierPotential::amo(), -1.0, 1.0).unwrap();
        assert_eq!(sc.n0, 2);
        assert!((sc.tau0 - 2.0 * 3f64.sqrt() * PI).abs() < 1e-6);
        assert_eq!(sc.r0, sc.r0_from_components());
        assert_eq!(sc.lambda_tilde0, sc.lambda_tilde0_from_components());
        assert!(sc.r0 > 0.0 && sc.r0 < sc.h);
    }

    #[test]
    fn critical_value_rejected() {
        let e = stratum_quantities(&FourierPotential::amo(), 1.0, 2.0).unwrap_err();
        assert!(matches!(e, Error::Contract(_)));
        let e = stratum_quantities(&FourierPotential::amo(), -2.5, 0.0).unwrap_err();
        assert!(matches!(e, Error::Contract(_)));
    }

    #[test]
    fn energy_outside_stratum() {
        let p = FourierPotential::amo();
        let sc = stratum_quantities(&p, -1.0, 1.0).unwrap();
        let est = EstimatorParams { n: 100, m: 16, t: 1e-2 };
        let e = verify_stratum(&sc, &p, crate::cocycle::golden_mean(), 200.0, &[300.0], est, false).unwrap_err();
        assert!(matches!(e, Error::Contract(_)));
    }
}
