use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{Check, EstimatorParams, Status};
use crate::cocycle::{
    acceleration, lyapunov_exponent, splitting_check_for, AccelerationEstimate, CocycleSpec,
    DominatedSplittingReport, LyapunovEstimate, DEFAULT_CONTAINMENT_TOL,
};
use crate::constants;
use crate::error::{Error, Result};
use crate::jensen::{acceleration_functional, jensen_integral};
use crate::par;
use crate::potential::{minimize_periodic, FourierPotential};
use crate::zeros::{hat_quantities, HatQuantities, MuGridSpec};

/// Heights scanned for a working height.
pub const WORKING_HEIGHT_SCAN: usize = 65;
/// Fraction of `rho` at which the theoretical `delta` is capped.
pub const DELTA_CAP: f64 = 0.99;

#[derive(Debug, Clone, Serialize)]
pub struct TheoremConstants {
    pub rho: f64,
    /// `N = N^_{2 rho}(f)`.
    pub n: usize,
    /// `2^{2N+1}`.
    pub lambda0: f64,
    pub k1: f64,
    pub k2: f64,
    pub beta_hat: f64,
    /// `2 N^2 K1^{-1} beta^^{-1/N} pi + K2`.
    pub c: f64,
    #[serde(skip)]
    pub hat: HatQuantities,
}

impl TheoremConstants {
    /// Exponent `2/(2N+1)` of the error law.
    pub fn rate(&self) -> f64 {
        2.0 / (2.0 * self.n as f64 + 1.0)
    }

    /// `N K1^{-1} beta^^{-1/N} |lambda|^{-2/(2N+1)}`.
    pub fn delta_of(&self, lambda: f64) -> f64 {
        let n = self.n as f64;
        n / self.k1 * self.beta_hat.powf(-1.0 / n) * lambda.abs().powf(-self.rate())
    }

    /// `C |lambda|^{-2/(2N+1)}`.
    pub fn bound(&self, lambda: f64) -> f64 {
        self.c * lambda.abs().powf(-self.rate())
    }

    /// Recomputes `C` from the stored components.
    pub fn c_from_components(&self) -> f64 {
        let n = self.n as f64;
        2.0 * n * n / self.k1 * self.beta_hat.powf(-1.0 / n) * PI + self.k2
    }
}

pub fn theorem_constants(p: &FourierPotential, rho: f64) -> Result<TheoremConstants> {
    theorem_constants_with(p, rho, MuGridSpec::default())
}

pub fn theorem_constants_with(p: &FourierPotential, rho: f64, grid: MuGridSpec) -> Result<TheoremConstants> {
    let hat = hat_quantities(p, rho, grid)?;
    if hat.n_hat == 0 {
        return Err(Error::Degenerate("no zeros of f - mu in the strip for any mu".into()));
    }
    let n = hat.n_hat;
    let mut tc = TheoremConstants {
        rho,
        n,
        lambda0: 2f64.powi(2 * n as i32 + 1),
        k1: constants::k1(),
        k2: constants::k2(),
        beta_hat: hat.beta_hat,
        c: 0.0,
        hat,
    };
    tc.c = tc.c_from_components();
    Ok(tc)
}

/// `max_{delta/2 <= y <= delta} min_x |f(x + iy) - mu|` on a grid.
fn best_height_modulus(p: &FourierPotential, mu: f64, delta: f64, ny: usize, nx: usize) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for j in 0..ny {
        let y = 0.5 * delta + 0.5 * delta * j as f64 / (ny - 1) as f64;
        let mut lo = f64::INFINITY;
        for i in 0..nx {
            let z = Complex64::new(i as f64 / nx as f64, y);
            lo = lo.min((p.eval_unchecked(z) - mu).norm());
        }
        if lo > best.0 {
            best = (lo, y);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogIntegralBoundRow {
    pub mu: f64,
    pub lhs: f64,
    pub best_y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LogIntegralBoundReport {
    pub rho: f64,
    pub delta: f64,
    pub n_hat: usize,
    pub beta_hat: f64,
    /// `beta^ (K1 delta / N^)^{N^}`.
    pub bound: f64,
    pub rows: Vec<LogIntegralBoundRow>,
    pub violations: usize,
    pub verified: bool,
}

/// `beta^_rho (K1 delta / N^_{2 rho})^{N^_{2 rho}}`.
pub fn log_integral_bound_value(n_hat: usize, beta_hat: f64, delta: f64) -> f64 {
    let n = n_hat as f64;
    beta_hat * (constants::k1() * delta / n).powi(n_hat as i32)
}

/// The lower bound and its brute-force check over 101 values of `mu`
/// spanning `[min f - 1, max f + 1]` (33 heights, 1024 phases each).
pub fn log_integral_bound_bound(p: &FourierPotential, rho: f64, delta: f64) -> Result<LogIntegralBoundReport> {
    if p.is_constant() {
        return Err(Error::Degenerate("constant potential".into()));
    }
    if !(delta > 0.0 && delta < rho) {
        return Err(Error::Contract(format!("need 0 < delta < rho, got delta = {delta}, rho = {rho}")));
    }
    let tc = theorem_constants(p, rho)?;
    log_integral_bound_check(p, &tc, delta)
}

pub fn log_integral_bound_check(p: &FourierPotential, tc: &TheoremConstants, delta: f64) -> Result<LogIntegralBoundReport> {
    if !(delta > 0.0 && delta < tc.rho) {
        return Err(Error::Contract(format!(
            "need 0 < delta < rho, got delta = {delta}, rho = {}",
            tc.rho
        )));
    }
    let bound = log_integral_bound_value(tc.n, tc.beta_hat, delta);
    let stats = p.stats(0.0)?;
    let (lo, hi) = (stats.min_torus - 1.0, stats.max_torus + 1.0);
    let mus: Vec<f64> = (0..101).map(|i| lo + (hi - lo) * i as f64 / 100.0).collect();
    let rows = par::map(&mus, |&mu| {
        let (lhs, best_y) = best_height_modulus(p, mu, delta, 33, 1024);
        LogIntegralBoundRow { mu, lhs, best_y }
    });
    let violations = rows.iter().filter(|r| r.lhs < bound).count();
    Ok(LogIntegralBoundReport {
        rho: tc.rho,
        delta,
        n_hat: tc.n,
        beta_hat: tc.beta_hat,
        bound,
        rows,
        violations,
        verified: violations == 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WorkingHeight {
    pub delta: f64,
    pub y_star: f64,
    pub band: (f64, f64),
    /// `min_x |lambda f(x + iy*) - E|`.
    pub min_modulus: f64,
    /// `(y, min_x |lambda f(x + iy) - E|)` on the scan grid.
    pub scan: Vec<(f64, f64)>,
}

fn height_modulus(p: &FourierPotential, lambda: f64, energy: f64, y: f64) -> f64 {
    minimize_periodic(
        &|x| (p.eval_unchecked(Complex64::new(x, y)) * lambda - energy).norm(),
        4096,
    )
    .0
}

/// Largest sub-band of `[delta/2, delta]` on which `min_x |lambda f - E| > 2`,
/// with its midpoint.
pub fn find_working_height(
    p: &FourierPotential,
    lambda: f64,
    energy: f64,
    delta: f64,
    lambda0: f64,
) -> Result<WorkingHeight> {
    if !(lambda.abs() > lambda0) {
        return Err(Error::Contract(format!("need |lambda| > lambda0 = {lambda0}, got {lambda}")));
    }
    if !(delta > 0.0 && delta <= p.strip_height()) {
        return Err(Error::Contract(format!("delta = {delta} outside (0, h]")));
    }
    scan_band(p, lambda, energy, delta)
}

pub(crate) fn scan_band(p: &FourierPotential, lambda: f64, energy: f64, delta: f64) -> Result<WorkingHeight> {
    let ys: Vec<f64> = (0..WORKING_HEIGHT_SCAN)
        .map(|j| 0.5 * delta + 0.5 * delta * j as f64 / (WORKING_HEIGHT_SCAN - 1) as f64)
        .collect();
    let qs = par::map(&ys, |&y| height_modulus(p, lambda, energy, y));
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < ys.len() {
        if qs[i] > 2.0 {
            let start = i;
            while i + 1 < ys.len() && qs[i + 1] > 2.0 {
                i += 1;
            }
            if best.is_none_or(|(a, b)| ys[i] - ys[start] > ys[b] - ys[a]) {
                best = Some((start, i));
            }
        }
        i += 1;
    }
    let Some((a, b)) = best else {
        let qmax = qs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::Numeric(format!(
            "no height in [{}, {delta}] with min_x |lambda f - E| > 2 (best {qmax:.4e}); lambda = {lambda}, E = {energy}",
            0.5 * delta
        )));
    };
    let edge = |inside: f64, outside: f64| {
        let (mut good, mut bad) = (inside, outside);
        for _ in 0..30 {
            let mid = 0.5 * (good + bad);
            if height_modulus(p, lambda, energy, mid) > 2.0 {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let y1 = if a > 0 { edge(ys[a], ys[a - 1]) } else { ys[a] };
    let y2 = if b + 1 < ys.len() { edge(ys[b], ys[b + 1]) } else { ys[b] };
    let y_star = 0.5 * (y1 + y2);
    Ok(WorkingHeight {
        delta,
        y_star,
        band: (y1, y2),
        min_modulus: height_modulus(p, lambda, energy, y_star),
        scan: ys.into_iter().zip(qs).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsCertificate {
    pub constants: TheoremConstants,
    pub alpha: f64,
    pub lambda: f64,
    pub energy: f64,
    pub delta_theory: f64,
    /// `delta` actually used: the theoretical value capped below `rho`.
    pub delta: f64,
    pub delta_capped: bool,
    pub working: WorkingHeight,
    /// `log|lambda| + I[E/lambda - f](0)`.
    pub predicted: f64,
    pub measured: LyapunovEstimate,
    pub residual: f64,
    /// `C |lambda|^{-2/(2N+1)}`.
    pub bound: f64,
    pub spread: f64,
    pub measured_at_working_height: LyapunovEstimate,
    pub splitting: DominatedSplittingReport,
    /// `2 omega[E/lambda - f](y*)`.
    pub two_omega_at_working_height: i64,
    pub checks: Vec<Check>,
    pub status: Status,
}

/// Compares the measured exponent at `y = 0` with the asymptotic prediction
/// and runs the working-height pipeline behind the error bound.
pub fn verify_large_coupling(
    tc: &TheoremConstants,
    p: &FourierPotential,
    alpha: f64,
    lambda: f64,
    energy: f64,
    est: EstimatorParams,
) -> Result<AsymptoticsCertificate> {
    if !(lambda.abs() > tc.lambda0) {
        return Err(Error::Contract(format!(
            "need |lambda| > lambda0 = {}, got {lambda}",
            tc.lambda0
        )));
    }
    let mu = energy / lambda;
    let predicted = lambda.abs().ln() + jensen_integral(p, Complex64::new(mu, 0.0), 0.0)?;
    let base = CocycleSpec::new(p.clone(), alpha, lambda, energy, 0.0)?;
    let measured = lyapunov_exponent(&base, est.n, est.m)?;
    let residual = (measured.value - predicted).abs();
    let bound = tc.bound(lambda);
    let spread = measured.spread;

    let delta_theory = tc.delta_of(lambda);
    let cap = DELTA_CAP * tc.rho;
    let delta = delta_theory.min(cap);
    let working = find_working_height(p, lambda, energy, delta, tc.lambda0)?;
    let ys = working.y_star;

    let at_y = base.at_height(ys)?;
    let measured_y = lyapunov_exponent(&at_y, est.n, est.m)?;
    let g = p.affine(-lambda, energy);
    let splitting = splitting_check_for(&g, alpha, ys, Some((est.n, est.m)), DEFAULT_CONTAINMENT_TOL)?;
    let i_y = jensen_integral(p, Complex64::new(mu, 0.0), ys)?;
    let two_omega = acceleration_functional(p, Complex64::new(mu, 0.0), ys)?.two_omega;

    let mut checks = vec![
        Check::at_least("working_height_floor", working.min_modulus, lambda.abs().powf(1.0 / (2.0 * tc.n as f64 + 1.0))),
        Check::at_least("dominated_at_working_height", splitting.m_g, 2.0),
    ];
    if let Some(d) = splitting.measured {
        let identity = (measured_y.value - lambda.abs().ln() - i_y - d.le).abs();
        checks.push(Check::at_most(
            "factorization_identity",
            identity,
            2.0 * (measured_y.spread + d.spread) + 1e-8,
        ));
        checks.push(Check::at_most("splitting_le_decay", d.le.abs(), tc.k2 * lambda.abs().powf(-tc.rate())));
    }
    checks.push(Check {
        name: "splitting_bounds".into(),
        value: splitting.measured.map_or(f64::NAN, |d| d.le),
        limit: splitting.le_upper.unwrap_or(f64::NAN),
        ok: splitting.all_contained(),
    });
    checks.push(Check::at_most(
        "convexity_extrapolation",
        (measured.value - measured_y.value).abs(),
        PI * two_omega as f64 * ys + 2.0 * (measured.spread + measured_y.spread) + 1e-8,
    ));
    checks.push(Check::at_most("residual", residual, bound + 2.0 * spread));

    let status = if checks.iter().any(|c| !c.ok) {
        Status::Fail
    } else if bound <= 3.0 * spread {
        Status::Inconclusive
    } else {
        Status::Pass
    };

    Ok(AsymptoticsCertificate {
        constants: tc.clone(),
        alpha,
        lambda,
        energy,
        delta_theory,
        delta,
        delta_capped: delta < delta_theory,
        working,
        predicted,
        measured,
        residual,
        bound,
        spread,
        measured_at_working_height: measured_y,
        splitting,
        two_omega_at_working_height: two_omega,
        checks,
        status,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AccelerationBoundReport {
    pub lambda: f64,
    pub energy: f64,
    pub n_hat: usize,
    /// Measured acceleration at `y = 0` (right difference).
    pub omega0: AccelerationEstimate,
    /// `max_{0 <= y <= rho} 2 omega[E/lambda - f](y)` from zero counts.
    pub sup_two_omega: i64,
    pub checks: Vec<Check>,
    pub status: Status,
}

/// `omega(0) <= sup_y omega[E/lambda - f](y) <= N/2`, each link separately.
pub fn acceleration_bound_check(
    tc: &TheoremConstants,
    p: &FourierPotential,
    alpha: f64,
    lambda: f64,
    energy: f64,
    est: EstimatorParams,
) -> Result<AccelerationBoundReport> {
    if p.is_zero() {
        return Err(Error::Degenerate("zero potential".into()));
    }
    if !(lambda.abs() >= tc.lambda0) {
        return Err(Error::Contract(format!(
            "need |lambda| >= lambda0 = {}, got {lambda}",
            tc.lambda0
        )));
    }
    let mu = Complex64::new(energy / lambda, 0.0);
    let c = CocycleSpec::new(p.clone(), alpha, lambda, energy, 0.0)?;
    let omega0 = acceleration(&c, 0.0, est.t, est.n, est.m)?;
    let heights: Vec<f64> = (0..=20).map(|i| tc.rho * i as f64 / 20.0).collect();
    let values = par::try_map(&heights, |&y| acceleration_functional(p, mu, y).map(|a| a.two_omega))?;
    let sup_two_omega = values.into_iter().max().unwrap_or(0);
    let checks = vec![
        Check::at_most("measured_vs_zero_count", 2.0 * omega0.quantized as f64, sup_two_omega as f64),
        Check::at_most("zero_count_vs_n_hat", sup_two_omega as f64, tc.n as f64),
    ];
    let status = if checks.iter().all(|c| c.ok) { Status::Pass } else { Status::Fail };
    Ok(AccelerationBoundReport {
        lambda,
        energy,
        n_hat: tc.n,
        omega0,
        sup_two_omega,
        checks,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amo_constants() {
        let tc = theorem_constants(&FourierPotential::amo(), 0.2).unwrap();
        assert_eq!(tc.n, 2);
        assert_eq!(tc.lambda0, 32.0);
        assert!((tc.c - tc.c_from_components()).abs() == 0.0);
        assert!(tc.delta_of(100.0) < tc.delta_of(40.0));
    }

    #[test]
    fn working_height_amo() {
        let p = FourierPotential::amo();
        let w = find_working_height(&p, 100.0, 0.0, 0.19, 32.0).unwrap();
        assert!(w.band.0 >= 0.095 && w.band.1 <= 0.19 + 1e-12);
        let exact = 200.0 * (2.0 * PI * w.y_star).sinh();
        assert!((w.min_modulus - exact).abs() < 1e-6 * exact);
        assert!(w.min_modulus > 100f64.powf(0.2));
        assert!(find_working_height(&p, 100.0, 200.0, 0.19, 32.0).is_ok());
        assert!(matches!(find_working_height(&p, 10.0, 0.0, 0.19, 32.0), Err(Error::Contract(_))));
    }

    #[test]
    fn log_integral_bound_monotone_in_delta() {
        let b: Vec<f64> = [0.02, 0.05, 0.1].iter().map(|&d| log_integral_bound_value(2, 8.0, d)).collect();
        assert!(b[0] < b[1] && b[1] < b[2]);
    }
}
