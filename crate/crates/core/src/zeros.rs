//! Zeros of `f - mu` on horizontal strips, zero counts, zero-free parts,
//! the `N-hat` / `beta-hat` family extremes and winding numbers.
//!
//! With `w = e^{2 pi i z}` a trigonometric polynomial of degree `d` becomes
//! `w^{-d} P(w)` for an ordinary polynomial `P` of degree at most `2d`, so the
//! zeros in the strip are exactly the roots of `P` in the annulus
//! `e^{-2 pi h} <= |w| <= e^{2 pi h}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::poly::Poly;
use crate::potential::FourierPotential;

const TWO_PI: f64 = 2.0 * PI;

/// Clustering radius (relative, in the `w` plane) used to merge roots into
/// multiplicities.
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-7;

/// `2 e^{2 pi} + 2`, the normalization constant of the zero-free part.
pub fn zero_factor_bound() -> f64 {
    2.0 * TWO_PI.exp() + 2.0
}

/// One zero of `f - mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    /// Location in the fundamental domain `0 <= Re z < 1`.
    pub z: Complex64,
    pub multiplicity: usize,
    /// The corresponding root `w = e^{2 pi i z}`.
    #[serde(skip)]
    pub w: Complex64,
}

impl Zero {
    pub fn height(&self) -> f64 {
        self.z.im
    }
}

/// All roots of `w^d (f - mu)`, split into those inside the strip `|Im z| <= h`
/// and those beyond it.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSet {
    pub mu: Complex64,
    pub strip_height: f64,
    /// Zeros with `|Im z| <= h`, sorted by height then real part.
    pub zeros: Vec<Zero>,
    /// Roots with `|Im z| > h` (kept for Jensen and winding identities).
    pub far_zeros: Vec<Zero>,
    /// Degree `d` of the potential.
    pub potential_degree: usize,
    /// Order of the root of `P` at `w = 0`.
    pub zero_root_order: usize,
    /// Leading coefficient of `P`.
    #[serde(skip)]
    pub leading: Complex64,
    /// Degree of `P` after removing the `w = 0` roots.
    pub root_count: usize,
}

impl ZeroSet {
    pub fn total_multiplicity(&self) -> usize {
        self.zeros
            .iter()
            .chain(self.far_zeros.iter())
            .map(|z| z.multiplicity)
            .sum()
    }

    pub fn all_zeros(&self) -> impl Iterator<Item = &Zero> {
        self.zeros.iter().chain(self.far_zeros.iter())
    }

    /// Number of zeros (with multiplicity) whose height lies in `interval`.
    pub fn count(&self, interval: HeightInterval) -> usize {
        self.all_zeros()
            .filter(|z| interval.contains(z.height()))
            .map(|z| z.multiplicity)
            .sum()
    }

    /// Distinct heights of the zeros inside the strip.
    pub fn heights(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.height()).collect()
    }
}

/// An interval of heights with per-endpoint closure flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl HeightInterval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    /// `(lo, hi]`
    pub fn left_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: true }
    }

    pub fn contains(&self, y: f64) -> bool {
        let above = if self.lo_closed { y >= self.lo } else { y > self.lo };
        let below = if self.hi_closed { y <= self.hi } else { y < self.hi };
        above && below
    }
}

/// Maps a nonzero `w` to `z = log(w) / (2 pi i)` with `0 <= Re z < 1`.
pub fn w_to_z(w: Complex64) -> Complex64 {
    let x = w.arg() / TWO_PI;
    Complex64::new(x - x.floor(), -w.norm().ln() / TWO_PI)
}

/// Zeros of `f - mu` with the default clustering radius.
pub fn laurent_roots(p: &FourierPotential, mu: Complex64) -> Result<ZeroSet> {
    laurent_roots_with(p, mu, DEFAULT_CLUSTER_RADIUS)
}

/// Zeros of `f - mu`: companion-matrix roots of `w^d (f - mu)`, Newton
/// polished, clustered into multiplicities, mapped to the fundamental domain.
pub fn laurent_roots_with(p: &FourierPotential, mu: Complex64, cluster_radius: f64) -> Result<ZeroSet> {
    let poly = p.laurent_poly(mu);
    if poly.is_zero() {
        return Err(Error::Degenerate(format!("f - ({mu}) vanishes identically")));
    }
    let s = poly.zero_root_order();
    let n = poly.degree();
    let roots = poly.roots()?;
    debug_assert_eq!(roots.len(), n - s);

    let clusters = cluster_roots(&roots, cluster_radius);
    let h = p.strip_height();
    let scale = 1.0 + p.norm_bound(h);
    let mut zeros = Vec::new();
    let mut far = Vec::new();
    for (w, m) in clusters {
        let z = w_to_z(w);
        let zero = Zero { z, multiplicity: m, w };
        if z.im.abs() <= h {
            let res = (p.eval_unchecked(z) - mu).norm();
            if res > 1e-8 * scale {
                return Err(Error::Numeric(format!(
                    "root at z = {z} has residual {res:e} above tolerance"
                )));
            }
            zeros.push(zero);
        } else {
            far.push(zero);
        }
    }
    let by_height = |a: &Zero, b: &Zero| {
        a.z.im
            .partial_cmp(&b.z.im)
            .unwrap()
            .then(a.z.re.partial_cmp(&b.z.re).unwrap())
    };
    zeros.sort_by(by_height);
    far.sort_by(by_height);
    Ok(ZeroSet {
        mu,
        strip_height: h,
        zeros,
        far_zeros: far,
        potential_degree: p.degree(),
        zero_root_order: s,
        leading: poly.leading(),
        root_count: n - s,
    })
}

/// Greedy single-linkage clustering; each cluster is replaced by its mean.
fn cluster_roots(roots: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let tol = radius * roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut out: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match out.iter_mut().find(|(root, _, _)| *root == r) {
            Some(entry) => {
                entry.1 += roots[i];
                entry.2 += 1;
            }
            None => out.push((r, roots[i], 1)),
        }
    }
    out.into_iter().map(|(_, sum, m)| (sum / m as f64, m)).collect()
}

/// Zero count over an interval of heights (multiplicities included).
pub fn count_zeros(zs: &ZeroSet, interval: HeightInterval) -> Result<usize> {
    if !(interval.lo <= interval.hi) {
        return Err(Error::Contract(format!(
            "malformed interval [{}, {}]",
            interval.lo, interval.hi
        )));
    }
    Ok(zs.count(interval))
}

/// The zero-free part `g_{2 eps}(f - mu)`, prepared for repeated evaluation.
///
/// `g(z) = (2e^{2pi}+2)^{N} (f(z) - mu) / prod_j (e^{2 pi i z} - e^{2 pi i z_j})^{m_j}`
/// where the product runs over the zeros with `|Im z_j| < 2 eps` and `N` is
/// their total multiplicity. The division is carried out exactly on the
/// polynomial, so `g` is also defined at the removed zeros.
#[derive(Debug, Clone)]
pub struct ZeroFreePart {
    quotient: Poly,
    degree: usize,
    /// Total multiplicity of the removed zeros.
    pub removed: usize,
    /// Removed zeros (for re-multiplication checks).
    pub removed_zeros: Vec<Zero>,
    normalization: f64,
    /// Height of the closed strip on which evaluation is allowed.
    pub valid_height: f64,
}

impl ZeroFreePart {
    /// Removes the zeros selected by `keep` (true = divide out) from `f - mu`.
    pub fn build<F: Fn(&Zero) -> bool>(
        p: &FourierPotential,
        zs: &ZeroSet,
        remove: F,
        normalized: bool,
        valid_height: f64,
    ) -> Result<Self> {
        let mut quotient = p.laurent_poly(zs.mu);
        let mut removed = 0;
        let mut removed_zeros = Vec::new();
        for zero in zs.all_zeros().filter(|z| remove(z)) {
            for _ in 0..zero.multiplicity {
                let bound = quotient.modulus_bound(zero.w.norm()).max(1e-300);
                let (q, rem) = quotient.deflate(zero.w);
                if rem.norm() > 1e-7 * bound {
                    return Err(Error::Numeric(format!(
                        "deflation by zero at z = {} left residue {:e} (scale {:e})",
                        zero.z,
                        rem.norm(),
                        bound
                    )));
                }
                quotient = q;
                removed += 1;
            }
            removed_zeros.push(*zero);
        }
        let normalization = if normalized {
            zero_factor_bound().powi(removed as i32)
        } else {
            1.0
        };
        Ok(Self {
            quotient,
            degree: p.degree(),
            removed,
            removed_zeros,
            normalization,
            valid_height,
        })
    }

    /// `g_{2 eps}(f - mu)` for `0 < 2 eps <= h`: removes zeros in the open
    /// strip `|Im z| < 2 eps`.
    pub fn for_strip(p: &FourierPotential, zs: &ZeroSet, eps: f64) -> Result<Self> {
        let two_eps = 2.0 * eps;
        if !(eps > 0.0) || two_eps > p.strip_height() {
            return Err(Error::Domain(format!(
                "need 0 < 2 eps <= h, got eps = {eps}, h = {}",
                p.strip_height()
            )));
        }
        Self::build(p, zs, |z| z.height().abs() < two_eps, true, two_eps)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.im.abs() > self.valid_height * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "|Im z| = {} outside the strip of height {}",
                z.im.abs(),
                self.valid_height
            )));
        }
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let w = (Complex64::i() * TWO_PI * Complex64::new(z.re - z.re.floor(), z.im)).exp();
        self.normalization * self.quotient.eval(w) * w.powi(-(self.degree as i32))
    }

    /// Re-multiplies by the removed factors; equals `f(z) - mu`.
    pub fn remultiply(&self, z: Complex64) -> Complex64 {
        let w = (Complex64::i() * TWO_PI * z).exp();
        let prod = self
            .removed_zeros
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, zero| {
                acc * (w - zero.w).powi(zero.multiplicity as i32)
            });
        self.eval_unchecked(z) * prod / self.normalization
    }
}

/// `g_{2 eps}(f - mu)(z)`.
pub fn zero_free_part_eval(p: &FourierPotential, mu: Complex64, eps: f64, z: Complex64) -> Result<Complex64> {
    if z.im.abs() > 2.0 * eps {
        return Err(Error::Domain(format!("|Im z| = {} exceeds 2 eps = {}", z.im.abs(), 2.0 * eps)));
    }
    let zs = laurent_roots(p, mu)?;
    ZeroFreePart::for_strip(p, &zs, eps)?.eval(z)
}

/// Result of a grid minimization of `|g|` over a strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub value: f64,
    pub argmin: Complex64,
    pub nx: usize,
    pub ny: usize,
}

fn check_rho(p: &FourierPotential, rho: f64) -> Result<()> {
    let limit = p.strip_height().min(1.0) / 2.0;
    if !(rho > 0.0 && rho < limit) {
        return Err(Error::Contract(format!(
            "rho must satisfy 0 < rho < min(h,1)/2 = {limit}, got {rho}"
        )));
    }
    Ok(())
}

/// Minimum of `|g|` over the closed strip `|Im z| <= height`: an `nx x ny`
/// grid (boundary lines included), then golden-section refinement along the
/// two boundary lines and through the best interior grid cell.
pub fn minimize_modulus<G: Fn(Complex64) -> Complex64>(g: &G, height: f64, nx: usize, ny: usize) -> BetaEstimate {
    let dx = 1.0 / nx as f64;
    let mut best = f64::INFINITY;
    let mut arg = Complex64::new(0.0, 0.0);
    for j in 0..ny {
        let y = if ny == 1 { 0.0 } else { -height + 2.0 * height * j as f64 / (ny - 1) as f64 };
        for i in 0..nx {
            let z = Complex64::new(i as f64 * dx, y);
            let v = g(z).norm();
            if v < best {
                best = v;
                arg = z;
            }
        }
    }
    let mut lines = vec![arg.im];
    if height > 0.0 {
        lines.push(height);
        lines.push(-height);
    }
    for y in lines {
        let (v, x) = crate::potential::minimize_periodic(&|x| g(Complex64::new(x, y)).norm(), nx);
        if v < best {
            best = v;
            arg = Complex64::new(x, y);
        }
    }
    BetaEstimate { value: best, argmin: arg, nx, ny }
}

/// `beta_rho(f - mu) = min over T_rho of |g_{2 rho}(f - mu)|` (1024 x 65 grid).
pub fn beta(p: &FourierPotential, mu: f64, rho: f64) -> Result<BetaEstimate> {
    check_rho(p, rho)?;
    let zs = laurent_roots(p, Complex64::new(mu, 0.0))?;
    beta_from_zeros(p, &zs, rho)
}

pub(crate) fn beta_from_zeros(p: &FourierPotential, zs: &ZeroSet, rho: f64) -> Result<BetaEstimate> {
    let g = ZeroFreePart::for_strip(p, zs, rho)?;
    Ok(minimize_modulus(&|z| g.eval_unchecked(z), rho, 1024, 65))
}

/// One row of the mu scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuScanRecord {
    pub mu: f64,
    /// `N_{2 rho}(f - mu)` on the closed strip.
    pub count: usize,
    /// `beta_rho(f - mu)`.
    pub beta: f64,
}

/// Maximized zero count and minimized zero-free modulus over the family `f - mu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HatQuantities {
    pub rho: f64,
    pub n_hat: usize,
    pub beta_hat: f64,
    pub witness_mu_n: f64,
    pub witness_mu_beta: f64,
    /// `[lo, hi]` scanned; beyond it `f - mu` has no zeros in the closed strip of height `2 rho`.
    pub scan_range: (f64, f64),
    pub grid_points: usize,
    pub jump_resolution: f64,
    pub mu_scan_record: Vec<MuScanRecord>,
}

/// Options for [`hat_quantities`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuGridSpec {
    pub points: usize,
    pub jump_resolution: f64,
}

impl Default for MuGridSpec {
    fn default() -> Self {
        Self { points: 401, jump_resolution: 1e-6 }
    }
}

/// Scans `mu` over `[min f - 1, max f + 1]` widened to `[-|f|_{2 rho}, |f|_{2 rho}]`,
/// adds the critical values and bisects every zero-count jump, and returns
/// the max count and min `beta` seen.
pub fn hat_quantities(p: &FourierPotential, rho: f64, spec: MuGridSpec) -> Result<HatQuantities> {
    check_rho(p, rho)?;
    if !p.is_real_analytic() {
        return Err(Error::Contract("hat quantities need a real-analytic potential".into()));
    }
    if p.is_constant() {
        return Err(Error::Degenerate(
            "constant potential: f - mu vanishes identically for mu = c_0".into(),
        ));
    }
    if spec.points < 2 {
        return Err(Error::Contract("mu grid needs at least two points".into()));
    }
    let stats = p.stats(0.0)?;
    let sup2 = p.sup_norm(2.0 * rho)?;
    // Past |mu| > |f|_{2 rho} no zero can sit in the closed strip.
    let reach = sup2 * (1.0 + 1e-6) + 1e-9;
    let lo = (stats.min_torus - 1.0).min(-reach);
    let hi = (stats.max_torus + 1.0).max(reach);

    let mut mus: Vec<f64> = (0..spec.points)
        .map(|i| lo + (hi - lo) * i as f64 / (spec.points - 1) as f64)
        .collect();
    mus.extend(stats.critical_values.iter().copied());
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    mus.dedup();

    let strip = HeightInterval::closed(-2.0 * rho, 2.0 * rho);
    let count_at = |mu: f64| -> Result<usize> {
        Ok(laurent_roots(p, Complex64::new(mu, 0.0))?.count(strip))
    };
    let counts = par::try_map(&mus, |&mu| count_at(mu))?;

    // Bisect every jump between neighbours down to the requested width.
    let jumps: Vec<(f64, usize, f64, usize)> = mus
        .windows(2)
        .zip(counts.windows(2))
        .filter(|(_, c)| c[0] != c[1])
        .map(|(m, c)| (m[0], c[0], m[1], c[1]))
        .collect();
    let refined = par::try_map(&jumps, |&(mut a, ca, mut b, cb)| -> Result<Vec<f64>> {
        let mut extra = Vec::new();
        while b - a > spec.jump_resolution {
            let mid = 0.5 * (a + b);
            let cm = count_at(mid)?;
            extra.push(mid);
            if cm == ca {
                a = mid;
            } else if cm == cb {
                b = mid;
            } else {
                // A third value inside the bracket: keep the side with the
                // larger count so a maximum is never skipped.
                if cm > ca.max(cb) {
                    break;
                }
                a = mid;
            }
        }
        Ok(extra)
    })?;
    mus.extend(refined.into_iter().flatten());
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    mus.dedup();

    let records = par::try_map(&mus, |&mu| -> Result<MuScanRecord> {
        let zs = laurent_roots(p, Complex64::new(mu, 0.0))?;
        let count = zs.count(strip);
        let b = beta_from_zeros(p, &zs, rho)?;
        Ok(MuScanRecord { mu, count, beta: b.value })
    })?;

    let (mut n_hat, mut wn) = (0usize, records[0].mu);
    let (mut beta_hat, mut wb) = (f64::INFINITY, records[0].mu);
    for r in &records {
        if r.count > n_hat {
            n_hat = r.count;
            wn = r.mu;
        }
        if r.beta < beta_hat {
            beta_hat = r.beta;
            wb = r.mu;
        }
    }
    Ok(HatQuantities {
        rho,
        n_hat,
        beta_hat,
        witness_mu_n: wn,
        witness_mu_beta: wb,
        scan_range: (lo, hi),
        grid_points: spec.points,
        jump_resolution: spec.jump_resolution,
        mu_scan_record: records,
    })
}

/// Winding number of a closed curve with the residue from the nearest integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub index: i64,
    pub residue: f64,
    pub samples: usize,
}

/// Winding number around 0 of `x -> g(x)`, `x in [0, 1)`.
///
/// Sampling doubles from 256 points until every phase increment is below
/// `pi/2`; the curve must stay away from the origin.
pub fn winding_number<G: Fn(f64) -> Complex64>(g: G) -> Result<Winding> {
    const MAX_SAMPLES: usize = 1 << 21;
    let mut n = 256;
    loop {
        let vals: Vec<Complex64> = (0..n).map(|i| g(i as f64 / n as f64)).collect();
        let max_mod = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let min_mod = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if !(min_mod > 1e-12 * max_mod.max(1e-300)) {
            return Err(Error::Numeric(format!(
                "curve passes within {min_mod:e} of the origin (ill-conditioned winding)"
            )));
        }
        let mut total = 0.0;
        let mut worst = 0.0f64;
        for i in 0..n {
            let a = vals[i];
            let b = vals[(i + 1) % n];
            let d = (b / a).arg();
            worst = worst.max(d.abs());
            total += d;
        }
        if worst < PI / 2.0 {
            let turns = total / TWO_PI;
            let index = turns.round();
            let residue = (turns - index).abs();
            if residue >= 0.05 {
                return Err(Error::Numeric(format!("winding residue {residue} too large")));
            }
            return Ok(Winding { index: index as i64, residue, samples: n });
        }
        if n >= MAX_SAMPLES {
            return Err(Error::Numeric(format!(
                "phase increment {worst} >= pi/2 after {n} samples"
            )));
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amo() -> FourierPotential {
        FourierPotential::amo()
    }

    fn real(mu: f64) -> Complex64 {
        Complex64::new(mu, 0.0)
    }

    #[test]
    fn amo_real_zeros() {
        let zs = laurent_roots(&amo(), real(0.0)).unwrap();
        assert_eq!(zs.zeros.len(), 2);
        let mut xs: Vec<f64> = zs.zeros.iter().map(|z| z.z.re).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((xs[0] - 0.25).abs() < 1e-14 && (xs[1] - 0.75).abs() < 1e-14);
        assert!(zs.zeros.iter().all(|z| z.multiplicity == 1 && z.z.im.abs() < 1e-14));
    }

    #[test]
    fn amo_complex_zeros_at_mu_three() {
        let zs = laurent_roots(&amo(), real(3.0)).unwrap();
        let expected = ((3.0 + 5f64.sqrt()) / 2.0).ln() / TWO_PI;
        assert_eq!(zs.zeros.len(), 2);
        assert!((zs.zeros[0].z.im + expected).abs() < 1e-13);
        assert!((zs.zeros[1].z.im - expected).abs() < 1e-13);
        assert!((expected - 0.15317).abs() < 1e-5);
        assert_eq!(count_zeros(&zs, HeightInterval::closed(-0.1, 0.1)).unwrap(), 0);
        assert_eq!(count_zeros(&zs, HeightInterval::closed(-0.2, 0.2)).unwrap(), 2);
    }

    #[test]
    fn double_zero_at_mu_two() {
        let zs = laurent_roots(&amo(), real(2.0)).unwrap();
        assert_eq!(zs.zeros.len(), 1);
        assert_eq!(zs.zeros[0].multiplicity, 2);
        assert!(zs.zeros[0].z.norm() < 1e-7 || (zs.zeros[0].z.re - 1.0).abs() < 1e-7);
    }

    #[test]
    fn endpoint_semantics() {
        let zs = laurent_roots(&amo(), real(0.0)).unwrap();
        assert_eq!(count_zeros(&zs, HeightInterval::left_open(0.0, 0.5)).unwrap(), 0);
        assert_eq!(count_zeros(&zs, HeightInterval::closed(0.0, 0.5)).unwrap(), 2);
        assert!(count_zeros(&zs, HeightInterval::closed(0.5, 0.0)).is_err());
    }

    #[test]
    fn constant_zero_set_is_empty_and_identity_rejected() {
        let f = FourierPotential::constant(5.0, 0.5).unwrap();
        let zs = laurent_roots(&f, real(0.0)).unwrap();
        assert_eq!(zs.total_multiplicity(), 0);
        assert!(matches!(laurent_roots(&f, real(5.0)), Err(Error::Degenerate(_))));
        let v = zero_free_part_eval(&f, real(0.0), 0.1, Complex64::new(0.3, 0.1)).unwrap();
        assert!((v - real(5.0)).norm() < 1e-14);
        assert!((beta(&f, 0.0, 0.2).unwrap().value - 5.0).abs() < 1e-14);
    }

    #[test]
    fn zero_free_part_of_amo_does_not_vanish() {
        let f = amo();
        let zs = laurent_roots(&f, real(0.0)).unwrap();
        let g = ZeroFreePart::for_strip(&f, &zs, 0.1).unwrap();
        assert_eq!(g.removed, 2);
        let mut min = f64::INFINITY;
        for i in 0..512 {
            for j in 0..33 {
                let z = Complex64::new(i as f64 / 512.0, -0.2 + 0.4 * j as f64 / 32.0);
                min = min.min(g.eval(z).unwrap().norm());
            }
        }
        // (2e^{2pi}+2)^2 |w^{-1}| >= (2e^{2pi}+2)^2 e^{-0.4 pi}
        let c = zero_factor_bound();
        assert!((min - c * c * (-0.4 * PI).exp()).abs() < 1e-6 * min);
    }

    #[test]
    fn remultiplication_recovers_f_minus_mu() {
        let f = FourierPotential::bichromatic();
        for &mu in &[0.0, 1.3, -0.7, 2.5] {
            let zs = laurent_roots(&f, real(mu)).unwrap();
            let g = ZeroFreePart::for_strip(&f, &zs, 0.2).unwrap();
            for i in 0..100 {
                let z = Complex64::new(0.01 * i as f64 + 0.003, -0.35 + 0.007 * i as f64);
                let want = f.eval(z).unwrap() - mu;
                let got = g.remultiply(z);
                assert!((got - want).norm() <= 1e-9 * want.norm().max(1e-3), "mu {mu} z {z}");
            }
        }
    }

    #[test]
    fn beta_is_translation_invariant() {
        let f = FourierPotential::bichromatic();
        let a = beta(&f, 0.4, 0.2).unwrap().value;
        let b = beta(&f.translated(1.0 / 3.0), 0.4, 0.2).unwrap().value;
        assert!((a - b).abs() < 1e-6 * a);
    }

    #[test]
    fn beta_rejects_bad_rho() {
        assert!(matches!(beta(&amo(), 0.0, 0.3), Err(Error::Contract(_))));
    }

    #[test]
    fn hat_quantities_of_amo() {
        let hq = hat_quantities(&amo(), 0.2, MuGridSpec::default()).unwrap();
        assert_eq!(hq.n_hat, 2);
        assert!(hq.mu_scan_record.iter().all(|r| r.count <= hq.n_hat));
        assert!(hq.mu_scan_record.iter().all(|r| r.beta >= hq.beta_hat));
        // beta-hat is attained where the zero pair leaves the open strip of
        // height 0.4, i.e. at |mu| = 2 cosh(0.8 pi); there g = f - mu and
        // min over T_0.2 of |f - mu| = |mu| - 2 cosh(0.4 pi).
        let edge = 2.0 * (0.8 * PI).cosh() - 2.0 * (0.4 * PI).cosh();
        assert!((hq.beta_hat - edge).abs() < 1e-3, "{} vs {}", hq.beta_hat, edge);
    }

    #[test]
    fn hat_quantities_reject_constants() {
        let f = FourierPotential::constant(5.0, 0.5).unwrap();
        assert!(matches!(hat_quantities(&f, 0.2, MuGridSpec::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn winding_examples() {
        let e = |k: f64| move |x: f64| Complex64::from_polar(1.0, TWO_PI * k * x);
        assert_eq!(winding_number(e(1.0)).unwrap().index, 1);
        assert_eq!(winding_number(e(-2.0)).unwrap().index, -2);
        let shifted = |x: f64| Complex64::new(2.0, 0.0) + Complex64::from_polar(1.0, TWO_PI * x);
        assert_eq!(winding_number(shifted).unwrap().index, 0);
        let through = |x: f64| Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, TWO_PI * x);
        assert!(winding_number(through).is_err());
    }
}
