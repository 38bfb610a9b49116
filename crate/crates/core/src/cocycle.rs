//! Transfer-matrix dynamics over the rotation `x -> x + alpha`.
//!
//! Lyapunov exponents are phase averages of `(1/n) log ||A^(n)(x)||` over a
//! uniform grid of `M` phases, evaluated at `n` and `2n` in one pass and
//! combined as `2 L_{2n} - L_n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::constants;
use crate::error::{Error, Result};
use crate::par;
use crate::potential::{minimize_periodic, FourierPotential};

const TWO_PI: f64 = 2.0 * PI;

/// Running products are rescaled once an entry leaves `[1e-100, 1e100]`.
pub const RENORM_THRESHOLD: f64 = 1e100;
/// Phase recurrences are resynchronised with exact exponentials this often.
const RESYNC_EVERY: usize = 64;
/// Grid used for `inf_x |g(x + iy)|`.
pub const MIN_MODULUS_GRID: usize = 4096;
/// Containment slack for the splitting bounds.
pub const DEFAULT_CONTAINMENT_TOL: f64 = 1e-3;

pub fn golden_mean() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// 2x2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mat2([[o, z], [z, o]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|c| c.re.abs().max(c.im.abs()))
            .fold(0.0, f64::max)
    }

    fn scale(&mut self, s: f64) {
        for c in self.0.iter_mut().flatten() {
            *c *= s;
        }
    }

    /// Largest singular value, in closed form:
    /// `s^2 = S/2 + sqrt(S^2/4 - |det|^2)` with `S` the squared Frobenius norm.
    pub fn norm(&self) -> f64 {
        let s = self.max_abs();
        if s == 0.0 || !s.is_finite() {
            return s;
        }
        let mut m = *self;
        m.scale(1.0 / s);
        let fro: f64 = m.0.iter().flatten().map(|c| c.norm_sqr()).sum();
        let det = m.det().norm();
        let disc = (0.25 * fro * fro - det * det).max(0.0);
        s * (0.5 * fro + disc.sqrt()).sqrt()
    }
}

/// A cocycle whose matrix at phase `x` depends on `x` only through one
/// sampled analytic function `v = g(x + iy)`.
pub trait MatrixCocycle: Sync {
    fn alpha(&self) -> f64;
    fn height(&self) -> f64;
    fn sampled(&self) -> &FourierPotential;
    fn matrix(&self, v: Complex64) -> Mat2;

    /// `A(v) * p`; override for structured matrices.
    fn left_apply(&self, v: Complex64, p: &Mat2) -> Mat2 {
        self.matrix(v).mul(p)
    }
}

/// Samples `g(x0 + j alpha + iy)` for `j = 0, 1, ...` by a rotation recurrence.
struct Orbit<'a> {
    g: &'a FourierPotential,
    alpha: f64,
    x0: f64,
    y: f64,
    j: usize,
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
    rot_pos: Vec<Complex64>,
    rot_neg: Vec<Complex64>,
}

impl<'a> Orbit<'a> {
    fn new(g: &'a FourierPotential, alpha: f64, x0: f64, y: f64) -> Self {
        let d = g.degree();
        let r = Complex64::from_polar(1.0, TWO_PI * alpha);
        let mut rot_pos = vec![Complex64::new(1.0, 0.0); d + 1];
        for k in 1..=d {
            rot_pos[k] = rot_pos[k - 1] * r;
        }
        let rot_neg = rot_pos.iter().map(|c| c.conj()).collect();
        let mut o = Self {
            g,
            alpha,
            x0,
            y,
            j: 0,
            pos: vec![Complex64::new(0.0, 0.0); d + 1],
            neg: vec![Complex64::new(0.0, 0.0); d + 1],
            rot_pos,
            rot_neg,
        };
        o.resync();
        o
    }

    fn resync(&mut self) {
        let x = (self.x0 + self.j as f64 * self.alpha).rem_euclid(1.0);
        let w = (Complex64::i() * TWO_PI * Complex64::new(x, self.y)).exp();
        let winv = w.inv();
        self.pos[0] = Complex64::new(1.0, 0.0);
        self.neg[0] = Complex64::new(1.0, 0.0);
        for k in 1..self.pos.len() {
            self.pos[k] = self.pos[k - 1] * w;
            self.neg[k] = self.neg[k - 1] * winv;
        }
    }

    fn value(&self) -> Complex64 {
        let mut acc = self.g.coeff(0);
        for k in 1..self.pos.len() {
            let ki = k as i64;
            acc += self.g.coeff(ki) * self.pos[k] + self.g.coeff(-ki) * self.neg[k];
        }
        acc
    }

    fn advance(&mut self) {
        self.j += 1;
        if self.j % RESYNC_EVERY == 0 {
            self.resync();
        } else {
            for k in 1..self.pos.len() {
                self.pos[k] *= self.rot_pos[k];
                self.neg[k] *= self.rot_neg[k];
            }
        }
    }
}

/// `(alpha, lambda, E, y, f)`: the cocycle `[[E - lambda f(x + iy), -1], [1, 0]]`.
#[derive(Debug, Clone, Serialize)]
pub struct CocycleSpec {
    pub alpha: f64,
    pub lambda: f64,
    pub energy: f64,
    pub y: f64,
    pub potential: FourierPotential,
}

impl CocycleSpec {
    pub fn new(potential: FourierPotential, alpha: f64, lambda: f64, energy: f64, y: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !lambda.is_finite() || !energy.is_finite() {
            return Err(Error::Domain("lambda and E must be finite".into()));
        }
        check_height(&potential, y)?;
        Ok(Self {
            alpha,
            lambda,
            energy,
            y,
            potential,
        })
    }

    pub fn at_height(&self, y: f64) -> Result<Self> {
        check_height(&self.potential, y)?;
        Ok(Self { y, ..self.clone() })
    }

    /// `Some((p, q))` if `alpha` lies within `min(1e-12, 0.1/q^2)` of a
    /// rational `p/q` with `q <= 1e6`.
    pub fn rationality_warning(&self) -> Option<(u64, u64)> {
        rational_approximation(self.alpha, 1e-12, 1_000_000)
    }

    /// The factorized cocycle `D` with `g = E - lambda f(x + iy)`; `sign`
    /// multiplies the upper-right entry.
    pub fn factorized(&self, sign: f64) -> SplittingCocycle {
        SplittingCocycle {
            g: self.potential.affine(-self.lambda, self.energy),
            alpha: self.alpha,
            y: self.y,
            sign,
        }
    }
}

fn check_height(p: &FourierPotential, y: f64) -> Result<()> {
    if !(y.abs() <= p.strip_height() * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!(
            "|y| = {} exceeds strip height {}",
            y.abs(),
            p.strip_height()
        )));
    }
    Ok(())
}

/// First continued-fraction convergent `p/q` with `q <= max_q` and
/// `|alpha - p/q| <= min(tol, 0.1/q^2)`. The second cap keeps badly
/// approximable numbers such as the golden mean, whose convergents sit near
/// `1/(sqrt(5) q^2)`, from being reported.
pub fn rational_approximation(alpha: f64, tol: f64, max_q: u64) -> Option<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = alpha;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as u64;
        let (p2, q2) = (ai.checked_mul(p1)?.checked_add(p0)?, ai.checked_mul(q1)?.checked_add(q0)?);
        if q2 > max_q {
            return None;
        }
        let q = q2 as f64;
        if (alpha - p2 as f64 / q).abs() <= tol.min(0.1 / (q * q)) {
            return Some((p2, q2));
        }
        let frac = x - a;
        if frac == 0.0 {
            return None;
        }
        x = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

impl MatrixCocycle for CocycleSpec {
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn height(&self) -> f64 {
        self.y
    }
    fn sampled(&self) -> &FourierPotential {
        &self.potential
    }
    fn matrix(&self, v: Complex64) -> Mat2 {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mat2([[self.energy - self.lambda * v, -o], [o, z]])
    }
    fn left_apply(&self, v: Complex64, p: &Mat2) -> Mat2 {
        let a = self.energy - self.lambda * v;
        let r = &p.0;
        Mat2([[a * r[0][0] - r[1][0], a * r[0][1] - r[1][1]], [r[0][0], r[0][1]]])
    }
}

/// `D(x) = (1, sign/g; 1/g, 0)` with `g` sampled at height `y`.
#[derive(Debug, Clone)]
pub struct SplittingCocycle {
    pub g: FourierPotential,
    pub alpha: f64,
    pub y: f64,
    pub sign: f64,
}

impl MatrixCocycle for SplittingCocycle {
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn height(&self) -> f64 {
        self.y
    }
    fn sampled(&self) -> &FourierPotential {
        &self.g
    }
    fn matrix(&self, v: Complex64) -> Mat2 {
        let inv = v.inv();
        Mat2([[Complex64::new(1.0, 0.0), inv * self.sign], [inv, Complex64::new(0.0, 0.0)]])
    }
    fn left_apply(&self, v: Complex64, p: &Mat2) -> Mat2 {
        let inv = v.inv();
        let r = &p.0;
        Mat2([
            [r[0][0] + inv * self.sign * r[1][0], r[0][1] + inv * self.sign * r[1][1]],
            [inv * r[0][0], inv * r[0][1]],
        ])
    }
}

/// `A(x + iy)`.
pub fn transfer_matrix(c: &CocycleSpec, x: f64) -> Result<Mat2> {
    let v = c.potential.eval(Complex64::new(x, c.y))?;
    Ok(c.matrix(v))
}

/// `log ||A^(n)(x)||` at each checkpoint in `marks` (ascending; the last is the length).
fn lognorm_checkpoints<C: MatrixCocycle + ?Sized>(c: &C, x: f64, marks: &[usize]) -> Result<Vec<f64>> {
    let mut orbit = Orbit::new(c.sampled(), c.alpha(), x, c.height());
    let mut p = Mat2::identity();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(marks.len());
    let mut next = 0;
    let last = *marks.last().unwrap_or(&0);
    for step in 1..=last {
        p = c.left_apply(orbit.value(), &p);
        orbit.advance();
        let s = p.max_abs();
        if !(s <= RENORM_THRESHOLD && s >= 1.0 / RENORM_THRESHOLD) {
            let nrm = p.norm();
            if !(nrm.is_finite() && nrm > 0.0) {
                return Err(Error::Numeric(format!(
                    "transfer-matrix product degenerated at step {step} (phase {x})"
                )));
            }
            p.scale(1.0 / nrm);
            acc += nrm.ln();
        }
        if step == marks[next] {
            let v = acc + p.norm().ln();
            if !v.is_finite() {
                return Err(Error::Numeric(format!("non-finite log-norm at step {step} (phase {x})")));
            }
            out.push(v);
            next += 1;
        }
    }
    Ok(out)
}

/// `log ||A^(n)(x)||`.
pub fn cocycle_product_lognorm<C: MatrixCocycle + ?Sized>(c: &C, x: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Contract("n must be at least 1".into()));
    }
    Ok(lognorm_checkpoints(c, x, &[n])?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub n: usize,
    pub m: usize,
    /// `(L_n, L_{2n})`.
    pub raw_pairs: (f64, f64),
    pub extrapolated: f64,
    pub spread: f64,
}

/// Phase-grid estimate of the Lyapunov exponent.
pub fn lyapunov_exponent<C: MatrixCocycle + ?Sized>(c: &C, n: usize, m: usize) -> Result<LyapunovEstimate> {
    if n < 2 {
        return Err(Error::Contract(format!("n must be at least 2, got {n}")));
    }
    if m < 16 {
        return Err(Error::Contract(format!("M must be at least 16, got {m}")));
    }
    let rows = par::map_range(m, |j| lognorm_checkpoints(c, j as f64 / m as f64, &[n, 2 * n]));
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let ln: Vec<f64> = rows.iter().map(|r| r[0] / n as f64).collect();
    let l2n: Vec<f64> = rows.iter().map(|r| r[1] / (2 * n) as f64).collect();
    let l_n = par::pairwise_sum(&ln) / m as f64;
    let l_2n = par::pairwise_sum(&l2n) / m as f64;
    let extrapolated = 2.0 * l_2n - l_n;
    Ok(LyapunovEstimate {
        value: extrapolated,
        n,
        m,
        raw_pairs: (l_n, l_2n),
        extrapolated,
        spread: (l_2n - extrapolated).abs(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfilePoint {
    pub y: f64,
    pub estimate: LyapunovEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub points: Vec<ProfilePoint>,
    /// Largest excess of `L(y_i)` over the chord through its neighbours.
    pub convexity_excess: f64,
    /// Largest `|L(y) - L(-y)|` over mirrored grid pairs, if any.
    pub evenness_defect: Option<f64>,
    pub convex_ok: bool,
    pub even_ok: bool,
}

pub const CONVEXITY_TOL: f64 = 1e-3;
pub const EVENNESS_TOL: f64 = 1e-4;

/// `L(alpha, A_{lambda,E;y})` along `heights`, with convexity and evenness checks.
pub fn complexified_profile(c: &CocycleSpec, heights: &[f64], n: usize, m: usize) -> Result<ProfileReport> {
    let mut ys = heights.to_vec();
    ys.sort_by(|a, b| a.total_cmp(b));
    let specs: Vec<CocycleSpec> = ys.iter().map(|&y| c.at_height(y)).collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(ys.len());
    for (y, s) in ys.iter().zip(&specs) {
        points.push(ProfilePoint {
            y: *y,
            estimate: lyapunov_exponent(s, n, m)?,
        });
    }
    let vals: Vec<f64> = points.iter().map(|p| p.estimate.value).collect();
    let mut convexity_excess = f64::NEG_INFINITY;
    for i in 1..ys.len().saturating_sub(1) {
        let t = (ys[i] - ys[i - 1]) / (ys[i + 1] - ys[i - 1]);
        let chord = vals[i - 1] + t * (vals[i + 1] - vals[i - 1]);
        convexity_excess = convexity_excess.max(vals[i] - chord);
    }
    if ys.len() < 3 {
        convexity_excess = 0.0;
    }
    let mut evenness_defect: Option<f64> = None;
    for (i, &y) in ys.iter().enumerate() {
        if y <= 0.0 {
            continue;
        }
        if let Some(j) = ys.iter().position(|&z| (z + y).abs() <= 1e-12) {
            let d = (vals[i] - vals[j]).abs();
            evenness_defect = Some(evenness_defect.map_or(d, |e| e.max(d)));
        }
    }
    Ok(ProfileReport {
        points,
        convexity_excess,
        evenness_defect,
        convex_ok: convexity_excess <= CONVEXITY_TOL,
        even_ok: evenness_defect.is_none_or(|d| d <= EVENNESS_TOL),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AccelerationEstimate {
    pub y: f64,
    pub t: f64,
    pub raw: f64,
    pub quantized: i64,
    pub residual: f64,
    /// Residual above 0.1.
    pub flagged: bool,
    /// Sum of the two estimator spreads.
    pub spread: f64,
    pub lower: LyapunovEstimate,
    pub upper: LyapunovEstimate,
}

/// Right difference quotient `(L(y + t) - L(y)) / (2 pi t)` rounded to an integer.
pub fn acceleration(c: &CocycleSpec, y: f64, t: f64, n: usize, m: usize) -> Result<AccelerationEstimate> {
    if !(t > 0.0 && t <= 1e-2) {
        return Err(Error::Contract(format!("t must satisfy 0 < t <= 1e-2, got {t}")));
    }
    let lo = c.at_height(y)?;
    let hi = c.at_height(y + t)?;
    let lower = lyapunov_exponent(&lo, n, m)?;
    let upper = lyapunov_exponent(&hi, n, m)?;
    let spread = lower.spread + upper.spread;
    if spread > TWO_PI * t * 0.1 {
        return Err(Error::Precision(format!(
            "estimator spread {spread:.3e} exceeds {:.3e} at y = {y}; raise n or M",
            TWO_PI * t * 0.1
        )));
    }
    let raw = (upper.value - lower.value) / (TWO_PI * t);
    let quantized = raw.round() as i64;
    let residual = (raw - quantized as f64).abs();
    Ok(AccelerationEstimate {
        y,
        t,
        raw,
        quantized,
        residual,
        flagged: residual > 0.1,
        spread,
        lower,
        upper,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplittingMeasurement {
    pub sign: f64,
    pub le: f64,
    pub spread: f64,
    pub contained: bool,
    pub k_bound_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominatedSplittingReport {
    pub y: f64,
    /// `inf_x |g(x + iy)|`.
    pub m_g: f64,
    pub argmin_x: f64,
    pub is_dominated: bool,
    pub sigma: Option<f64>,
    pub le_lower: Option<f64>,
    pub le_upper: Option<f64>,
    /// `max(K2, K3) / m_g^2`.
    pub k_bound: Option<f64>,
    /// `D = (1, -1/g; 1/g, 0)`.
    pub measured: Option<SplittingMeasurement>,
    /// `D = (1, 1/g; 1/g, 0)`.
    pub measured_plus: Option<SplittingMeasurement>,
}

impl DominatedSplittingReport {
    /// Both sign conventions measured and inside the bounds.
    pub fn all_contained(&self) -> bool {
        [self.measured, self.measured_plus]
            .iter()
            .all(|m| m.is_some_and(|m| m.contained && m.k_bound_ok))
    }
}

/// Splitting criterion and Lyapunov bounds for `D = (1, +-1/g; 1/g, 0)`.
/// Measurement is skipped when `measure` is `None` or `inf |g| <= 2`.
pub fn splitting_check_for(
    g: &FourierPotential,
    alpha: f64,
    y: f64,
    measure: Option<(usize, usize)>,
    tol: f64,
) -> Result<DominatedSplittingReport> {
    check_height(g, y)?;
    let (m_g, argmin_x) = minimize_periodic(&|x| g.eval_unchecked(Complex64::new(x, y)).norm(), MIN_MODULUS_GRID);
    let mut rep = DominatedSplittingReport {
        y,
        m_g,
        argmin_x,
        is_dominated: m_g > 2.0,
        sigma: None,
        le_lower: None,
        le_upper: None,
        k_bound: None,
        measured: None,
        measured_plus: None,
    };
    if !rep.is_dominated {
        return Ok(rep);
    }
    let (lo, hi) = constants::splitting_bounds(m_g);
    let kb = constants::k2().max(constants::k3()) / (m_g * m_g);
    rep.sigma = Some(constants::sigma(m_g));
    rep.le_lower = Some(lo);
    rep.le_upper = Some(hi);
    rep.k_bound = Some(kb);
    if let Some((n, m)) = measure {
        let run = |sign: f64| -> Result<SplittingMeasurement> {
            let d = SplittingCocycle {
                g: g.clone(),
                alpha,
                y,
                sign,
            };
            let est = lyapunov_exponent(&d, n, m)?;
            Ok(SplittingMeasurement {
                sign,
                le: est.value,
                spread: est.spread,
                contained: est.value >= lo - tol && est.value <= hi + tol,
                k_bound_ok: est.value.abs() <= kb,
            })
        };
        rep.measured = Some(run(-1.0)?);
        rep.measured_plus = Some(run(1.0)?);
    }
    Ok(rep)
}

/// Criterion applied to `g = E - lambda f(x + iy)` of a Schrödinger cocycle.
pub fn dominated_splitting_check(
    c: &CocycleSpec,
    with_measurement: bool,
    n: usize,
    m: usize,
) -> Result<DominatedSplittingReport> {
    if c.lambda == 0.0 {
        return Err(Error::Contract("lambda must be nonzero".into()));
    }
    let g = c.potential.affine(-c.lambda, c.energy);
    splitting_check_for(
        &g,
        c.alpha,
        c.y,
        with_measurement.then_some((n, m)),
        DEFAULT_CONTAINMENT_TOL,
    )
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(energy: f64) -> CocycleSpec {
        CocycleSpec::new(FourierPotential::zero(0.5).unwrap(), golden_mean(), 0.0, energy, 0.0).unwrap()
    }

    #[test]
    fn closed_form_norm_matches_power_iteration() {
        let m = Mat2([
            [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.1)],
            [Complex64::new(3.0, 0.0), Complex64::new(0.2, -1.0)],
        ]);
        // ||M||^2 is the top eigenvalue of M^* M.
        let mut v = [Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.1)];
        let mut est = 0.0;
        for _ in 0..200 {
            let mv = [m.0[0][0] * v[0] + m.0[0][1] * v[1], m.0[1][0] * v[0] + m.0[1][1] * v[1]];
            let w = [
                m.0[0][0].conj() * mv[0] + m.0[1][0].conj() * mv[1],
                m.0[0][1].conj() * mv[0] + m.0[1][1].conj() * mv[1],
            ];
            est = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
            v = [w[0] / est, w[1] / est];
        }
        assert!((m.norm() - est.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn transfer_matrix_examples() {
        let a = transfer_matrix(&free(0.0), 0.3).unwrap();
        assert_eq!(a.0[0][0], Complex64::new(0.0, 0.0));
        assert_eq!(a.0[0][1], Complex64::new(-1.0, 0.0));
        let c = CocycleSpec::new(FourierPotential::amo(), golden_mean(), 1.0, 0.0, 0.0).unwrap();
        let a = transfer_matrix(&c, 0.0).unwrap();
        assert!((a.0[0][0] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((a.det() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(c.at_height(0.6).is_err());
    }

    #[test]
    fn rotation_is_isometric() {
        let c = free(0.0);
        for n in [1, 7, 1000] {
            assert!(cocycle_product_lognorm(&c, 0.1, n).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn constant_hyperbolic_cocycle() {
        let want = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        let c = free(3.0);
        let per_step = cocycle_product_lognorm(&c, 0.0, 10_000).unwrap() / 10_000.0;
        assert!((per_step - want).abs() < 1e-3);
        let est = lyapunov_exponent(&c, 1000, 16).unwrap();
        assert!((est.value - want).abs() < 1e-3);
    }

    #[test]
    fn recurrence_tracks_direct_evaluation() {
        let p = FourierPotential::bichromatic();
        let mut o = Orbit::new(&p, golden_mean(), 0.37, 0.2);
        for j in 0..500 {
            let direct = p.eval_unchecked(Complex64::new(0.37 + j as f64 * golden_mean(), 0.2));
            assert!((o.value() - direct).norm() < 1e-11, "step {j}");
            o.advance();
        }
    }

    #[test]
    fn rationality_guard() {
        let c = |a| CocycleSpec::new(FourierPotential::amo(), a, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(c(golden_mean()).rationality_warning(), None);
        assert_eq!(c(0.375).rationality_warning(), Some((3, 8)));
        assert_eq!(c(2.0 / 7.0).rationality_warning(), Some((2, 7)));
    }

    #[test]
    fn splitting_constant_g() {
        let g = FourierPotential::constant(3.0, 0.5).unwrap();
        let r = splitting_check_for(&g, golden_mean(), 0.0, Some((200, 16)), 1e-3).unwrap();
        assert!(r.is_dominated);
        let minus = r.measured.unwrap();
        let plus = r.measured_plus.unwrap();
        let lminus = ((1.0 + 5f64.sqrt() / 3.0) / 2.0).ln();
        let lplus = ((1.0 + 13f64.sqrt() / 3.0) / 2.0).ln();
        assert!((minus.le - lminus).abs() < 1e-6, "{}", minus.le);
        assert!((plus.le - lplus).abs() < 1e-6, "{}", plus.le);
        assert!(r.all_contained());
    }

    #[test]
    fn splitting_amo_examples() {
        let c = CocycleSpec::new(FourierPotential::amo(), golden_mean(), 32.0, 0.0, 0.1).unwrap();
        let r = dominated_splitting_check(&c, false, 0, 0).unwrap();
        assert!((r.m_g - 64.0 * (0.2 * PI).sinh()).abs() < 1e-8);
        assert!(r.is_dominated);
        let c = CocycleSpec::new(FourierPotential::amo(), golden_mean(), 1.0, 0.0, 0.0).unwrap();
        let r = dominated_splitting_check(&c, true, 100, 16).unwrap();
        assert!(r.m_g < 1e-8 && !r.is_dominated && r.measured.is_none());
    }

    #[test]
    fn slope_fit() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        assert!((least_squares_slope(&xs, &ys) - 2.5).abs() < 1e-14);
    }
}
