use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{minimize_periodic, FourierPotential};
use crate::zeros::{laurent_roots, minimize_modulus};

/// Roots closer than this to the real axis are zeros on the torus.
pub const TORUS_ZERO_TOL: f64 = 1e-6;
/// Inside this distance of a zero the zero-free part is evaluated by Taylor series.
const TAYLOR_RADIUS: f64 = 1e-3;
const TAYLOR_TERMS: usize = 12;

/// `theta_c(x) = x / (c + x)`.
pub fn theta(c: f64, x: f64) -> f64 {
    x / (c + x)
}

/// A zero `x_j` of `f` on the torus.
#[derive(Debug, Clone, Serialize)]
pub struct TorusZero {
    pub x: f64,
    pub multiplicity: usize,
    /// `|f^{(n_j)}(x_j)| / n_j!`.
    pub leading: f64,
    /// `f^{(n_j + m)}(x_j) / (n_j + m)!` for `m = 0, 1, ...`.
    #[serde(skip)]
    taylor: Vec<Complex64>,
}

/// `g(z) = f(z) / prod_j (z - x_j)^{n_j}` with each `x_j` taken at its
/// representative nearest to `Re z`, so `|g|` is continuous on the torus.
#[derive(Debug, Clone)]
pub struct TorusZeroFree {
    pub f: FourierPotential,
    pub zeros: Vec<TorusZero>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl TorusZeroFree {
    /// Factorizes `f - mu` along its zeros on the torus.
    pub fn new(p: &FourierPotential, mu: f64) -> Result<Self> {
        let f = p.shifted(mu)?;
        let zs = laurent_roots(&f, Complex64::new(0.0, 0.0))?;
        let mut zeros = Vec::new();
        for z in zs.zeros.iter().filter(|z| z.height().abs() <= TORUS_ZERO_TOL) {
            let n = z.multiplicity;
            let x = z.z.re;
            let taylor: Vec<Complex64> = (0..TAYLOR_TERMS)
                .map(|m| f.derivative_unchecked(Complex64::new(x, 0.0), (n + m) as u32) / factorial(n + m))
                .collect();
            zeros.push(TorusZero {
                x,
                multiplicity: n,
                leading: taylor[0].norm(),
                taylor,
            });
        }
        Ok(Self { f, zeros })
    }

    /// `N(f)`, the number of zeros on the torus with multiplicity.
    pub fn count(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut denom = Complex64::new(1.0, 0.0);
        let mut near: Option<(usize, Complex64)> = None;
        for (j, zero) in self.zeros.iter().enumerate() {
            let shift = (z.re - zero.x).round();
            let dz = z - Complex64::new(zero.x + shift, 0.0);
            if dz.norm() < TAYLOR_RADIUS {
                near = Some((j, dz));
            } else {
                denom *= dz.powu(zero.multiplicity as u32);
            }
        }
        let num = match near {
            Some((j, dz)) => self.zeros[j]
                .taylor
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * dz + a),
            None => self.f.eval_unchecked(z),
        };
        num / denom
    }

    /// `min_{x in T} |g(x)|`.
    pub fn torus_min(&self) -> f64 {
        minimize_periodic(&|x| self.eval(Complex64::new(x, 0.0)).norm(), 4096).0
    }

    /// `min |g|` over the closed strip of height `delta`.
    pub fn strip_min(&self, delta: f64, nx: usize, ny: usize) -> f64 {
        minimize_modulus(&|z| self.eval(z), delta, nx, ny).value
    }
}

/// Radii and lower bounds describing how far the zero set of `f` stays
/// from the lines `Im z = y`, `delta/2 <= y <= delta`.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSetGeometry {
    pub h: f64,
    /// `||f||_h`.
    pub sup_norm: f64,
    pub zeros: Vec<TorusZero>,
    /// `N(f)`.
    pub n: usize,
    /// Modulus of transversality `min_j |f^{(n_j)}(x_j)| / n_j!`.
    pub tau: f64,
    /// `h theta_f(tau h^N)`.
    pub zeta: f64,
    /// `min_T |g|`.
    pub beta: f64,
    /// `h theta_f(beta zeta^N)`.
    pub gamma: f64,
    /// `zeta gamma / sqrt(zeta^2 + gamma^2)`.
    pub r: f64,
    #[serde(skip)]
    pub factorization: TorusZeroFree,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaCheck {
    pub delta: f64,
    pub eta: f64,
    /// Grid minimum of `|f|` over `x in T`, `delta/2 <= y <= delta`.
    pub brute_min: f64,
    pub ok: bool,
}

impl ZeroSetGeometry {
    /// `(delta/2)^N min_{T_delta} |g|`.
    pub fn eta(&self, delta: f64) -> f64 {
        (0.5 * delta).powi(self.n as i32) * self.factorization.strip_min(delta, 2048, 65)
    }

    /// Brute-force check of `min |f| >= eta(delta)` on a 1024 x 64 grid.
    pub fn verify_eta(&self, delta: f64) -> Result<EtaCheck> {
        if !(delta > 0.0 && delta <= self.r * (1.0 + 1e-12)) {
            return Err(Error::Contract(format!("need 0 < delta <= R = {}, got {delta}", self.r)));
        }
        let eta = self.eta(delta);
        let f = &self.factorization.f;
        let mut brute_min = f64::INFINITY;
        for j in 0..64 {
            let y = 0.5 * delta + 0.5 * delta * j as f64 / 63.0;
            for i in 0..1024 {
                brute_min = brute_min.min(f.eval_unchecked(Complex64::new(i as f64 / 1024.0, y)).norm());
            }
        }
        Ok(EtaCheck {
            delta,
            eta,
            brute_min,
            ok: brute_min >= eta,
        })
    }
}

/// Zero-set geometry of `f`; `None` when `f` has no zeros on the torus.
pub fn zero_set_geometry(p: &FourierPotential) -> Result<Option<ZeroSetGeometry>> {
    zero_set_geometry_at(p, 0.0)
}

/// Zero-set geometry of `f - mu`.
pub fn zero_set_geometry_at(p: &FourierPotential, mu: f64) -> Result<Option<ZeroSetGeometry>> {
    if !p.is_real_analytic() {
        return Err(Error::Contract("zero-set geometry needs a real-analytic potential".into()));
    }
    let h = p.strip_height();
    if h >= 1.0 {
        return Err(Error::Contract(format!("need h < 1, got {h}")));
    }
    let fac = TorusZeroFree::new(p, mu)?;
    if fac.zeros.is_empty() {
        return Ok(None);
    }
    let sup_norm = fac.f.sup_norm(h)?;
    let n = fac.count();
    let tau = fac.zeros.iter().map(|z| z.leading).fold(f64::INFINITY, f64::min);
    let zeta = h * theta(sup_norm, tau * h.powi(n as i32));
    let beta = fac.torus_min();
    let gamma = h * theta(sup_norm, beta * zeta.powi(n as i32));
    let r = zeta * gamma / (zeta * zeta + gamma * gamma).sqrt();
    Ok(Some(ZeroSetGeometry {
        h,
        sup_norm,
        zeros: fac.zeros.clone(),
        n,
        tau,
        zeta,
        beta,
        gamma,
        r,
        factorization: fac,
    }))
}
