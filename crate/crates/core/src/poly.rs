//! Dense complex polynomials: evaluation, synthetic division and all-roots
//! via companion-matrix eigenvalues with Newton polishing.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending powers: `coeffs[i]` multiplies `w^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    /// Degree after ignoring exactly-zero leading coefficients. The zero
    /// polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    /// Multiplicity of the root at `w = 0` (number of exactly-zero trailing
    /// coefficients).
    pub fn zero_root_order(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| *c != Complex64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, w: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * w + p;
            p = p * w + c;
        }
        (p, dp)
    }

    /// Divides by `(w - root)`, returning quotient and remainder.
    pub fn deflate(&self, root: Complex64) -> (Poly, Complex64) {
        let n = self.degree();
        if n == 0 {
            return (Poly::new(vec![Complex64::new(0.0, 0.0)]), self.coeffs[0]);
        }
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        let mut carry = self.coeffs[n];
        for i in (0..n).rev() {
            q[i] = carry;
            carry = self.coeffs[i] + carry * root;
        }
        (Poly::new(q), carry)
    }

    /// Sum of coefficient moduli weighted by `r^i`; bounds `|p(w)|` on `|w| = r`.
    pub fn modulus_bound(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.norm() * r.powi(i as i32))
            .sum()
    }

    /// All nonzero roots of the polynomial (the `w = 0` roots must be
    /// stripped by the caller through [`Poly::zero_root_order`]).
    ///
    /// Roots come from the eigenvalues of the companion matrix of the monic
    /// polynomial, then each is polished by Newton iteration.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let s = self.zero_root_order();
        let n = self.degree();
        if n <= s {
            return Ok(Vec::new());
        }
        let core: Vec<Complex64> = self.coeffs[s..=n].to_vec();
        let reduced = Poly::new(core);
        let m = reduced.degree();
        let lead = reduced.coeffs[m];
        let raw = match m {
            1 => vec![-reduced.coeffs[0] / lead],
            2 => {
                let a = lead;
                let b = reduced.coeffs[1];
                let c = reduced.coeffs[0];
                let disc = (b * b - 4.0 * a * c).sqrt();
                // Pick the sign that avoids cancellation.
                let q = if (b.conj() * disc).re >= 0.0 {
                    -(b + disc) / 2.0
                } else {
                    -(b - disc) / 2.0
                };
                if q.norm() == 0.0 {
                    vec![Complex64::new(0.0, 0.0); 2]
                } else {
                    vec![q / a, c / q]
                }
            }
            _ => match companion_eigenvalues(&reduced) {
                Ok(ev) => ev,
                // Highly symmetric companion matrices (e.g. w^n - 1) can stall
                // the shifted QR; simultaneous iteration handles them.
                Err(_) => aberth(&reduced)?,
            },
        };
        Ok(raw.into_iter().map(|w| reduced.polish(w)).collect())
    }

    /// Newton iteration from `w0`; steps are only accepted while they reduce
    /// the residual.
    pub fn polish(&self, w0: Complex64) -> Complex64 {
        let mut w = w0;
        let mut res = self.eval(w).norm();
        for _ in 0..50 {
            if res == 0.0 {
                break;
            }
            let (p, dp) = self.eval_with_derivative(w);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            let cand = w - step;
            let cres = self.eval(cand).norm();
            if !(cres < res) {
                break;
            }
            w = cand;
            res = cres;
            if step.norm() <= 1e-16 * w.norm().max(1e-300) {
                break;
            }
        }
        w
    }
}

fn companion_eigenvalues(p: &Poly) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.coeffs[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs[i] / lead;
    }
    let schur = Schur::try_new(m, 1e-15, 10_000).ok_or_else(|| {
        Error::Numeric(format!("companion Schur decomposition did not converge (degree {n})"))
    })?;
    let ev = schur.eigenvalues().ok_or_else(|| {
        Error::Numeric(format!("companion eigenvalues unavailable (degree {n})"))
    })?;
    Ok(ev.iter().copied().collect())
}

/// Aberth-Ehrlich simultaneous iteration for all roots of `p` (no zero roots).
fn aberth(p: &Poly) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.coeffs[n].norm();
    // Fujiwara-type radius for the starting circle.
    let radius = (0..n)
        .map(|i| (p.coeffs[i].norm() / lead).powf(1.0 / (n - i) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (pv, dpv) = p.eval_with_derivative(z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dpv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            moved = moved.max(step.norm() / z[k].norm().max(1e-300));
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    let worst = z.iter().map(|&w| p.eval(w).norm()).fold(0.0, f64::max);
    if worst <= 1e-10 * p.modulus_bound(radius) {
        Ok(z)
    } else {
        Err(Error::Numeric(format!(
            "root finder did not converge for degree {n} (worst residual {worst:e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn cubic_roots() {
        // (w-1)(w-2)(w-3) = w^3 - 6w^2 + 11w - 6
        let p = Poly::new(vec![c(-6.0), c(11.0), c(-6.0), c(1.0)]);
        let r = sorted_re(p.roots().unwrap());
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn strips_zero_roots() {
        // w^2 (w - 5)
        let p = Poly::new(vec![c(0.0), c(0.0), c(-5.0), c(1.0)]);
        assert_eq!(p.zero_root_order(), 2);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(5.0)).norm() < 1e-14);
    }

    #[test]
    fn deflation_is_exact_for_a_root() {
        let p = Poly::new(vec![c(1.0), c(0.0), c(1.0)]); // w^2 + 1
        let (q, rem) = p.deflate(Complex64::new(0.0, 1.0));
        assert!(rem.norm() < 1e-15);
        assert!((q.eval(c(2.0)) - Complex64::new(2.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn high_degree_roots_of_unity() {
        let mut coeffs = vec![c(0.0); 13];
        coeffs[0] = c(-1.0);
        coeffs[12] = c(1.0);
        let p = Poly::new(coeffs);
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 12);
        for r in roots {
            assert!((r.norm() - 1.0).abs() < 1e-13);
            assert!(p.eval(r).norm() < 1e-12);
        }
    }
}
