//! Numerical check of the mean value bound
//!
//! ```text
//! int_{-T}^{T} |sum_{n <= X} a_n n^(-it)|^2 dt <= 3 (T + X) sum |a_n|^2.
//! ```

use num_complex::Complex64;
use serde::Serialize;

use super::DirichletError;
use crate::diophantine::primes::smallest_prime_factors;

/// Recursion limit of the adaptive Simpson rule.
pub const MAX_DEPTH: u32 = 40;
/// Relative accuracy requested from the quadrature.
pub const REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanValue {
    pub lhs: f64,
    pub rhs: f64,
    /// Number of integrand evaluations.
    pub evaluations: u64,
}

impl MeanValue {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// `|sum a_n n^(-it)|^2` for real coefficients `a_1, ..., a_X`.
///
/// `n^(-it)` is built multiplicatively: `p^(-it)` is computed once per prime
/// and every composite reuses `n = p * (n / p)` with `p` its smallest prime
/// factor.
struct Integrand<'a> {
    coeffs: &'a [f64],
    spf: Vec<u32>,
    powers: Vec<Complex64>,
}

impl<'a> Integrand<'a> {
    fn new(coeffs: &'a [f64]) -> Self {
        let x = coeffs.len();
        Integrand {
            coeffs,
            spf: smallest_prime_factors(x),
            powers: vec![Complex64::new(0.0, 0.0); x + 1],
        }
    }

    fn eval(&mut self, t: f64) -> f64 {
        let x = self.coeffs.len();
        if x == 0 {
            return 0.0;
        }
        self.powers[1] = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(self.coeffs[0], 0.0);
        for n in 2..=x {
            let p = self.spf[n] as usize;
            let z = if p == n {
                let (s, c) = (-t * (n as f64).ln()).sin_cos();
                Complex64::new(c, s)
            } else {
                self.powers[p] * self.powers[n / p]
            };
            self.powers[n] = z;
            sum += z * self.coeffs[n - 1];
        }
        sum.norm_sqr()
    }
}

struct Simpson<'a, 'b> {
    f: &'b mut Integrand<'a>,
    evaluations: u64,
}

impl Simpson<'_, '_> {
    fn eval(&mut self, t: f64) -> f64 {
        self.evaluations += 1;
        self.f.eval(t)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, DirichletError> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (self.eval(lm), self.eval(rm));
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if diff.abs() <= 15.0 * tol {
            return Ok(left + right + diff / 15.0);
        }
        if depth >= MAX_DEPTH {
            return Err(DirichletError::QuadratureFailure(MAX_DEPTH));
        }
        Ok(self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
            + self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?)
    }
}

/// Computes the integral by adaptive Simpson over `[0, T]` (the integrand is
/// even for real coefficients) on panels no wider than `1 / (4 log X)`, and
/// compares it with `3 (T + X) sum a_n^2`.
pub fn mean_value_check(coeffs: &[f64], t: f64) -> Result<MeanValue, DirichletError> {
    if !(t > 0.0 && t.is_finite()) || coeffs.iter().any(|a| !a.is_finite()) {
        return Err(DirichletError::InvalidParameter(
            "T must be positive and coefficients finite".into(),
        ));
    }
    let x = coeffs.len();
    let energy: f64 = coeffs.iter().map(|a| a * a).sum();
    let rhs = 3.0 * (t + x as f64) * energy;
    if energy == 0.0 {
        return Ok(MeanValue {
            lhs: 0.0,
            rhs,
            evaluations: 0,
        });
    }
    let span = (x as f64).ln().max(1.0);
    let panels = (t * 4.0 * span).ceil().max(1.0) as usize;
    let width = t / panels as f64;
    // The integral is about 2 T sum a_n^2; ask for REL_TOL of that.
    let tol = REL_TOL * energy * width;
    let mut f = Integrand::new(coeffs);
    let mut s = Simpson {
        f: &mut f,
        evaluations: 0,
    };
    let mut total = 0.0;
    let mut fa = s.eval(0.0);
    for i in 0..panels {
        let a = i as f64 * width;
        let b = if i + 1 == panels { t } else { a + width };
        let fm = s.eval(0.5 * (a + b));
        let fb = s.eval(b);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += s.refine(a, b, fa, fm, fb, whole, tol, 0)?;
        fa = fb;
    }
    Ok(MeanValue {
        lhs: 2.0 * total,
        rhs,
        evaluations: s.evaluations,
    })
}

/// `sum_n a_n^2 2T + sum_{m != n} a_m a_n 2 sin(T log(m/n)) / log(m/n)`,
/// the integral in closed form. Quadratic in `X`.
pub fn mean_value_closed_form(coeffs: &[f64], t: f64) -> f64 {
    let mut total = 0.0;
    for (i, &am) in coeffs.iter().enumerate() {
        for (j, &an) in coeffs.iter().enumerate() {
            if i == j {
                total += am * am * 2.0 * t;
            } else {
                let l = ((i + 1) as f64 / (j + 1) as f64).ln();
                total += am * an * 2.0 * (t * l).sin() / l;
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_coefficient() {
        let r = mean_value_check(&[1.0], 50.0).unwrap();
        assert!((r.lhs - 100.0).abs() < 1e-9);
        assert_eq!(r.rhs, 3.0 * 51.0);
        assert!(r.holds());
    }

    #[test]
    fn matches_closed_form() {
        let a: Vec<f64> = (1..=60).map(|n| if n % 3 == 0 { -1.0 } else { 0.5 }).collect();
        let r = mean_value_check(&a, 40.0).unwrap();
        let exact = mean_value_closed_form(&a, 40.0);
        assert!((r.lhs - exact).abs() <= 1e-5 * exact, "{} vs {exact}", r.lhs);
    }

    #[test]
    fn all_ones_hundred() {
        let a = vec![1.0; 100];
        let r = mean_value_check(&a, 100.0).unwrap();
        assert!(r.holds(), "{r:?}");
        let exact = mean_value_closed_form(&a, 100.0);
        assert!((r.lhs - exact).abs() <= 1e-5 * exact);
    }

    #[test]
    fn multiplicative_powers_are_accurate() {
        let a = vec![0.0; 997];
        let mut f = Integrand::new(&a);
        f.eval(123.456);
        for n in [64usize, 720, 997, 996] {
            let direct = Complex64::from_polar(1.0, -123.456 * (n as f64).ln());
            assert!((f.powers[n] - direct).norm() < 1e-11);
        }
    }
}
