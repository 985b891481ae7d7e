//! Decomposition of
//!
//! ```text
//! G_S(y, D) = sum_{D < n <= D', n in S} n^(-2 pi i y),   D' = D (1 + delta')
//! ```
//!
//! through the identity `sum_{p in I, p | n} w(p, n/p) = 1` for `n in S`,
//! with `w(p, m) = 1 / (omega_I(m) + [p does not divide m])`. Writing
//! `w = 1 / (omega_I(m) + 1) + [p | m] (1/omega_I(m) - 1/(omega_I(m) + 1))`
//! splits `G_S` into a sum `A` over all `(p, m)` with the first weight and a
//! correction `U` over `p | m`. Grouping the primes into boxes
//! `(P, P (1 + kappa)]` and replacing the range of `m` by `(D/P, D'/P]`
//! turns `A` into `sum_P Q_P R_P`; the difference is a polynomial `V`
//! supported near the ends of `(D, D']` whose coefficients are computed
//! term by term.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use super::spec::omega_block;
use super::{phase, DirichletError, Kahan, TERM_BUDGET};
use crate::diophantine::SieveWindow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamareParams {
    pub d: f64,
    pub delta_prime: f64,
    pub kappa: f64,
    /// First box edge; the window's lower end when `None`.
    pub p0: Option<f64>,
}

impl RamareParams {
    pub fn new(d: f64, delta_prime: f64, kappa: f64) -> Self {
        RamareParams {
            d,
            delta_prime,
            kappa,
            p0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamareSplit {
    /// `G_S` summed directly.
    pub direct: Complex64,
    /// `sum_P Q_P(y) R_P(y, D)`.
    pub main: Complex64,
    /// The polynomial `V(y, D)`.
    pub boundary: Complex64,
    /// The `p | m` correction `U(y, D)`.
    pub squares: Complex64,
    /// `|direct - (main + boundary + squares)|`.
    pub residual: f64,
    /// Number of terms summed across all components.
    pub terms: u64,
}

/// The same decomposition with exact rational values at `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RamareExact {
    pub direct: Ratio<i128>,
    pub main: Ratio<i128>,
    pub boundary: Ratio<i128>,
    pub squares: Ratio<i128>,
}

type Q = Ratio<i64>;

/// Everything both evaluators need: box edges, primes, `omega_I` table and
/// the boundary coefficients `d_n`.
struct Layout {
    d: f64,
    d_prime: f64,
    primes: Vec<u64>,
    edges: Vec<f64>,
    /// `omega_I(k)` for `0 <= k <= omega.len() - 1`.
    omega: Vec<u8>,
    boundary: BTreeMap<u64, Q>,
}

/// Integers in `(lo, hi]`.
fn int_range(lo: f64, hi: f64) -> std::ops::RangeInclusive<u64> {
    let a = lo.max(0.0).floor() as u64 + 1;
    let b = hi.max(0.0).floor() as u64;
    a..=b
}

impl Layout {
    fn new(window: &SieveWindow, p: &RamareParams) -> Result<Self, DirichletError> {
        if !(p.d > 0.0 && p.delta_prime > 0.0 && p.kappa > 0.0 && p.d.is_finite()) {
            return Err(DirichletError::InvalidParameter(format!(
                "need D, delta', kappa > 0; got {}, {}, {}",
                p.d, p.delta_prime, p.kappa
            )));
        }
        let d_prime = p.d * (1.0 + p.delta_prime);
        let limit = (d_prime * (1.0 + p.kappa)).ceil() as u64 + 1;
        if limit > TERM_BUDGET {
            return Err(DirichletError::BudgetExceeded {
                needed: limit,
                budget: TERM_BUDGET,
            });
        }
        let primes = window.primes()?;
        let p0 = p.p0.unwrap_or(window.lo);
        if !(p0 > 0.0 && p0 <= window.lo) {
            return Err(DirichletError::InvalidParameter(format!(
                "first box edge {p0} must lie in (0, {}]",
                window.lo
            )));
        }
        let mut edges = vec![p0];
        while *edges.last().unwrap() < window.hi {
            let next = edges.last().unwrap() * (1.0 + p.kappa);
            edges.push(next);
        }
        let mut omega = vec![0u8];
        omega.extend(omega_block(&primes, 1, limit));
        let mut layout = Layout {
            d: p.d,
            d_prime,
            primes,
            edges,
            omega,
            boundary: BTreeMap::new(),
        };
        layout.boundary = layout.boundary_coefficients();
        Ok(layout)
    }

    fn weight(&self, m: u64) -> Q {
        Ratio::new(1, self.omega[m as usize] as i64 + 1)
    }

    /// Primes of each box `(edges[j], edges[j + 1]]`.
    fn boxes(&self) -> Vec<(f64, &[u64])> {
        let mut out = Vec::with_capacity(self.edges.len());
        let mut start = 0;
        for w in self.edges.windows(2) {
            let end = start + self.primes[start..].partition_point(|&q| q as f64 <= w[1]);
            let first = start + self.primes[start..end].partition_point(|&q| q as f64 <= w[0]);
            out.push((w[0], &self.primes[first..end]));
            start = end;
        }
        out
    }

    /// `d_n = sum_P sum_{p in box P, p | n} c(n/p) ([D < n <= D'] - [D/P < n/p <= D'/P])`.
    fn boundary_coefficients(&self) -> BTreeMap<u64, Q> {
        let mut d: BTreeMap<u64, Q> = BTreeMap::new();
        for (edge, primes) in self.boxes() {
            for &p in primes {
                let pf = p as f64;
                for m in int_range(self.d / pf, self.d_prime / pf) {
                    *d.entry(p * m).or_insert(Ratio::from_integer(0)) += self.weight(m);
                }
                for m in int_range(self.d / edge, self.d_prime / edge) {
                    *d.entry(p * m).or_insert(Ratio::from_integer(0)) -= self.weight(m);
                }
            }
        }
        d.retain(|_, c| *c.numer() != 0);
        d
    }

    /// `(p, m)` with `p in I`, `D < p m <= D'`, `p | m`, and the weight
    /// `1/omega(m) - 1/(omega(m) + 1)`.
    fn square_terms(&self) -> Vec<(u64, Q)> {
        let mut out = Vec::new();
        for &p in &self.primes {
            let pf = p as f64;
            for m in int_range(self.d / pf, self.d_prime / pf) {
                if m % p == 0 {
                    let w = self.omega[m as usize] as i64;
                    out.push((p * m, Ratio::new(1, w) - Ratio::new(1, w + 1)));
                }
            }
        }
        out
    }

    fn in_s(&self) -> impl Iterator<Item = u64> + '_ {
        int_range(self.d, self.d_prime).filter(|&n| self.omega[n as usize] > 0)
    }
}

fn q_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn widen(q: Q) -> Ratio<i128> {
    Ratio::new(*q.numer() as i128, *q.denom() as i128)
}

pub fn ramare_split(
    y: f64,
    window: &SieveWindow,
    params: &RamareParams,
) -> Result<RamareSplit, DirichletError> {
    let layout = Layout::new(window, params)?;
    let mut terms = 0u64;

    let mut direct = Kahan::default();
    for n in layout.in_s() {
        direct.add(phase(n as f64, y));
        terms += 1;
    }

    let mut main = Kahan::default();
    for (edge, primes) in layout.boxes() {
        let mut q = Kahan::default();
        for &p in primes {
            q.add(phase(p as f64, y));
        }
        let mut r = Kahan::default();
        for m in int_range(layout.d / edge, layout.d_prime / edge) {
            r.add(phase(m as f64, y) * q_to_f64(layout.weight(m)));
        }
        terms += (primes.len() + int_range(layout.d / edge, layout.d_prime / edge).count()) as u64;
        if !primes.is_empty() {
            main.add(q.value() * r.value());
        }
    }

    let mut boundary = Kahan::default();
    for (&n, &c) in &layout.boundary {
        boundary.add(phase(n as f64, y) * q_to_f64(c));
        terms += 1;
    }

    let mut squares = Kahan::default();
    for (n, c) in layout.square_terms() {
        squares.add(phase(n as f64, y) * q_to_f64(c));
        terms += 1;
    }

    let (direct, main, boundary, squares) =
        (direct.value(), main.value(), boundary.value(), squares.value());
    Ok(RamareSplit {
        direct,
        main,
        boundary,
        squares,
        residual: (direct - (main + boundary + squares)).norm(),
        terms,
    })
}

/// Exact evaluation of the decomposition at `y = 0`.
pub fn ramare_exact(window: &SieveWindow, params: &RamareParams) -> Result<RamareExact, DirichletError> {
    let layout = Layout::new(window, params)?;
    let zero = || Ratio::from_integer(0i128);
    let direct = Ratio::from_integer(layout.in_s().count() as i128);
    let mut main = zero();
    for (edge, primes) in layout.boxes() {
        let mut r = zero();
        for m in int_range(layout.d / edge, layout.d_prime / edge) {
            r += widen(layout.weight(m));
        }
        main += r * primes.len() as i128;
    }
    let boundary = layout.boundary.values().fold(zero(), |a, &c| a + widen(c));
    let squares = layout
        .square_terms()
        .into_iter()
        .fold(zero(), |a, (_, c)| a + widen(c));
    Ok(RamareExact {
        direct,
        main,
        boundary,
        squares,
    })
}

/// The boundary coefficients `d_n` with their support.
pub fn boundary_coefficients(
    window: &SieveWindow,
    params: &RamareParams,
) -> Result<BTreeMap<u64, Ratio<i64>>, DirichletError> {
    Ok(Layout::new(window, params)?.boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window() -> SieveWindow {
        SieveWindow::from_log(16.0, 0.25)
    }

    #[test]
    fn exact_identity_at_zero() {
        let p = RamareParams::new(1000.0, 0.1, 0.1);
        let e = ramare_exact(&window(), &p).unwrap();
        assert_eq!(e.direct, e.main + e.boundary + e.squares);
        assert!(e.direct > Ratio::from_integer(0));
        let s = ramare_split(0.0, &window(), &p).unwrap();
        assert!(s.residual <= 1e-6, "{}", s.residual);
    }

    #[test]
    fn boundary_support_and_size() {
        let p = RamareParams::new(1000.0, 0.1, 0.1);
        let d = boundary_coefficients(&window(), &p).unwrap();
        assert!(!d.is_empty());
        let (dp, k) = (1100.0, 0.1);
        for (&n, c) in &d {
            let n = n as f64;
            let near_lo = n >= 1000.0 / (1.0 + k) && n <= 1000.0 * (1.0 + k);
            let near_hi = n >= dp && n <= dp * (1.0 + k);
            assert!(near_lo || near_hi, "d_{n} = {c}");
            assert!(c.numer().abs() <= *c.denom(), "d_{n} = {c}");
        }
    }

    #[test]
    fn empty_range_gives_zeros() {
        // Nothing in (2, 6] has a prime factor above e^2.
        let p = RamareParams::new(2.0, 2.0, 0.1);
        let s = ramare_split(0.37, &window(), &p).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!((s.direct, s.main, s.boundary, s.squares), (zero, zero, zero, zero));
    }

    #[test]
    fn random_frequencies() {
        let p = RamareParams::new(1000.0, 0.1, 0.1);
        for y in [-812.3, -1.5, 0.25, 17.0, 999.9] {
            let s = ramare_split(y, &window(), &p).unwrap();
            assert!(s.residual <= 1e-9 * s.terms as f64, "y={y}: {}", s.residual);
        }
    }
}
