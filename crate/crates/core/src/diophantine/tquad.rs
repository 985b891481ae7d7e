//! Quadruples `t = (t1, t2, t3, t4)` encoding ordered pairs of eigenvalues of
//! the rectangular form `alpha m^2 + n^2`.
//!
//! For index pairs `(m1, n1)` (the larger eigenvalue) and `(m2, n2)`:
//!
//! ```text
//! t1 = m1 - m2,  t2 = m1 + m2,  t3 = n2 - n1,  t4 = n2 + n1
//! ```
//!
//! so that `alpha t1 t2 - t3 t4 = q(m1, n1) - q(m2, n2)`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::Serialize;

use super::DiophantineError;
use crate::par;

/// Cap on the number of `(m1, m2, n1)` triples visited.
pub const TQUAD_BUDGET: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TQuad {
    pub t: [i64; 4],
    /// `(m1, n1, m2, n2)` when known.
    pub source: Option<(i64, i64, i64, i64)>,
}

impl TQuad {
    pub fn from_indices(m1: i64, n1: i64, m2: i64, n2: i64) -> Self {
        TQuad {
            t: [m1 - m2, m1 + m2, n2 - n1, n2 + n1],
            source: Some((m1, n1, m2, n2)),
        }
    }

    /// `(m1, n1, m2, n2)`, or `None` when the parities disagree.
    pub fn to_indices(&self) -> Option<(i64, i64, i64, i64)> {
        let [t1, t2, t3, t4] = self.t;
        if (t1 - t2).rem_euclid(2) != 0 || (t3 - t4).rem_euclid(2) != 0 {
            return None;
        }
        Some(((t1 + t2) / 2, (t4 - t3) / 2, (t2 - t1) / 2, (t3 + t4) / 2))
    }

    /// The defining conditions other than the ellipse and gap bounds.
    pub fn is_admissible(&self) -> bool {
        let [t1, t2, t3, t4] = self.t;
        (t1, t3) != (0, 0)
            && (t1 - t2).rem_euclid(2) == 0
            && (t3 - t4).rem_euclid(2) == 0
            && t2 > t1.abs()
            && t4 >= t3.abs()
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Sign of `alpha * p + q - bound` for integers `p`, `q` exactly representable
/// as `f64`. A plain evaluation decides unless it lands within a few ulp of
/// zero, in which case the product is split with an fma and the sum is
/// redone in double-double.
fn cmp_affine(alpha: f64, p: f64, q: f64, bound: f64) -> Ordering {
    let fast = alpha.mul_add(p, q) - bound;
    let scale = (alpha * p).abs() + q.abs() + bound.abs();
    if fast.abs() > 4.0 * f64::EPSILON * scale {
        return fast.partial_cmp(&0.0).unwrap();
    }
    let hi = alpha * p;
    let lo = alpha.mul_add(p, -hi);
    let (s1, e1) = two_sum(hi, q);
    let (s2, e2) = two_sum(s1, -bound);
    let tail = e1 + e2 + lo;
    (s2 + tail).partial_cmp(&0.0).unwrap()
}

/// Ellipse radius `4 sqrt(alpha) N / pi` and gap bound `4 sqrt(alpha) delta / pi`.
pub fn scaled_bounds(alpha: f64, n: f64, delta: f64) -> (f64, f64) {
    let c = 4.0 * alpha.sqrt() / PI;
    (c * n, c * delta)
}

/// All admissible quadruples with both ellipse conditions and
/// `0 <= alpha t1 t2 - t3 t4 <= 4 sqrt(alpha) delta / pi`.
///
/// Their number equals the count of ordered pairs `i != j` of eigenvalues of
/// `alpha m^2 + n^2` (quarter lattice) with `Lambda_i, Lambda_j <= N` and
/// `0 <= Lambda_j - Lambda_i <= delta`.
pub fn t_quadruples_rect(alpha: f64, n: f64, delta: f64) -> Result<Vec<TQuad>, DiophantineError> {
    if !(alpha > 0.0 && alpha.is_finite() && n.is_finite() && delta.is_finite()) {
        return Err(DiophantineError::InvalidParameter(format!(
            "need finite alpha > 0, N, delta; got {alpha}, {n}, {delta}"
        )));
    }
    if delta < 0.0 || n <= 0.0 {
        return Ok(Vec::new());
    }
    let (x, b) = scaled_bounds(alpha, n, delta);
    let m_max = (x / alpha).sqrt().floor() as i64 + 1;
    let n_max = x.sqrt().floor() as i64 + 1;
    let work = (m_max as f64).powi(2) * (n_max as f64 + 1.0);
    if work > TQUAD_BUDGET {
        return Err(DiophantineError::BudgetExceeded {
            needed: work,
            budget: TQUAD_BUDGET,
        });
    }
    let inside = |m: i64, k: i64| {
        let (m, k) = (m as f64, k as f64);
        cmp_affine(alpha, m * m, k * k, x) != Ordering::Greater
    };
    let stripes = par::map_range(1..m_max + 1, |m1| {
        let mut out = Vec::new();
        if !inside(m1, 0) {
            return out;
        }
        for m2 in 1..=m_max {
            if !inside(m2, 0) {
                continue;
            }
            let (t1, t2) = (m1 - m2, m1 + m2);
            let c = alpha * (t1 * t2) as f64;
            for n1 in 0..=n_max {
                if !inside(m1, n1) {
                    break;
                }
                // n2^2 in [n1^2 + c - b, n1^2 + c], up to rounding.
                let base = (n1 * n1) as f64 + c;
                let lo = (base - b).max(0.0).sqrt().floor() as i64 - 1;
                let hi = base.max(0.0).sqrt().ceil() as i64 + 1;
                for n2 in lo.max(0)..=hi {
                    let (t3, t4) = (n2 - n1, n2 + n1);
                    if (t1, t3) == (0, 0) || !inside(m2, n2) {
                        continue;
                    }
                    let p = (t1 * t2) as f64;
                    let q = -((t3 * t4) as f64);
                    if cmp_affine(alpha, p, q, 0.0) == Ordering::Less
                        || cmp_affine(alpha, p, q, b) == Ordering::Greater
                    {
                        continue;
                    }
                    out.push(TQuad::from_indices(m1, n1, m2, n2));
                }
            }
        }
        out
    });
    Ok(stripes.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn negative_gap_is_empty() {
        assert!(t_quadruples_rect(1.3, 50.0, -0.1).unwrap().is_empty());
    }

    #[test]
    fn zero_gap_counts_multiplicities() {
        // alpha = 1: Lambda = pi/4 (m^2 + n^2), m > 0, n >= 0.
        let n = 10.0;
        let mut vals = Vec::new();
        for m in 1..10i64 {
            for k in 0..10i64 {
                let q = m * m + k * k;
                if PI / 4.0 * q as f64 <= n {
                    vals.push(q);
                }
            }
        }
        let mut expected = 0;
        for (i, a) in vals.iter().enumerate() {
            for (j, b) in vals.iter().enumerate() {
                if i != j && a == b {
                    expected += 1;
                }
            }
        }
        let got = t_quadruples_rect(1.0, n, 0.0).unwrap();
        assert_eq!(got.len(), expected);
        assert!(expected > 0);
    }

    #[test]
    fn admissibility_and_roundtrip() {
        for q in t_quadruples_rect(2f64.sqrt(), 60.0, 0.7).unwrap() {
            assert!(q.is_admissible());
            assert_eq!(q.to_indices(), q.source);
        }
    }

    #[test]
    fn cmp_affine_resolves_ties() {
        assert_eq!(cmp_affine(0.5, 2.0, -1.0, 0.0), Ordering::Equal);
        let a = 0.1f64;
        // 0.1 * 3 in f64 is 0.30000000000000004 but the exact product of the
        // stored 0.1 and 3 sits slightly above the stored 0.3.
        assert_eq!(cmp_affine(a, 3.0, 0.0, 0.3), Ordering::Greater);
    }

    proptest! {
        #[test]
        fn index_roundtrip(m1 in 1i64..1000, n1 in 0i64..1000, m2 in 1i64..1000, n2 in 0i64..1000) {
            let q = TQuad::from_indices(m1, n1, m2, n2);
            prop_assert_eq!(q.to_indices(), Some((m1, n1, m2, n2)));
            prop_assert_eq!(q.is_admissible(), (m1, n1) != (m2, n2));
        }
    }
}
