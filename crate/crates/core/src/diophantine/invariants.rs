//! The degree-four invariants of an 8-tuple `(a, b)`:
//!
//! ```text
//! det  = a1 a2 a3 a4 - b1 b2 b3 b4
//! det1 = a1 a2 b3 a4 + a1 a2 a3 b4 - a1 b2 b3 b4 - b1 a2 b3 b4
//! det2 = a1 b2 a3 a4 + b1 a2 a3 a4 - b1 b2 a3 b4 - b1 b2 b3 a4
//! p    = max(|a1 a2|, |a3 a4|, |b1 b2|, |b3 b4|)
//! ```

use num_rational::Ratio;
use serde::Serialize;

use super::DiophantineError;

/// Largest entry magnitude for which every quartic monomial and their sums
/// fit in `i128`.
pub const ENTRY_BOUND: i128 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OctTuple {
    pub a: [i128; 4],
    pub b: [i128; 4],
}

impl OctTuple {
    pub fn new(a: [i128; 4], b: [i128; 4]) -> Self {
        OctTuple { a, b }
    }

    /// `a1 = a2, b1 = b2, a3 = a4, b3 = b4 (mod 2)`.
    pub fn satisfies_parity(&self) -> bool {
        let same = |x: i128, y: i128| (x - y).rem_euclid(2) == 0;
        same(self.a[0], self.a[1])
            && same(self.b[0], self.b[1])
            && same(self.a[2], self.a[3])
            && same(self.b[2], self.b[3])
    }

    /// No pair `(a_i, b_i)` is `(0, 0)`.
    pub fn is_nondegenerate(&self) -> bool {
        (0..4).all(|i| (self.a[i], self.b[i]) != (0, 0))
    }

    fn check_bounds(&self) -> Result<(), DiophantineError> {
        for &x in self.a.iter().chain(self.b.iter()) {
            if x.abs() > ENTRY_BOUND {
                return Err(DiophantineError::Overflow(x));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DetInvariants {
    pub det: i128,
    pub det1: i128,
    pub det2: i128,
    pub p_max: i128,
}

/// Evaluates the invariants in factored form: with `A = a1 a2`, `B = b1 b2`,
/// `C = a1 b2 + b1 a2` and primed versions for the second half,
/// `det = A A' - B B'`, `det1 = A C' - C B'`, `det2 = C A' - B C'`.
pub fn det_invariants(oct: &OctTuple) -> Result<DetInvariants, DiophantineError> {
    oct.check_bounds()?;
    let [a1, a2, a3, a4] = oct.a;
    let [b1, b2, b3, b4] = oct.b;
    let (a, b, c) = (a1 * a2, b1 * b2, a1 * b2 + b1 * a2);
    let (ap, bp, cp) = (a3 * a4, b3 * b4, a3 * b4 + b3 * a4);
    Ok(DetInvariants {
        det: a * ap - b * bp,
        det1: a * cp - c * bp,
        det2: c * ap - b * cp,
        p_max: a.abs().max(ap.abs()).max(b.abs()).max(bp.abs()),
    })
}

/// Substitutes `b1 = (a1 a2 a3 a4 - det) / (b2 b3 b4)` and returns
///
/// ```text
/// det1 - [ -(a1 / b2) (a2 a3 - b2 b3)(a2 a4 - b2 b4) + (a2 / b2) det ]
/// ```
///
/// as an exact rational. The result is identically zero.
pub fn substitution_residual(
    a: [i128; 4],
    b2: i128,
    b3: i128,
    b4: i128,
    det: i128,
) -> Result<Ratio<i128>, DiophantineError> {
    let den = b2 * b3 * b4;
    if den == 0 {
        return Err(DiophantineError::ZeroDenominator);
    }
    let [a1, a2, a3, a4] = a;
    let num = a1 * a2 * a3 * a4 - det;
    if num % den != 0 {
        return Err(DiophantineError::NonDivisible { num, den });
    }
    let b1 = num / den;
    let inv = det_invariants(&OctTuple::new(a, [b1, b2, b3, b4]))?;
    debug_assert_eq!(inv.det, det);
    let r = |n: i128| Ratio::from_integer(n);
    let predicted = -Ratio::new(a1, b2) * r((a2 * a3 - b2 * b3) * (a2 * a4 - b2 * b4))
        + Ratio::new(a2, b2) * r(det);
    Ok(r(inv.det1) - predicted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let ones = OctTuple::new([1; 4], [1; 4]);
        assert_eq!(
            det_invariants(&ones).unwrap(),
            DetInvariants {
                det: 0,
                det1: 0,
                det2: 0,
                p_max: 1
            }
        );
        let o = OctTuple::new([1, 2, 3, 4], [1; 4]);
        assert_eq!(
            det_invariants(&o).unwrap(),
            DetInvariants {
                det: 23,
                det1: 11,
                det2: 29,
                p_max: 12
            }
        );
        let z = OctTuple::new([0; 4], [2, -3, 5, 7]);
        let inv = det_invariants(&z).unwrap();
        assert_eq!(inv.det, 2 * 3 * 5 * 7);
        assert_eq!(inv.det1, 0);
    }

    #[test]
    fn residual_examples() {
        assert_eq!(
            substitution_residual([1; 4], 1, 1, 1, 0).unwrap(),
            Ratio::from_integer(0)
        );
        assert_eq!(
            substitution_residual([1; 4], 0, 1, 1, 0),
            Err(DiophantineError::ZeroDenominator)
        );
        assert!(matches!(
            substitution_residual([1, 1, 1, 2], 2, 1, 1, 1),
            Err(DiophantineError::NonDivisible { .. })
        ));
    }

    #[test]
    fn overflow_guard() {
        let o = OctTuple::new([3_000_000_000, 1, 1, 1], [1; 4]);
        assert!(matches!(det_invariants(&o), Err(DiophantineError::Overflow(_))));
    }

    #[test]
    fn flags() {
        let o = OctTuple::new([1, 3, 2, 4], [0, 2, 5, 1]);
        assert!(o.satisfies_parity());
        assert!(o.is_nondegenerate());
        let d = OctTuple::new([0, 3, 2, 4], [0, 2, 5, 1]);
        assert!(!d.is_nondegenerate());
    }
}
