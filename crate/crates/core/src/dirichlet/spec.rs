//! Coefficient rules and evaluation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;

use super::{phase, DirichletError, Kahan, TERM_BUDGET};
use crate::diophantine::SieveWindow;
use crate::par;

/// Chunk length for evaluation; fixed so that rounding does not depend on
/// the thread count.
pub const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub enum CoeffRule {
    /// `a_t = 1`.
    Unit,
    /// `a_t = 1` if `t` has a prime divisor in the window, else 0.
    InS(SieveWindow),
    /// `a_t = 1` if `t` has no prime divisor in the window, else 0.
    NotInS(SieveWindow),
    /// `a_t = 1 / (omega_I(t) + shift)`, `shift >= 1`.
    OmegaWeighted { window: SieveWindow, shift: u32 },
    /// `a_t = 1` if `t` is a prime in the window, else 0.
    PrimesInWindow(SieveWindow),
    /// Explicit coefficients; missing `t` have `a_t = 0`.
    Tabulated(BTreeMap<u64, Ratio<i64>>),
}

/// `sum_{lo < t <= hi} scale * a_t * t^(-2 pi i y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSpec {
    pub lo: f64,
    pub hi: f64,
    pub rule: CoeffRule,
    pub scale: Option<Ratio<i64>>,
}

impl DirichletSpec {
    pub fn new(lo: f64, hi: f64, rule: CoeffRule) -> Self {
        DirichletSpec {
            lo,
            hi,
            rule,
            scale: None,
        }
    }

    pub fn unit(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, CoeffRule::Unit)
    }

    pub fn with_scale(mut self, scale: Ratio<i64>) -> Self {
        self.scale = Some(scale);
        self
    }

    /// First and last integer of the support, or `None` if it has none.
    pub fn integer_range(&self) -> Option<(u64, u64)> {
        let first = (self.lo.max(0.0).floor() as u64) + 1;
        let last = self.hi.floor().max(0.0) as u64;
        (first <= last).then_some((first, last))
    }

    pub fn term_count(&self) -> u64 {
        self.integer_range().map_or(0, |(a, b)| b - a + 1)
    }

    fn check(&self) -> Result<(), DirichletError> {
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(DirichletError::InvalidParameter(format!(
                "support ({}, {}] must be finite",
                self.lo, self.hi
            )));
        }
        if let CoeffRule::OmegaWeighted { shift: 0, .. } = self.rule {
            return Err(DirichletError::InvalidParameter(
                "omega weight shift must be at least 1".into(),
            ));
        }
        let n = self.term_count();
        if n > TERM_BUDGET {
            return Err(DirichletError::BudgetExceeded {
                needed: n,
                budget: TERM_BUDGET,
            });
        }
        Ok(())
    }
}

/// `omega_I(t)` for `t` in `[first, last]`, given the primes of the window.
pub(crate) fn omega_block(primes: &[u64], first: u64, last: u64) -> Vec<u8> {
    let mut omega = vec![0u8; (last - first + 1) as usize];
    for &p in primes {
        if p > last {
            break;
        }
        let mut k = first.div_ceil(p) * p;
        while k <= last {
            omega[(k - first) as usize] += 1;
            k += p;
        }
    }
    omega
}

fn window_of(rule: &CoeffRule) -> Option<&SieveWindow> {
    match rule {
        CoeffRule::InS(w) | CoeffRule::NotInS(w) | CoeffRule::PrimesInWindow(w) => Some(w),
        CoeffRule::OmegaWeighted { window, .. } => Some(window),
        _ => None,
    }
}

/// Exact coefficients for `t` in `[first, last]`, zeros included.
fn coefficients(
    rule: &CoeffRule,
    primes: &[u64],
    first: u64,
    last: u64,
) -> Vec<Ratio<i64>> {
    let one = Ratio::from_integer(1);
    let zero = Ratio::from_integer(0);
    let len = (last - first + 1) as usize;
    match rule {
        CoeffRule::Unit => vec![one; len],
        CoeffRule::Tabulated(map) => {
            let mut v = vec![zero; len];
            for (&t, &c) in map.range(first..=last) {
                v[(t - first) as usize] = c;
            }
            v
        }
        CoeffRule::PrimesInWindow(_) => {
            let mut v = vec![zero; len];
            let start = primes.partition_point(|&p| p < first);
            for &p in primes[start..].iter().take_while(|&&p| p <= last) {
                v[(p - first) as usize] = one;
            }
            v
        }
        CoeffRule::InS(_) | CoeffRule::NotInS(_) => {
            let want = matches!(rule, CoeffRule::InS(_));
            omega_block(primes, first, last)
                .into_iter()
                .map(|o| if (o > 0) == want { one } else { zero })
                .collect()
        }
        CoeffRule::OmegaWeighted { shift, .. } => omega_block(primes, first, last)
            .into_iter()
            .map(|o| Ratio::new(1, o as i64 + *shift as i64))
            .collect(),
    }
}

fn to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact coefficients `(t, a_t)` over the support, zeros omitted, with the
/// scale applied.
pub fn coefficient_table(spec: &DirichletSpec) -> Result<Vec<(u64, Ratio<i64>)>, DirichletError> {
    spec.check()?;
    let Some((first, last)) = spec.integer_range() else {
        return Ok(Vec::new());
    };
    let primes = match window_of(&spec.rule) {
        Some(w) => w.primes()?,
        None => Vec::new(),
    };
    let scale = spec.scale.unwrap_or(Ratio::from_integer(1));
    Ok(coefficients(&spec.rule, &primes, first, last)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != Ratio::from_integer(0))
        .map(|(i, c)| (first + i as u64, c * scale))
        .collect())
}

/// `sum a_t t^(-2 pi i y)` with Kahan summation inside fixed-size chunks and
/// an ordered compensated reduction of the chunk sums.
pub fn evaluate(spec: &DirichletSpec, y: f64) -> Result<Complex64, DirichletError> {
    spec.check()?;
    let Some((first, last)) = spec.integer_range() else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let primes = match window_of(&spec.rule) {
        Some(w) => w.primes()?,
        None => Vec::new(),
    };
    let n_chunks = (last - first) / CHUNK + 1;
    let partial = par::map_range(0..n_chunks as i64, |c| {
        let a = first + c as u64 * CHUNK;
        let b = (a + CHUNK - 1).min(last);
        let mut acc = Kahan::default();
        match spec.rule {
            CoeffRule::Unit => {
                for t in a..=b {
                    acc.add(phase(t as f64, y));
                }
            }
            _ => {
                for (i, c) in coefficients(&spec.rule, &primes, a, b).into_iter().enumerate() {
                    if *c.numer() != 0 {
                        acc.add(phase((a + i as u64) as f64, y) * to_f64(c));
                    }
                }
            }
        }
        acc.value()
    });
    let mut total = Kahan::default();
    for z in partial {
        total.add(z);
    }
    let scale = spec.scale.map_or(1.0, to_f64);
    Ok(total.value() * scale)
}

/// The value at `y = 0` as an exact rational.
pub fn exact_sum(spec: &DirichletSpec) -> Result<Ratio<i128>, DirichletError> {
    let mut sum = Ratio::from_integer(0i128);
    for (_, c) in coefficient_table(spec)? {
        sum += Ratio::new(*c.numer() as i128, *c.denom() as i128);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn window() -> SieveWindow {
        SieveWindow::from_log(16.0, 0.25)
    }

    #[test]
    fn unit_examples() {
        let s = DirichletSpec::unit(10.0, 15.0);
        assert_eq!(evaluate(&s, 0.0).unwrap(), Complex64::new(5.0, 0.0));
        let y = 0.3;
        let direct: Complex64 = (11..=15)
            .map(|t| Complex64::from_polar(1.0, -2.0 * PI * y * (t as f64).ln()))
            .sum();
        assert!((evaluate(&s, y).unwrap() - direct).norm() < 1e-12);
        for y in [-7.0, 0.01, 123.4] {
            assert!(evaluate(&s, y).unwrap().norm() <= 5.0 + 1e-12);
        }
    }

    #[test]
    fn f_polynomial() {
        for d in [1u32, 7, 100, 1000] {
            let d = d as f64;
            let f = DirichletSpec::unit(d, 4.0 * d);
            assert_eq!(evaluate(&f, 0.0).unwrap(), Complex64::new(3.0 * d, 0.0));
            assert_eq!(exact_sum(&f).unwrap(), Ratio::from_integer(3 * d as i128));
            for u in [0.1, 2.5, -40.0] {
                assert!(evaluate(&f, u).unwrap().norm() <= 3.0 * d + 1e-9);
            }
        }
    }

    #[test]
    fn rules_at_zero_match_exact_sums() {
        let w = window();
        let mut tab = BTreeMap::new();
        tab.insert(12, Ratio::new(1, 3));
        tab.insert(13, Ratio::new(-1, 2));
        tab.insert(99, Ratio::new(1, 1));
        let rules = [
            CoeffRule::Unit,
            CoeffRule::InS(w),
            CoeffRule::NotInS(w),
            CoeffRule::OmegaWeighted { window: w, shift: 1 },
            CoeffRule::PrimesInWindow(w),
            CoeffRule::Tabulated(tab),
        ];
        for rule in rules {
            let s = DirichletSpec::new(10.0, 300.5, rule).with_scale(Ratio::new(2, 3));
            let exact = exact_sum(&s).unwrap();
            let float = *exact.numer() as f64 / *exact.denom() as f64;
            let z = evaluate(&s, 0.0).unwrap();
            assert!((z.re - float).abs() < 1e-12 && z.im == 0.0, "{:?}", s.rule);
            let y = 0.77;
            let (p, m) = (evaluate(&s, y).unwrap(), evaluate(&s, -y).unwrap());
            assert!((p.conj() - m).norm() < 1e-12);
        }
    }

    #[test]
    fn in_and_out_partition() {
        let w = window();
        let a = exact_sum(&DirichletSpec::new(0.0, 5000.0, CoeffRule::InS(w))).unwrap();
        let b = exact_sum(&DirichletSpec::new(0.0, 5000.0, CoeffRule::NotInS(w))).unwrap();
        assert_eq!(a + b, Ratio::from_integer(5000));
    }

    #[test]
    fn chunked_sum_spans_chunks() {
        let s = DirichletSpec::unit(0.0, (2 * CHUNK + 17) as f64);
        assert_eq!(evaluate(&s, 0.0).unwrap().re, (2 * CHUNK + 17) as f64);
    }

    #[test]
    fn budget_and_bad_shift() {
        assert!(matches!(
            evaluate(&DirichletSpec::unit(0.0, 2e8), 0.0),
            Err(DirichletError::BudgetExceeded { .. })
        ));
        let s = DirichletSpec::new(1.0, 5.0, CoeffRule::OmegaWeighted { window: window(), shift: 0 });
        assert!(evaluate(&s, 0.0).is_err());
    }
}
