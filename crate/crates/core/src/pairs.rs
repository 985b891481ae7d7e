//! The pair statistic: ordered pairs of eigenvalues whose difference lies in
//! an interval, normalized by the cutoff.

use serde::Serialize;

use crate::form::ReducedForm;
use crate::spectrum::{Spectrum, SpectrumError};

/// Whether the lower endpoint belongs to the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoints {
    /// `[lo, hi]`
    Closed,
    /// `(lo, hi]`
    HalfOpen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub endpoints: Endpoints,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            endpoints: Endpoints::Closed,
        }
    }

    pub fn half_open(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            endpoints: Endpoints::HalfOpen,
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        let above = match self.endpoints {
            Endpoints::Closed => x >= self.lo,
            Endpoints::HalfOpen => x > self.lo,
        };
        above && x <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        match self.endpoints {
            Endpoints::Closed => !(self.lo <= self.hi),
            Endpoints::HalfOpen => !(self.lo < self.hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub form: ReducedForm,
    pub cutoff: f64,
    pub interval: Interval,
    pub raw_pairs: u64,
    pub statistic: f64,
}

/// Counts ordered pairs `(j, k)`, `j != k`, of values `<= n` with
/// `v_j - v_k` in `interval`.
pub fn pair_statistic(
    spectrum: &Spectrum,
    n: f64,
    interval: Interval,
) -> Result<PairReport, SpectrumError> {
    if !(n <= spectrum.cutoff()) {
        return Err(SpectrumError::CutoffExceedsSpectrum {
            requested: n,
            available: spectrum.cutoff(),
        });
    }
    let raw_pairs = count_pairs(spectrum.up_to(n), interval);
    Ok(PairReport {
        form: *spectrum.form(),
        cutoff: n,
        interval,
        raw_pairs,
        statistic: raw_pairs as f64 / n,
    })
}

/// Two-pointer count over a sorted slice.
///
/// For each `k` the admissible `j` form a contiguous block `[lo_ptr, hi_ptr)`
/// since `v_j - v_k` is nondecreasing in `j`, and both block ends only move
/// forward as `k` grows. Membership is tested on the computed difference
/// itself, so the count agrees with a brute-force loop bit for bit.
pub fn count_pairs(values: &[f64], interval: Interval) -> u64 {
    if interval.is_empty() || !interval.lo.is_finite() || !interval.hi.is_finite() {
        return 0;
    }
    let len = values.len();
    let below = |d: f64| match interval.endpoints {
        Endpoints::Closed => d < interval.lo,
        Endpoints::HalfOpen => d <= interval.lo,
    };
    let mut lo_ptr = 0usize;
    let mut hi_ptr = 0usize;
    let mut total = 0u64;
    for k in 0..len {
        let vk = values[k];
        while lo_ptr < len && below(values[lo_ptr] - vk) {
            lo_ptr += 1;
        }
        if hi_ptr < lo_ptr {
            hi_ptr = lo_ptr;
        }
        while hi_ptr < len && values[hi_ptr] - vk <= interval.hi {
            hi_ptr += 1;
        }
        total += (hi_ptr - lo_ptr) as u64;
        if (lo_ptr..hi_ptr).contains(&k) {
            total -= 1;
        }
    }
    total
}

/// O(n^2) reference count.
pub fn count_pairs_brute(values: &[f64], interval: Interval) -> u64 {
    let mut total = 0;
    for (j, &vj) in values.iter().enumerate() {
        for (k, &vk) in values.iter().enumerate() {
            if j != k && interval.contains(vj - vk) {
                total += 1;
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::validate_form;
    use crate::spectrum::enumerate;
    use proptest::prelude::*;

    #[test]
    fn equal_pair_counted_twice() {
        let s = enumerate(&validate_form(1.0, 0.0, 1.0).unwrap(), 2.0).unwrap();
        let r = pair_statistic(&s, 2.0, Interval::closed(0.0, 0.1)).unwrap();
        assert_eq!(r.raw_pairs, 2);
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn empty_interval_counts_nothing() {
        let s = enumerate(&validate_form(1.0, 0.3, 1.7).unwrap(), 50.0).unwrap();
        assert_eq!(
            pair_statistic(&s, 50.0, Interval::closed(0.2, 0.1))
                .unwrap()
                .raw_pairs,
            0
        );
    }

    #[test]
    fn reflection_symmetry() {
        let s = enumerate(&validate_form(1.3, 0.4, 2.1).unwrap(), 300.0).unwrap();
        for d in [0.01, 0.1, 0.7] {
            let a = pair_statistic(&s, 300.0, Interval::closed(0.0, d)).unwrap();
            let b = pair_statistic(&s, 300.0, Interval::closed(-d, 0.0)).unwrap();
            assert_eq!(a.raw_pairs, b.raw_pairs);
        }
    }

    #[test]
    fn cutoff_beyond_spectrum_rejected() {
        let s = enumerate(&validate_form(1.0, 0.0, 1.0).unwrap(), 10.0).unwrap();
        assert!(matches!(
            pair_statistic(&s, 11.0, Interval::closed(0.0, 1.0)),
            Err(SpectrumError::CutoffExceedsSpectrum { .. })
        ));
    }

    proptest! {
        #[test]
        fn sweep_matches_brute_force(
            mut v in prop::collection::vec(0.0f64..20.0, 0..120),
            lo in -3.0f64..3.0, w in 0.0f64..3.0, closed in any::<bool>(),
        ) {
            v.sort_by(f64::total_cmp);
            let iv = if closed { Interval::closed(lo, lo + w) } else { Interval::half_open(lo, lo + w) };
            prop_assert_eq!(count_pairs(&v, iv), count_pairs_brute(&v, iv));
        }

        #[test]
        fn sweep_matches_brute_force_with_ties(
            mut v in prop::collection::vec(0u8..12, 0..80),
            lo in -4i8..4, w in 0u8..4,
        ) {
            v.sort();
            let v: Vec<f64> = v.into_iter().map(|x| x as f64 * 0.5).collect();
            let iv = Interval::closed(lo as f64 * 0.5, (lo as f64 + w as f64) * 0.5);
            prop_assert_eq!(count_pairs(&v, iv), count_pairs_brute(&v, iv));
        }
    }
}
