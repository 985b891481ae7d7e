//! Desymmetrized, unit-mean-spacing spectra.
//!
//! Generic forms use the half lattice `m > 0` or `m = 0, n > 0` and the
//! normalization `q / D`. Rectangular forms use the quarter lattice
//! `m > 0, n >= 0` and the factor `pi / (4 sqrt(a1 a3))`. In both cases the
//! number of normalized values up to `N` is `N + O(sqrt N)`.

use thiserror::Error;

use crate::form::{discriminant_scale, ReducedForm, SymmetryClass};
use crate::par;

/// Default cap on the number of materialized eigenvalues.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("index ({m}, {n}) is outside the fundamental domain of a {class} form")]
    IndexOutOfFundamentalDomain { m: i64, n: i64, class: SymmetryClass },
    #[error("cutoff {cutoff} projects to more than {budget} eigenvalues")]
    CutoffTooLarge { cutoff: f64, budget: u64 },
    #[error("cutoff must be finite and at least 1, got {0}")]
    BadCutoff(f64),
    #[error("requested cutoff {requested} exceeds the spectrum cutoff {available}")]
    CutoffExceedsSpectrum { requested: f64, available: f64 },
    #[error("spectrum invariant violated: {0}")]
    Invariant(String),
}

/// Sorted normalized eigenvalues `0 < L_1 <= L_2 <= ... <= N`, with
/// multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    form: ReducedForm,
    cutoff: f64,
    values: Vec<f64>,
}

impl Spectrum {
    /// Builds a spectrum from already sorted values, checking the range and
    /// ordering invariants.
    pub fn from_sorted(
        form: ReducedForm,
        cutoff: f64,
        values: Vec<f64>,
    ) -> Result<Self, SpectrumError> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(SpectrumError::BadCutoff(cutoff));
        }
        if let Some(i) = values.windows(2).position(|w| !(w[0] <= w[1])) {
            return Err(SpectrumError::Invariant(format!(
                "values not sorted at index {i}"
            )));
        }
        if let (Some(&first), Some(&last)) = (values.first(), values.last()) {
            if !(first > 0.0 && last <= cutoff) {
                return Err(SpectrumError::Invariant(format!(
                    "values [{first}, {last}] not within (0, {cutoff}]"
                )));
            }
        }
        Ok(Spectrum {
            form,
            cutoff,
            values,
        })
    }

    pub fn form(&self) -> &ReducedForm {
        &self.form
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    /// Values not exceeding `n`.
    pub fn up_to(&self, n: f64) -> &[f64] {
        let end = self.values.partition_point(|&v| v <= n);
        &self.values[..end]
    }

    /// The spectrum with a smaller cutoff, sharing no storage with `self`.
    pub fn truncated(&self, n: f64) -> Result<Spectrum, SpectrumError> {
        if n > self.cutoff {
            return Err(SpectrumError::CutoffExceedsSpectrum {
                requested: n,
                available: self.cutoff,
            });
        }
        Ok(Spectrum {
            form: self.form,
            cutoff: n,
            values: self.up_to(n).to_vec(),
        })
    }
}

/// Normalizes raw form values for one form.
#[derive(Debug, Clone, Copy)]
enum Normalizer {
    Divide(f64),
    Multiply(f64),
}

impl Normalizer {
    fn for_form(form: &ReducedForm) -> Self {
        match form.class() {
            SymmetryClass::Generic => Normalizer::Divide(discriminant_scale(form)),
            SymmetryClass::Rectangular => Normalizer::Multiply(form.eigenvalue_factor()),
        }
    }

    #[inline]
    fn apply(self, q: f64) -> f64 {
        match self {
            Normalizer::Divide(d) => q / d,
            Normalizer::Multiply(c) => c * q,
        }
    }

    /// Raw value `q` corresponding to the normalized value `lambda`.
    fn raw_bound(self, lambda: f64) -> f64 {
        match self {
            Normalizer::Divide(d) => lambda * d,
            Normalizer::Multiply(c) => lambda / c,
        }
    }
}

fn in_fundamental_domain(class: SymmetryClass, m: i64, n: i64) -> bool {
    match class {
        SymmetryClass::Generic => m > 0 || (m == 0 && n > 0),
        SymmetryClass::Rectangular => m > 0 && n >= 0,
    }
}

/// The normalized eigenvalue attached to the lattice index `(m, n)`.
pub fn eigenvalue(form: &ReducedForm, m: i64, n: i64) -> Result<f64, SpectrumError> {
    if !in_fundamental_domain(form.class(), m, n) {
        return Err(SpectrumError::IndexOutOfFundamentalDomain {
            m,
            n,
            class: form.class(),
        });
    }
    Ok(Normalizer::for_form(form).apply(form.q(m, n)))
}

/// Enumerates every normalized eigenvalue up to `cutoff` for either class.
pub fn enumerate(form: &ReducedForm, cutoff: f64) -> Result<Spectrum, SpectrumError> {
    enumerate_with_budget(form, cutoff, DEFAULT_BUDGET)
}

pub fn enumerate_generic(form: &ReducedForm, cutoff: f64) -> Result<Spectrum, SpectrumError> {
    debug_assert_eq!(form.class(), SymmetryClass::Generic);
    enumerate_with_budget(form, cutoff, DEFAULT_BUDGET)
}

pub fn enumerate_rectangular(
    form: &ReducedForm,
    cutoff: f64,
) -> Result<Spectrum, SpectrumError> {
    debug_assert_eq!(form.class(), SymmetryClass::Rectangular);
    enumerate_with_budget(form, cutoff, DEFAULT_BUDGET)
}

/// Enumeration with an explicit cap on the projected eigenvalue count.
///
/// The outer loop runs over `m`; for each `m` the admissible `n` form an
/// interval obtained from the quadratic formula, widened by one on each side
/// and filtered point by point with the same floating-point expression that
/// produces the stored value.
pub fn enumerate_with_budget(
    form: &ReducedForm,
    cutoff: f64,
    budget: u64,
) -> Result<Spectrum, SpectrumError> {
    if !cutoff.is_finite() || cutoff < 0.0 {
        return Err(SpectrumError::BadCutoff(cutoff));
    }
    // Weyl: the count is cutoff + O(sqrt(cutoff)).
    if cutoff > budget as f64 {
        return Err(SpectrumError::CutoffTooLarge { cutoff, budget });
    }
    let norm = Normalizer::for_form(form);
    let x = norm.raw_bound(cutoff);
    let (a1, a2, a3) = form.coefficients();
    let disc = form.discriminant();
    let class = form.class();

    let m_max = match class {
        SymmetryClass::Generic => (4.0 * a3 * x / disc).sqrt().floor() as i64 + 1,
        SymmetryClass::Rectangular => (x / a1).sqrt().floor() as i64 + 1,
    };
    let m_min = match class {
        SymmetryClass::Generic => 0,
        SymmetryClass::Rectangular => 1,
    };

    let stripes = par::map_range(m_min..m_max + 1, |m| {
        let mf = m as f64;
        let root_disc = (4.0 * a3 * x - disc * mf * mf).max(0.0);
        let s = root_disc.sqrt();
        let center = -a2 * mf;
        let mut n_lo = ((center - s) / (2.0 * a3)).floor() as i64 - 1;
        let n_hi = ((center + s) / (2.0 * a3)).ceil() as i64 + 1;
        if class == SymmetryClass::Rectangular || m == 0 {
            n_lo = n_lo.max(if m == 0 { 1 } else { 0 });
        }
        let mut out = Vec::new();
        for n in n_lo..=n_hi {
            if !in_fundamental_domain(class, m, n) {
                continue;
            }
            let v = norm.apply(form.q(m, n));
            if v <= cutoff && v > 0.0 {
                out.push(v);
            }
        }
        out
    });

    let total: usize = stripes.iter().map(Vec::len).sum();
    let mut values = Vec::with_capacity(total);
    for s in stripes {
        values.extend_from_slice(&s);
    }
    par::sort_floats(&mut values);
    Spectrum::from_sorted(*form, cutoff, values)
}

/// Weyl-law tolerance `20 (1 + a3 / D) sqrt(N)` used by the count checks.
pub fn weyl_tolerance(form: &ReducedForm, cutoff: f64) -> f64 {
    20.0 * (1.0 + form.a3() / discriminant_scale(form)) * cutoff.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::validate_form;
    use std::f64::consts::PI;

    /// Brute force over a square of indices, independent of the stripe logic.
    fn brute(form: &ReducedForm, cutoff: f64, r: i64) -> Vec<f64> {
        let mut v = Vec::new();
        for m in -r..=r {
            for n in -r..=r {
                if let Ok(l) = eigenvalue(form, m, n) {
                    if l <= cutoff {
                        v.push(l);
                    }
                }
            }
        }
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn eigenvalue_examples() {
        let f = validate_form(1.0, 0.0, 1.0).unwrap();
        assert!((eigenvalue(&f, 1, 0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((eigenvalue(&f, 1, 0).unwrap() - 1.5707963).abs() < 1e-7);
        assert!(matches!(
            eigenvalue(&f, 0, 0),
            Err(SpectrumError::IndexOutOfFundamentalDomain { .. })
        ));
        assert!(eigenvalue(&f, -1, 3).is_err());
        assert!(eigenvalue(&f, 0, -1).is_err());
        let r = ReducedForm::rectangular(2.0, 1.0).unwrap();
        let want = PI / (4.0 * 2f64.sqrt()) * 3.0;
        assert!((eigenvalue(&r, 1, 1).unwrap() - want).abs() < 1e-15);
        assert!((want - 1.6661).abs() < 1e-4);
        assert!(eigenvalue(&r, 0, 1).is_err());
        assert!(eigenvalue(&r, 1, -1).is_err());
    }

    #[test]
    fn identity_form_small_cutoffs() {
        let f = validate_form(1.0, 0.0, 1.0).unwrap();
        let s = enumerate(&f, 2.0).unwrap();
        assert_eq!(s.values(), brute(&f, 2.0, 3).as_slice());
        assert_eq!(s.values(), &[PI / 2.0, PI / 2.0]);

        let s = enumerate(&f, 3.2).unwrap();
        assert_eq!(s.values(), brute(&f, 3.2, 3).as_slice());
        assert_eq!(s.count(), 4);
        assert_eq!(s.values()[..2], [PI / 2.0, PI / 2.0]);
        assert!((s.values()[2] - PI).abs() < 1e-15 && (s.values()[3] - PI).abs() < 1e-15);
    }

    #[test]
    fn below_ground_state_is_empty() {
        let f = validate_form(1.0, 0.0, 1.0).unwrap();
        let s = enumerate(&f, 0.5).unwrap();
        assert_eq!(s.count(), 0);
        let r = ReducedForm::rectangular(1.0, 1.0).unwrap();
        assert_eq!(enumerate(&r, 0.5).unwrap().count(), 0);
    }

    #[test]
    fn rectangular_unit_cutoff() {
        // (1,0) gives pi/4 ~ 0.785; (1,1) gives pi/2 > 1, so only one value.
        let r = ReducedForm::rectangular(1.0, 1.0).unwrap();
        let s = enumerate(&r, 1.0).unwrap();
        assert_eq!(s.values(), brute(&r, 1.0, 2).as_slice());
        assert_eq!(s.values(), &[PI / 4.0]);
    }

    #[test]
    fn budget_is_enforced() {
        let f = validate_form(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            enumerate_with_budget(&f, 1e4, 1000),
            Err(SpectrumError::CutoffTooLarge { .. })
        ));
    }

    #[test]
    fn truncation_matches_fresh_enumeration() {
        let f = validate_form(1.3, 0.4, 2.1).unwrap();
        let big = enumerate(&f, 5000.0).unwrap();
        let small = enumerate(&f, 1234.5).unwrap();
        assert_eq!(big.truncated(1234.5).unwrap(), small);
        assert!(big.truncated(6000.0).is_err());
    }

    #[test]
    fn from_sorted_rejects_bad_input() {
        let f = validate_form(1.0, 0.0, 1.0).unwrap();
        assert!(Spectrum::from_sorted(f, 2.0, vec![1.0, 0.5]).is_err());
        assert!(Spectrum::from_sorted(f, 2.0, vec![1.0, 2.5]).is_err());
        assert!(Spectrum::from_sorted(f, 2.0, vec![0.0, 1.0]).is_err());
        assert!(Spectrum::from_sorted(f, 2.0, vec![1.0, 1.0]).is_ok());
    }
}
