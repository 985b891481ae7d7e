//! Positive binary quadratic forms `q(m, n) = a1 m^2 + a2 m n + a3 n^2` and
//! the quantities attached to them: the normalization constant `D`, which
//! makes the desymmetrized spectrum have unit mean spacing, and the density
//! of the GL2(R)-invariant measure on the space of forms.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("coefficients must be finite, got ({0}, {1}, {2})")]
    NonFinite(f64, f64, f64),
    #[error("a1 and a3 must be positive, got a1={a1}, a3={a3}")]
    NonPositive { a1: f64, a3: f64 },
    #[error("form is not positive definite: 4*a1*a3 - a2^2 = {0}")]
    NonPositiveDefinite(f64),
    #[error("rectangular forms must have a2 = 0, got {0}")]
    RectangularWithCrossTerm(f64),
    #[error("operation requires a {expected} form")]
    WrongSymmetryClass { expected: SymmetryClass },
    #[error("malformed form JSON: {0}")]
    Json(String),
}

/// Which desymmetrization and normalization applies to a form.
///
/// Generic forms only have the symmetry `(m, n) -> (-m, -n)`; rectangular
/// (diagonal) forms additionally have `(m, n) -> (m, -n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    Generic,
    Rectangular,
}

impl SymmetryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryClass::Generic => "generic",
            SymmetryClass::Rectangular => "rectangular",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            SymmetryClass::Generic => 0,
            SymmetryClass::Rectangular => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SymmetryClass::Generic),
            1 => Some(SymmetryClass::Rectangular),
            _ => None,
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SymmetryClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(SymmetryClass::Generic),
            "rectangular" => Ok(SymmetryClass::Rectangular),
            other => Err(format!("unknown symmetry class `{other}`")),
        }
    }
}

/// A validated positive definite form.
///
/// Immutable after construction. `reduced` records whether the coefficients
/// satisfy `0 <= a2 <= a1 <= a3`; statistics are defined either way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedForm {
    a1: f64,
    a2: f64,
    a3: f64,
    class: SymmetryClass,
    reduced: bool,
}

/// Validates a generic form.
pub fn validate_form(a1: f64, a2: f64, a3: f64) -> Result<ReducedForm, FormError> {
    ReducedForm::new(a1, a2, a3, SymmetryClass::Generic)
}

impl ReducedForm {
    pub fn new(a1: f64, a2: f64, a3: f64, class: SymmetryClass) -> Result<Self, FormError> {
        if !(a1.is_finite() && a2.is_finite() && a3.is_finite()) {
            return Err(FormError::NonFinite(a1, a2, a3));
        }
        if a1 <= 0.0 || a3 <= 0.0 {
            return Err(FormError::NonPositive { a1, a3 });
        }
        let disc = 4.0 * a1 * a3 - a2 * a2;
        if disc <= 0.0 {
            return Err(FormError::NonPositiveDefinite(disc));
        }
        if class == SymmetryClass::Rectangular && a2 != 0.0 {
            return Err(FormError::RectangularWithCrossTerm(a2));
        }
        let reduced = 0.0 <= a2 && a2 <= a1 && a1 <= a3;
        Ok(ReducedForm {
            a1,
            a2,
            a3,
            class,
            reduced,
        })
    }

    /// The diagonal form `a1 m^2 + a3 n^2`.
    pub fn rectangular(a1: f64, a3: f64) -> Result<Self, FormError> {
        Self::new(a1, 0.0, a3, SymmetryClass::Rectangular)
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn a3(&self) -> f64 {
        self.a3
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.a1, self.a2, self.a3)
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// `4 a1 a3 - a2^2`, always positive.
    pub fn discriminant(&self) -> f64 {
        4.0 * self.a1 * self.a3 - self.a2 * self.a2
    }

    /// Evaluates `q(m, n)` in floating point.
    #[inline]
    pub fn q(&self, m: i64, n: i64) -> f64 {
        let (m, n) = (m as f64, n as f64);
        self.a1 * m * m + self.a2 * m * n + self.a3 * n * n
    }

    /// The same form with every coefficient multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self, FormError> {
        Self::new(
            lambda * self.a1,
            lambda * self.a2,
            lambda * self.a3,
            self.class,
        )
    }

    /// Factor turning `q(m, n)` into a normalized eigenvalue.
    ///
    /// Generic: `1 / D`. Rectangular: `pi / (4 sqrt(a1 a3))`.
    pub fn eigenvalue_factor(&self) -> f64 {
        match self.class {
            SymmetryClass::Generic => 1.0 / discriminant_scale(self),
            SymmetryClass::Rectangular => PI / (4.0 * (self.a1 * self.a3).sqrt()),
        }
    }

    /// JSON object with 17 significant digits per coefficient.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"a1\":{:.16e},\"a2\":{:.16e},\"a3\":{:.16e},\"class\":\"{}\"}}",
            self.a1, self.a2, self.a3, self.class
        )
    }

    pub fn from_json(text: &str) -> Result<Self, FormError> {
        #[derive(Deserialize)]
        struct Wire {
            a1: f64,
            a2: f64,
            a3: f64,
            class: SymmetryClass,
        }
        let wire: Wire =
            serde_json::from_str(text).map_err(|e| FormError::Json(e.to_string()))?;
        Self::new(wire.a1, wire.a2, wire.a3, wire.class)
    }
}

/// `D = sqrt(4 a1 a3 - a2^2) / pi`.
pub fn discriminant_scale(form: &ReducedForm) -> f64 {
    form.discriminant().sqrt() / PI
}

/// Density of the hyperbolic measure with respect to `da1 da2 da3`:
/// `(4 a1 a3 - a2^2)^(-3/2)`.
pub fn hyperbolic_density(form: &ReducedForm) -> Result<f64, FormError> {
    if form.class != SymmetryClass::Generic {
        return Err(FormError::WrongSymmetryClass {
            expected: SymmetryClass::Generic,
        });
    }
    Ok(form.discriminant().powf(-1.5))
}

/// Density of `da1 da3 / (a1 a3)` on rectangular forms.
pub fn rectangular_density(form: &ReducedForm) -> Result<f64, FormError> {
    if form.class != SymmetryClass::Rectangular {
        return Err(FormError::WrongSymmetryClass {
            expected: SymmetryClass::Rectangular,
        });
    }
    Ok(1.0 / (form.a1 * form.a3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_form_is_reduced() {
        let f = validate_form(1.0, 0.0, 1.0).unwrap();
        assert!(f.is_reduced());
    }

    #[test]
    fn discriminant_boundary_rejected() {
        assert!(matches!(
            validate_form(1.0, 2.0, 1.0),
            Err(FormError::NonPositiveDefinite(d)) if d == 0.0
        ));
    }

    #[test]
    fn non_positive_rejected() {
        assert!(matches!(
            validate_form(0.0, 0.0, 1.0),
            Err(FormError::NonPositive { .. })
        ));
        assert!(matches!(
            validate_form(1.0, 0.0, -2.0),
            Err(FormError::NonPositive { .. })
        ));
    }

    #[test]
    fn non_reduced_flagged_not_rejected() {
        let f = validate_form(3.0, 1.0, 2.0).unwrap();
        assert!(!f.is_reduced());
        let g = validate_form(2.0, 1.0, 3.0).unwrap();
        assert!(g.is_reduced());
    }

    #[test]
    fn discriminant_scale_examples() {
        let d = |a1, a2, a3| discriminant_scale(&validate_form(a1, a2, a3).unwrap());
        assert!((d(1.0, 0.0, 1.0) - 2.0 / PI).abs() < 1e-15);
        assert!((d(1.0, 0.0, 1.0) - 0.6366198).abs() < 1e-7);
        assert!((d(1.0, 1.0, 1.0) - 0.5513289).abs() < 1e-7);
        assert!((d(2.0, 1.0, 3.0) - 23f64.sqrt() / PI).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_density_examples() {
        let h = |a1, a2, a3| hyperbolic_density(&validate_form(a1, a2, a3).unwrap()).unwrap();
        assert!((h(1.0, 0.0, 1.0) - 0.125).abs() < 1e-16);
        assert!((h(1.0, 1.0, 1.0) - 3f64.powf(-1.5)).abs() < 1e-16);
        assert!((h(2.0, 1.0, 3.0) - 23f64.powf(-1.5)).abs() < 1e-17);
        let r = ReducedForm::rectangular(1.0, 2.0).unwrap();
        assert!(matches!(
            hyperbolic_density(&r),
            Err(FormError::WrongSymmetryClass { .. })
        ));
    }

    #[test]
    fn rectangular_requires_zero_cross_term() {
        assert!(ReducedForm::new(1.0, 0.5, 1.0, SymmetryClass::Rectangular).is_err());
    }

    #[test]
    fn json_is_bit_exact() {
        let f = validate_form(1.0 / 3.0, 0.1, std::f64::consts::E).unwrap();
        let text = f.to_json();
        assert!(text.contains("\"class\":\"generic\""));
        let back = ReducedForm::from_json(&text).unwrap();
        assert_eq!(back.a1().to_bits(), f.a1().to_bits());
        assert_eq!(back.a2().to_bits(), f.a2().to_bits());
        assert_eq!(back.a3().to_bits(), f.a3().to_bits());
        assert_eq!(back.class(), f.class());
    }

    proptest! {
        #[test]
        fn accepts_exactly_positive_definite(
            a1 in 0.01f64..10.0, a2 in -20.0f64..20.0, a3 in 0.01f64..10.0,
        ) {
            let positive = 4.0 * a1 * a3 - a2 * a2 > 0.0;
            prop_assert_eq!(validate_form(a1, a2, a3).is_ok(), positive);
        }

        #[test]
        fn scale_is_homogeneous(
            a1 in 0.5f64..3.0, a2 in 0.0f64..0.5, a3 in 0.5f64..3.0, lambda in 0.01f64..100.0,
        ) {
            let f = validate_form(a1, a2, a3).unwrap();
            let g = f.scaled(lambda).unwrap();
            let lhs = discriminant_scale(&g);
            let rhs = lambda * discriminant_scale(&f);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs);
        }
    }
}
