//! Dirichlet polynomials `sum a_t t^(-2 pi i y)` over short integer ranges.

pub mod gstar;
pub mod mean_value;
pub mod ramare;
pub mod spec;

use thiserror::Error;

use crate::diophantine::DiophantineError;

pub use gstar::gstar;
pub use mean_value::{mean_value_check, MeanValue};
pub use ramare::{ramare_split, RamareParams, RamareSplit};
pub use spec::{evaluate, exact_sum, CoeffRule, DirichletSpec};

/// Largest number of terms a polynomial may have.
pub const TERM_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirichletError {
    #[error("{needed} terms exceed the budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("adaptive quadrature exceeded depth {0}")]
    QuadratureFailure(u32),
    #[error("exact arithmetic overflow")]
    Overflow,
    #[error(transparent)]
    Sieve(#[from] DiophantineError),
}

/// Compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    re: f64,
    im: f64,
    c_re: f64,
    c_im: f64,
}

impl Kahan {
    #[inline]
    fn add1(sum: &mut f64, c: &mut f64, x: f64) {
        let y = x - *c;
        let t = *sum + y;
        *c = (t - *sum) - y;
        *sum = t;
    }

    #[inline]
    pub(crate) fn add(&mut self, z: num_complex::Complex64) {
        Self::add1(&mut self.re, &mut self.c_re, z.re);
        Self::add1(&mut self.im, &mut self.c_im, z.im);
    }

    pub(crate) fn value(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re, self.im)
    }
}

/// `t^(-2 pi i y) = exp(-2 pi i y log t)`.
#[inline]
pub fn phase(t: f64, y: f64) -> num_complex::Complex64 {
    let theta = -2.0 * std::f64::consts::PI * y * t.ln();
    let (s, c) = theta.sin_cos();
    num_complex::Complex64::new(c, s)
}
