//! Exact integer combinatorics behind the pair-correlation counts.

pub mod count8;
pub mod invariants;
pub mod primes;
pub mod sieve_window;
pub mod tquad;
pub mod transform;

use thiserror::Error;

pub use count8::{count_8tuples, CoordBox, Count8Params, StratumCounts};
pub use invariants::{det_invariants, substitution_residual, DetInvariants, OctTuple};
pub use sieve_window::{in_s_rho, mertens_product, omega_i, rough_density, SieveWindow};
pub use tquad::{t_quadruples_rect, TQuad};
pub use transform::{quadruple_inverse, quadruple_transform};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiophantineError {
    #[error("cannot invert: a1, a2 or b1, b2 have different parity")]
    InverseParityViolation,
    #[error("entry {0} exceeds the overflow-safe bound 2e9")]
    Overflow(i128),
    #[error("b1 = {num}/{den} is not an integer")]
    NonDivisible { num: i128, den: i128 },
    #[error("b2 * b3 * b4 must be nonzero")]
    ZeroDenominator,
    #[error("search space of {needed} exceeds the budget {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error("sieve limit {0} exceeds 1e8")]
    SieveBudgetExceeded(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
