//! Spectra of flat tori and their gap statistics.
//!
//! The eigenvalues of the Laplacian on a flat torus are, up to scaling, the
//! values of a positive binary quadratic form. This crate enumerates them,
//! counts close pairs, and provides the exact integer and Dirichlet
//! polynomial machinery that goes with the pair-correlation counting
//! arguments.

pub mod cache;
pub mod deviation;
pub mod diophantine;
pub mod dirichlet;
pub mod form;
pub mod moduli;
pub mod pairs;
pub mod par;
pub mod smoothed;
pub mod spectrum;
pub mod window;

pub use form::{discriminant_scale, validate_form, ReducedForm, SymmetryClass};
pub use pairs::{pair_statistic, Interval, PairReport};
pub use spectrum::{eigenvalue, enumerate, Spectrum};
