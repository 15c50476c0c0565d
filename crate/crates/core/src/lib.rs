//! Numerical laboratory for the value distribution of `log L(sigma + it)`
//! just to the right of the critical line.
//!
//! The crate is organized bottom-up:
//!
//! * [`arith`]: primes, Bernoulli numbers, Dirichlet characters.
//! * [`lfunction`]: Euler-product data of an L-function and derived sums.
//! * [`zeta`]: Euler–Maclaurin evaluation of `zeta` and Dirichlet `L` with a
//!   continuous logarithm.
//! * [`random_model`]: random Euler products and their moments.
//! * [`measures`]: empirical measures, box discrepancy, characteristic functions.
//! * [`smoothing`]: Beurling–Selberg functions and their certificates.
//! * [`clt`]: Hermite machinery and the Gaussian leading-order prediction.
//!
//! [`rng`], [`stats`] and [`quadrature`] are shared utilities.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod clt;
mod ddouble;
pub mod error;
pub mod lfunction;
pub mod measures;
pub mod quadrature;
pub mod random_model;
pub mod rng;
pub mod smoothing;
pub mod stats;
pub mod zeta;

pub use arith::{characters_mod, primes_up_to, DirichletCharacter, PrimeTable};
pub use error::{Error, Result};
pub use lfunction::{LFunctionSpec, SpecRegistry};
pub use measures::{EmpiricalMeasure, Provenance, Rectangle, RunConfig};
pub use num_complex::Complex64;
pub use random_model::{RandomAssignment, RandomLogL};
pub use smoothing::BSFunction;
pub use zeta::{EvalParams, LogLValue};
