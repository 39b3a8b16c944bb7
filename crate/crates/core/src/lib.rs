//! Moment functional of unit p-balls.
//!
//! `f(n, p)` is the mean of `⟨x, y⟩²` over independent uniform points
//! `x ∈ B_p^n` and `y ∈ B_q^n` with `1/p + 1/q = 1`. This crate evaluates it
//! three independent ways (gamma closed form, infinite product in
//! `t = 1/(pq)`, Monte Carlo) and checks the identities, monotonicity in `p`
//! and the bound `f ≤ n/(n+2)²` that relate them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod gamma;
pub mod moments;
pub mod montecarlo;
pub mod pball;
pub mod report;
mod truncation;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use gamma::{ln_beta, ln_gamma, ProductValue, TruncationPolicy};
pub use moments::{f_gamma, f_product, MomentResult, Route};
pub use pball::{conjugate, Dimension, Exponent};
pub use truncation::TruncatedSum;
