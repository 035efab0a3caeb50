//! Nonnegative rank computation and certification for nonnegative matrices,
//! together with a numerical laboratory for the rank-three integral operator
//! with kernel `1 + cos(s - t)` on `[0, 2π)`.
//!
//! The crate is `no_std` (with `alloc`) so that the algorithms can be embedded
//! anywhere; file formats, reports and the command-line tool live in the
//! companion `nnrank` crate.
//!
//! Module map:
//!
//! - [`matcore`]: exact (rational) and floating dense matrices, ranks,
//!   scalings/permutations and kernel discretization.
//! - [`nnfactor`]: factorization witnesses `T = LR` with `L, R >= 0`,
//!   verification, rank bounds and witness transfer laws.
//! - [`lowrank`]: constructive factorization with `k = rank(T)` for rank <= 2.
//! - [`rank3geo`]: rank-three instances via the nested polygon problem.
//! - [`nmf`]: seeded multi-restart alternating nonnegative least squares.
//! - [`sconelab`]: moments, ice-cream cone membership, Poisson preimages and
//!   the discretization growth experiment.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod lowrank;
pub mod matcore;
pub mod nmf;
pub mod nnfactor;
pub mod rank3geo;
pub mod sconelab;

pub use error::{Error, Result};
pub use matcore::{
    rank_exact, rank_float, sample_kernel, AnyMatrix, ExactMatrix, FloatMatrix, GridSpec, Matrix,
    Permutation, Rational, Scalar,
};
pub use nnfactor::{AnyFactorization, NonnegFactorization, RankBounds};
