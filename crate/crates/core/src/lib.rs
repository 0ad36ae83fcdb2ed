//! Vasyunin corrections for the strong Nyman-Beurling criterion.
//!
//! A *natural function* is a finite combination `Σ α_a ⌊x/a⌋` with
//! `Σ α_a / a = 0`. Vasyunin builds sequences of natural functions from
//! idempotent *seeds* (functions taking only the values 0 and 1) so that the
//! n-th member equals 1 on `[1, n+1)`. This crate constructs those sequences
//! for three seed families, computes their coefficients by recurrence and in
//! closed form, integrates the resulting step functions exactly against
//! `x⁻² dx`, and measures how far the sequences are from converging.
//!
//! Module map:
//!
//! - [`numtheory`]: Möbius, power-of-two indicator, Dirichlet convolution and
//!   inversion, closed-form correction coefficients.
//! - [`natfunc`]: exact algebra, evaluation and weighted integration of
//!   natural functions.
//! - [`corrections`]: seed families, the coefficient recurrence, plateau and
//!   canonical-form checks.
//! - [`diagnostics`]: norm differences with rigorous tail bounds, integral
//!   diagnostics and the divergence report.
//! - [`cli`]: table-producing commands behind the `vasyunin` binary.
//!
//! All exact values are [`Rational`]s (GMP rationals, always in lowest terms).
//! Real numbers such as `ln 2` only appear in [`real::LogCombination`]
//! closed forms and decimal renderings.

pub mod cli;
pub mod corrections;
pub mod diagnostics;
pub mod error;
pub mod natfunc;
pub mod numtheory;
pub mod real;

pub use rug::Rational;

pub use corrections::{build_correction, Correction, CorrectionSequence, SeedFamily};
pub use error::{Error, Result};
pub use natfunc::{NaturalFunction, StepProfile};
pub use real::{LogCombination, Precision};
