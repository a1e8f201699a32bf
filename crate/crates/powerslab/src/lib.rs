//! powerslab: computational tools around representations of integers as a
//! prime plus powers of two.
//!
//! The crate has three layers:
//!
//! * rigorous scalar arithmetic — outward-rounded intervals, prime sieves,
//!   integer factorization, and the singular series `sigma` built on the
//!   twin-prime constant;
//! * the analytic machinery — multiplicity spectra of power-of-two sums and
//!   the truncation estimates for the correlation constants `A(k)`, the
//!   Goldbach–Linnik admissibility criterion, and the Romanov-style density
//!   lower bound;
//! * reporting — deterministic tables serialized to JSON, CSV, or markdown,
//!   exposed through the `powerslab` command-line binary.

pub mod cli;
pub mod empirical;
pub mod error;
pub mod factor;
pub mod interval;
pub mod linnik;
pub mod primes;
pub mod report;
pub mod romanov;
pub mod sigma;
pub mod spectra;

pub use error::{Error, Result};
pub use interval::Interval;
