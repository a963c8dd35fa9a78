//! Robustness monitoring for signal temporal logic with value freezing.
//!
//! The freeze operator `*i` stores the evaluation time; predicates can then
//! relate signal values at the stored time to values at the current time,
//! which expresses properties like local extrema or bounded growth that
//! plain temporal logic cannot. This crate provides:
//!
//! - [`formula`]: the syntax tree, a concrete text grammar with parser and
//!   printer, and static analyses (necessary input length, free indices).
//! - [`monitor`]: discrete robustness over sampled trajectories - a signed
//!   margin whose sign decides satisfaction and whose magnitude bounds a
//!   neighbourhood of trajectories with the same outcome - plus an exact
//!   Boolean evaluator and a sliding-window fast path for `F`/`G`.
//! - [`rewrite`]: semantics-preserving passes that reduce the number of
//!   frozen indices, the dominant factor of monitoring cost.
//! - [`signal`]: timed state sequences, CSV import/export, sup-distance
//!   and seeded perturbation.
//! - [`odesim`]: fixed-step Runge-Kutta simulation of built-in and
//!   user-defined parameterized ODE models.
//! - [`sweep`]: adaptive robustness maps over parameter boxes, exported as
//!   CSV and SVG.
//! - [`cli`]: the `stlstar` binary's `monitor`, `sweep`, `optimize` and
//!   `simulate` subcommands.
//!
//! ```
//! use stlstar::formula::parse;
//! use stlstar::monitor::monitor;
//! use stlstar::signal::TimedStateSequence;
//!
//! // "within the next two time units, x rises by at least 8"
//! let phi = parse("*1 F[0,2](x >= x*1 + 8)").unwrap();
//! let seq = TimedStateSequence::sample(
//!     vec!["x".into()],
//!     |t| vec![5.0 * t],
//!     0.5,
//!     2.0,
//! )
//! .unwrap();
//! let rho = monitor(&phi, &seq).unwrap();
//! assert_eq!(rho, (10.0 - 8.0) / 2.0);
//! ```

pub mod cli;
pub mod formula;
pub mod monitor;
pub mod odesim;
pub mod rewrite;
pub mod signal;
pub mod sweep;
