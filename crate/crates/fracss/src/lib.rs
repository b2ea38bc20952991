//! Numerical library for simulating fractional-order dynamical systems.
//!
//! The plant under study is the two-derivative fractional differential
//! equation
//!
//! ```text
//! a2 * y^(alpha)(t) + a1 * y^(beta)(t) + a0 * y(t) = u(t),   alpha > beta > 0,
//! ```
//!
//! started from zero initial history. The crate provides
//!
//! * [`gl`] — the Grünwald-Letnikov differintegral: binomial coefficient
//!   generation, direct differintegration of sampled signals, and the
//!   truncated power-series (FIR) form of the discrete operator;
//! * [`cfe`] — the degree-9 continued-fraction expansion of Tustin's
//!   operator: exact integer coefficient tables evaluated at a real order,
//!   packaged as an IIR filter, plus a Padé reference oracle for tests;
//! * [`statespace`] — decomposition of the plant into a two-state
//!   fractional state-space model, one simulator per discretization
//!   (long-memory FIR vs. ten-tap IIR), history-buffer accounting, and
//!   controllability analysis;
//! * [`control`] — a fractional PI^lambda D^delta controller block and a
//!   unity-negative-feedback closed-loop simulator;
//! * [`signal`] / [`error`] — shared plumbing.
//!
//! All computations are deterministic: accumulation orders are fixed, no
//! global state exists, and identical inputs produce identical outputs
//! bit for bit.

pub mod cfe;
pub mod control;
pub mod error;
pub mod gl;
pub mod signal;
pub mod statespace;

pub use error::Error;
pub use signal::SampledSignal;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
