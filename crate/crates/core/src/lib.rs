//! Simulation, verification and resource accounting for Fourier-state
//! distillation.
//!
//! A Fourier state `|γ^(k)⟩` on `n` qubits has computational-basis amplitudes
//! `e^{i2πky/N}/√N` with `N = 2^n`. It is an eigenstate of modular increment,
//! which makes it the resource register for phase-kickback rotations. The
//! fundamental state `|γ^(1)⟩` can be approximated with Clifford gates only
//! (a `Z` and an `S` on the two most significant qubits), and two approximate
//! copies can be purified by adding one register into the other and
//! postselecting the first register on `|γ^(0)⟩ = |+⟩^{⊗n}`.
//!
//! The crate is organised as:
//!
//! - [`fourier`]: dense state vectors, Fourier-basis conversion, the
//!   Fourier-series model of the Clifford-only initial state and fidelity
//!   metrics.
//! - [`distill`]: the distillation step, the round count, register-doubling
//!   schedules and two protocol engines (dense amplitudes for small `n`, a
//!   sparse harmonic model that scales past `n = 100`).
//! - [`gates`]: a Clifford+Toffoli gate-level simulator with a ripple-carry
//!   adder, the distillation circuit and Fourier-state cloning.
//! - [`resources`]: Toffoli counts, Monte Carlo expected cost with retries,
//!   circuit width and the phase-kickback versus `T`-sequence comparison.
//! - [`arbitrary_k`]: approximate preparation and full-width distillation of
//!   `|γ^(k)⟩` for arbitrary `k`.
//! - [`cli`]: the command implementations behind the `fourier-distill` binary.
//!
//! Qubit 0 is always the most significant bit of a register's basis index.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arbitrary_k;
pub mod cli;
pub mod distill;
mod error;
pub mod fourier;
pub mod gates;
pub mod numfmt;
pub mod resources;

pub use error::{Error, Result};
pub use num_complex::Complex64;
