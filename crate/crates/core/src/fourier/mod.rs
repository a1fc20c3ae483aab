//! Dense and analytic representations of Fourier states.

mod basis;
mod series;
mod state;

pub use basis::{from_fourier_basis, to_fourier_basis, FourierAmplitudes, FourierSpectrum};
pub use series::{
    alias_fold, fidelity_threshold, initial_spectrum_weight, series_coefficient, AliasedAmplitudes,
    PhaseFunctionSpec, SeriesCoefficient,
};
pub use state::{approx_initial_state, fidelity, pure_fourier_state, rotation_angles, StateVector};

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Default upper bound on qubits for dense amplitude vectors (4M amplitudes).
pub const DEFAULT_AMPLITUDE_CAP: usize = 22;

/// Environment variable overriding [`DEFAULT_AMPLITUDE_CAP`].
pub const AMPLITUDE_CAP_ENV: &str = "FOURIER_DISTILL_MAX_QUBITS";

/// Largest register the harmonic index type (`i128`) can address.
pub const MAX_REGISTER_QUBITS: u32 = 120;

/// Current dense-vector qubit cap: the environment override if it parses,
/// otherwise the default.
pub fn amplitude_cap() -> usize {
    std::env::var(AMPLITUDE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&c| (1..=30).contains(&c))
        .unwrap_or(DEFAULT_AMPLITUDE_CAP)
}

pub(crate) fn check_capacity(qubits: usize) -> Result<()> {
    let cap = amplitude_cap();
    if qubits > cap {
        return Err(Error::Capacity { qubits, cap });
    }
    Ok(())
}

/// Number of qubits in a register. `N = 2^n` is its Hilbert-space dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegisterSize(u32);

impl RegisterSize {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_REGISTER_QUBITS {
            return Err(invalid(format!(
                "register size must be in 1..={MAX_REGISTER_QUBITS}, got {n}"
            )));
        }
        Ok(Self(n))
    }

    pub fn qubits(self) -> u32 {
        self.0
    }

    /// `N = 2^n`.
    pub fn dim(self) -> u128 {
        1u128 << self.0
    }

    /// `N` as a dense-vector length; fails past the amplitude cap.
    pub fn dense_dim(self) -> Result<usize> {
        check_capacity(self.0 as usize)?;
        Ok(1usize << self.0)
    }
}

impl std::fmt::Display for RegisterSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduces `k` into `0..N`.
pub(crate) fn wrap_index(k: i128, n: RegisterSize) -> u128 {
    k.rem_euclid(n.dim() as i128) as u128
}

/// Representative of `j mod N` in `(-N/2, N/2]`.
pub fn signed_index(j: i128, n: RegisterSize) -> i128 {
    let dim = n.dim() as i128;
    let r = j.rem_euclid(dim);
    if r > dim / 2 {
        r - dim
    } else {
        r
    }
}
