use serde::Serialize;

use crate::error::{invalid, Result};
use crate::fourier::{series_coefficient, RegisterSize};

/// Initial register size; one round on 5 qubits is accurate to about 5 bits.
pub const DEFAULT_S0: u32 = 5;
/// Extra qubits carried by the last rounds beyond the target size.
pub const DEFAULT_PAD: u32 = 2;
/// Ancillas used by the ripple-carry adder (the carry-in qubit).
pub const ADDER_ANCILLAS: u32 = 1;

/// Number of symmetric rounds needed to reach `ε ≤ (π/2^n)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoundsRequired {
    pub rounds: u32,
    /// `n < 5`: the round-count formula is outside its range and a single
    /// round is used.
    pub below_formula_range: bool,
    /// `(2n − 2 log₂π) / log₂(|c_1|²/|c_-3|²)`, whose `⌈log₂⌉` is the count.
    pub argument: f64,
}

/// `R = ⌈log₂((2n − 2 log₂π) / log₂(|c_1|²/|c_-3|²))⌉`.
///
/// The sideband ratio is taken from the series coefficients (exactly 9).
pub fn rounds_required(n: RegisterSize) -> RoundsRequired {
    let nf = n.qubits() as f64;
    let ratio = series_coefficient(1).norm_sqr() / series_coefficient(-3).norm_sqr();
    let argument = (2.0 * nf - 2.0 * std::f64::consts::PI.log2()) / ratio.log2();
    if n.qubits() < 5 {
        return RoundsRequired {
            rounds: 1,
            below_formula_range: true,
            argument,
        };
    }
    RoundsRequired {
        rounds: argument.log2().ceil().max(1.0) as u32,
        below_formula_range: false,
        argument,
    }
}

/// The linearized form `⌈log₂(0.63n − 1.04)⌉`.
pub fn rounds_simplified(n: RegisterSize) -> u32 {
    (0.63 * n.qubits() as f64 - 1.04).log2().ceil().max(1.0) as u32
}

/// Per-round register sizes of the distillation tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolSchedule {
    pub n_target: RegisterSize,
    pub s0: u32,
    pub pad: u32,
    pub rounds: u32,
    pub sizes: Vec<u32>,
    /// Set when the round count came from the below-range fallback.
    pub single_round_fallback: bool,
}

impl ProtocolSchedule {
    /// A schedule with explicit sizes, e.g. full width at every round.
    pub fn from_sizes(n_target: RegisterSize, sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(invalid("a schedule needs at least one round"));
        }
        if sizes.iter().any(|&s| s < 2) || sizes.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("round sizes must be at least 2 and non-decreasing"));
        }
        for &s in &sizes {
            RegisterSize::new(s)?;
        }
        Ok(Self {
            n_target,
            s0: sizes[0],
            pad: sizes.last().unwrap().saturating_sub(n_target.qubits()),
            rounds: sizes.len() as u32,
            sizes,
            single_round_fallback: false,
        })
    }

    pub fn max_size(&self) -> u32 {
        *self.sizes.iter().max().expect("non-empty")
    }

    /// Adders in round `r` (1-based): `2^{R−r}`.
    pub fn adders_in_round(&self, r: u32) -> u64 {
        1u64 << (self.rounds - r)
    }

    /// Two registers of the widest round plus the adder's ancilla.
    pub fn logical_width(&self) -> u32 {
        2 * self.max_size() + ADDER_ANCILLAS
    }
}

/// Doubling schedule `sizes[r] = min(2·sizes[r−1], n + pad)` with
/// `sizes[0] = s0` and `R` from [`rounds_required`].
pub fn plan_schedule(n: RegisterSize, s0: u32, pad: u32) -> Result<ProtocolSchedule> {
    if s0 < 2 {
        return Err(invalid(format!(
            "initial register size must be at least 2, got {s0}"
        )));
    }
    let rr = rounds_required(n);
    let cap = n.qubits() + pad;
    let mut sizes = Vec::with_capacity(rr.rounds as usize);
    sizes.push(s0);
    for r in 1..rr.rounds as usize {
        let next = (2 * sizes[r - 1]).min(cap).max(sizes[r - 1]);
        sizes.push(next);
    }
    for &s in &sizes {
        RegisterSize::new(s)?;
    }
    Ok(ProtocolSchedule {
        n_target: n,
        s0,
        pad,
        rounds: rr.rounds,
        sizes,
        single_round_fallback: rr.below_formula_range,
    })
}
