//! Distillation of `|γ^(k)⟩` for arbitrary `k`, starting from states made by
//! truncated quantum-variable rotations (QVR).

use num_complex::Complex64;
use serde::Serialize;

use crate::distill::{symmetric_round, RoundTrace};
use crate::error::{invalid, Result};
use crate::fourier::{fidelity, to_fourier_basis, RegisterSize, StateVector};
use crate::numfmt::{csv_float, round_sig};
use crate::resources::{adder_toffolis, transform_cost};

/// A target index together with the bits a QVR preparation has to rotate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KTarget {
    pub n: RegisterSize,
    pub k: u128,
    /// Positions of the set bits of `k`, lowest first.
    pub one_bits: Vec<u32>,
}

impl KTarget {
    pub fn new(n: RegisterSize, k: u128) -> Result<Self> {
        if k >= n.dim() {
            return Err(invalid(format!("k = {k} out of range for {n} qubits")));
        }
        let one_bits = (0..n.qubits()).filter(|b| (k >> b) & 1 == 1).collect();
        Ok(Self { n, k, one_bits })
    }
}

/// `⌈log₂ n⌉ + 2`.
pub fn default_truncate_bits(n: u32) -> u32 {
    n.max(1).next_power_of_two().trailing_zeros() + 2
}

/// Multiplies `|y⟩` by `e^{i2π·φ}` with `φ = frac(y·2^bit/N)` rounded down to
/// a multiple of `2^{−truncate_bits}`.
pub fn qvr_phase(s: &StateVector, bit: u32, truncate_bits: u32) -> Result<StateVector> {
    let n = s.qubits() as u32;
    if bit >= n {
        return Err(invalid(format!("bit {bit} out of range for {n} qubits")));
    }
    if truncate_bits == 0 {
        return Err(invalid("truncate_bits must be positive"));
    }
    let t = truncate_bits.min(n);
    let dim = s.amplitudes().len();
    let amps = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(y, a)| {
            // numerator of the phase over N, then keep its top t bits
            let num = (y << bit) & (dim - 1);
            let kept = num >> (n - t) << (n - t);
            a * Complex64::from_polar(1.0, std::f64::consts::TAU * kept as f64 / dim as f64)
        })
        .collect();
    StateVector::new(s.size(), amps)
}

/// `|+⟩^⊗n` followed by one truncated QVR per set bit of `k`.
pub fn prepare_approx_k(n: RegisterSize, k: u128, truncate_bits: u32) -> Result<StateVector> {
    let target = KTarget::new(n, k)?;
    let mut s = StateVector::plus(n)?;
    for &b in &target.one_bits {
        s = qvr_phase(&s, b, truncate_bits)?;
    }
    Ok(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct KDistillation {
    pub n: RegisterSize,
    pub k: u128,
    pub truncate_bits: u32,
    pub initial_fidelity: f64,
    pub rounds: Vec<RoundTrace>,
    pub fidelity: f64,
    pub error: f64,
    /// Index carrying the most weight after the last round.
    pub dominant_index: u128,
    pub converged_to_target: bool,
    /// `(2^R − 1)` adders of `2n − 4` Toffolis.
    pub toffolis: u64,
    pub warnings: Vec<String>,
}

impl KDistillation {
    pub const CSV_HEADER: &'static str = "k,truncate_bits,size,p_success,fidelity,error";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rounds {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.k,
                self.truncate_bits,
                r.size,
                csv_float(r.p_success),
                csv_float(r.fidelity),
                csv_float(r.error)
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rounds: Vec<_> = self
            .rounds
            .iter()
            .map(|r| {
                serde_json::json!({
                    "size": r.size,
                    "p_success": round_sig(r.p_success),
                    "fidelity": round_sig(r.fidelity),
                    "error": round_sig(r.error),
                })
            })
            .collect();
        serde_json::json!({
            "schema": "fourier-distill/trace/v1",
            "n": self.n,
            "k": self.k.to_string(),
            "truncate_bits": self.truncate_bits,
            "initial_fidelity": round_sig(self.initial_fidelity),
            "rounds": rounds,
            "fidelity": round_sig(self.fidelity),
            "error": round_sig(self.error),
            "dominant_index": self.dominant_index.to_string(),
            "converged_to_target": self.converged_to_target,
            "toffolis": self.toffolis,
            "warnings": self.warnings,
        })
    }
}

/// Symmetric distillation tree of depth `rounds` with every register `n`
/// qubits wide.
pub fn distill_k(
    n: RegisterSize,
    k: u128,
    rounds: u32,
    truncate_bits: u32,
) -> Result<KDistillation> {
    if !(1..=60).contains(&rounds) {
        return Err(invalid(format!("rounds must be in 1..=60, got {rounds}")));
    }
    let input = prepare_approx_k(n, k, truncate_bits)?;
    let initial_fidelity = fidelity(&input, n, k)?;
    let mut spectrum = to_fourier_basis(&input).spectrum();
    let mut warnings = Vec::new();
    let initial_competitor = max_competitor(spectrum.weights(), k as usize);
    if initial_fidelity <= initial_competitor {
        warnings.push(format!(
            "input weight at k = {k} ({initial_fidelity:e}) does not exceed the largest competing weight ({initial_competitor:e})"
        ));
    }
    let mut trace = Vec::with_capacity(rounds as usize);
    for _ in 0..rounds {
        let out = symmetric_round(&spectrum, k as i128)?;
        trace.push(RoundTrace {
            size: n.qubits(),
            p_success: out.p_success,
            fidelity: out.fidelity,
            error: out.error,
        });
        spectrum = out.output;
    }
    let (dominant, _) = spectrum
        .weights()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let dominant_index = dominant as u128;
    let converged_to_target = dominant_index == k;
    if !converged_to_target {
        warnings.push(format!(
            "distillation converged to index {dominant_index}, not {k}"
        ));
    }
    let last = trace.last().expect("at least one round");
    let adders = (1u64 << rounds) - 1;
    Ok(KDistillation {
        n,
        k,
        truncate_bits,
        initial_fidelity,
        fidelity: last.fidelity,
        error: last.error,
        rounds: trace,
        dominant_index,
        converged_to_target,
        toffolis: adders * adder_toffolis(n.qubits()),
        warnings,
    })
}

fn max_competitor(weights: &[f64], k: usize) -> f64 {
    weights
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, w)| *w)
        .fold(0.0, f64::max)
}

/// Toffolis for the deterministic odd-`k` to `γ^(1)` transform.
pub fn deterministic_transform_note(n: u32) -> Result<u64> {
    transform_cost(n)
}
