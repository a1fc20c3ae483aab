//! Protocol runners for the distillation tree.
//!
//! All leaves of the tree start from the same Clifford-only state and every
//! node combines two identical subtrees, so one evaluation per level gives the
//! state at every node of that level; no sibling needs to be simulated
//! separately.

use serde::Serialize;

use super::schedule::ProtocolSchedule;
use super::sparse::{sparse_extend, SparseSpectrum};
use super::step::{distill_amplitudes, extend_register};
use crate::error::Result;
use crate::fourier::{
    approx_initial_state, fidelity_threshold, from_fourier_basis, to_fourier_basis,
    FourierAmplitudes, FourierSpectrum, RegisterSize,
};
use crate::numfmt::{csv_float, round_sig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Exact,
    Sparse,
}

/// One successful round of the tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTrace {
    pub size: u32,
    pub p_success: f64,
    /// Weight at `|γ^(1)⟩` on this round's register.
    pub fidelity: f64,
    pub error: f64,
}

/// Outcome of running the whole tree.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolRun {
    pub engine: Engine,
    pub n: RegisterSize,
    pub schedule: ProtocolSchedule,
    pub rounds: Vec<RoundTrace>,
    /// Fidelity of the output, reduced to its `n` most significant qubits,
    /// with `|γ^(1)⟩`.
    pub fidelity: f64,
    pub error: f64,
    pub log10_error: f64,
    /// `sin²(π/2^n)`.
    pub threshold: f64,
    pub meets_threshold: bool,
    /// Fidelity lost at each register extension: `(size_before, size_after,
    /// fidelity_before, fidelity_after)`.
    pub extension_losses: Vec<(u32, u32, f64, f64)>,
    /// Tail mass discarded by the sparse engine (zero for the exact engine).
    pub tail_mass: f64,
    pub precision_warning: bool,
    pub warnings: Vec<String>,
    /// Final Fourier weights on `n` qubits (exact engine only).
    #[serde(skip)]
    pub final_spectrum: Option<FourierSpectrum>,
}

impl ProtocolRun {
    pub const CSV_HEADER: &'static str = "size,p_success,fidelity,error";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rounds {
            out.push_str(&format!(
                "{},{},{},{}\n",
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
            "engine": self.engine,
            "n": self.n,
            "s0": self.schedule.s0,
            "pad": self.schedule.pad,
            "sizes": self.schedule.sizes,
            "single_round_fallback": self.schedule.single_round_fallback,
            "rounds": rounds,
            "fidelity": round_sig(self.fidelity),
            "error": round_sig(self.error),
            "log10_error": round_sig(self.log10_error),
            "threshold": round_sig(self.threshold),
            "meets_threshold": self.meets_threshold,
            "extension_losses": self
                .extension_losses
                .iter()
                .map(|&(from, to, before, after)| {
                    serde_json::json!({
                        "from": from,
                        "to": to,
                        "fidelity_before": round_sig(before),
                        "fidelity_after": round_sig(after),
                    })
                })
                .collect::<Vec<_>>(),
            "tail_mass": round_sig(self.tail_mass),
            "precision_warning": self.precision_warning,
            "warnings": self.warnings,
        })
    }
}

fn weight_at_one(a: &FourierAmplitudes) -> f64 {
    a.coeffs()[1].norm_sqr()
}

fn off_target_mass(weights: &[f64], target: usize) -> f64 {
    weights
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != target)
        .map(|(_, w)| w)
        .sum()
}

/// Runs the tree on dense amplitude vectors.
///
/// Each round squares the Fourier amplitudes of the current register
/// (postselection applied analytically); between rounds the register is
/// brought back to the computational basis and padded with `|+⟩` qubits.
pub fn run_protocol_exact(n: RegisterSize, schedule: &ProtocolSchedule) -> Result<ProtocolRun> {
    let widest = schedule.max_size().max(n.qubits());
    crate::fourier::check_capacity(widest as usize)?;

    let first = RegisterSize::new(schedule.sizes[0])?;
    let mut amps = to_fourier_basis(&approx_initial_state(first)?);
    let mut rounds = Vec::with_capacity(schedule.sizes.len());
    let mut extension_losses = Vec::new();
    let mut warnings = Vec::new();

    for (r, &size) in schedule.sizes.iter().enumerate() {
        let size_reg = RegisterSize::new(size)?;
        if r > 0 && size_reg != amps.size() {
            let before = weight_at_one(&amps);
            let from = amps.size().qubits();
            amps = to_fourier_basis(&extend_register(&from_fourier_basis(&amps), size_reg)?);
            extension_losses.push((from, size, before, weight_at_one(&amps)));
        }
        let (p, out) = distill_amplitudes(&amps, &amps)?;
        amps = out;
        let weights = amps.spectrum();
        rounds.push(RoundTrace {
            size,
            p_success: p,
            fidelity: weights.weights()[1],
            error: off_target_mass(weights.weights(), 1),
        });
    }

    if amps.size() < n {
        warnings.push(format!(
            "final register has {} qubits, extended to {n} without further distillation",
            amps.size()
        ));
        let before = weight_at_one(&amps);
        let from = amps.size().qubits();
        amps = to_fourier_basis(&extend_register(&from_fourier_basis(&amps), n)?);
        extension_losses.push((from, n.qubits(), before, weight_at_one(&amps)));
    }
    let folded = amps.spectrum().fold(n)?;
    let fidelity = folded.weights()[1];
    let error = off_target_mass(folded.weights(), 1);
    Ok(finish(
        Engine::Exact,
        n,
        schedule,
        rounds,
        fidelity,
        error,
        extension_losses,
        0.0,
        warnings,
        Some(folded),
    ))
}

/// Runs the tree on the sparse harmonic model; valid for any `n` up to the
/// index limit.
pub fn run_protocol_sparse(
    n: RegisterSize,
    schedule: &ProtocolSchedule,
    k_max: usize,
    half_width: u64,
) -> Result<ProtocolRun> {
    let first = RegisterSize::new(schedule.sizes[0])?;
    let mut sp = SparseSpectrum::initial(first, k_max)?;
    let mut rounds = Vec::with_capacity(schedule.sizes.len());
    let mut extension_losses = Vec::new();
    let mut warnings = Vec::new();

    for (r, &size) in schedule.sizes.iter().enumerate() {
        let size_reg = RegisterSize::new(size)?;
        if r > 0 && size_reg != sp.size() {
            let before = sp.weight(1);
            let from = sp.size().qubits();
            sp = sparse_extend(&sp, size_reg, k_max, half_width)?;
            extension_losses.push((from, size, before, sp.weight(1)));
        }
        let (p, out) = sp.distill_symmetric()?;
        sp = out;
        let (on, off) = sp.folded(1, sp.size())?;
        rounds.push(RoundTrace {
            size,
            p_success: p,
            fidelity: on,
            error: off + sp.tail_mass(),
        });
    }

    if sp.size() < n {
        warnings.push(format!(
            "final register has {} qubits, extended to {n} without further distillation",
            sp.size()
        ));
        let before = sp.weight(1);
        let from = sp.size().qubits();
        sp = sparse_extend(&sp, n, k_max, half_width)?;
        extension_losses.push((from, n.qubits(), before, sp.weight(1)));
    }
    let (fidelity, off) = sp.folded(1, n)?;
    let error = off + sp.tail_mass();
    Ok(finish(
        Engine::Sparse,
        n,
        schedule,
        rounds,
        fidelity,
        error,
        extension_losses,
        sp.tail_mass(),
        warnings,
        None,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    engine: Engine,
    n: RegisterSize,
    schedule: &ProtocolSchedule,
    rounds: Vec<RoundTrace>,
    fidelity: f64,
    error: f64,
    extension_losses: Vec<(u32, u32, f64, f64)>,
    tail_mass: f64,
    mut warnings: Vec<String>,
    final_spectrum: Option<FourierSpectrum>,
) -> ProtocolRun {
    let threshold = fidelity_threshold(n);
    let precision_warning = tail_mass > 1e-3 * threshold;
    if precision_warning {
        warnings.push(format!(
            "discarded tail mass {tail_mass:e} exceeds 1e-3 of the target error {threshold:e}"
        ));
    }
    if schedule.single_round_fallback {
        warnings.push(format!(
            "n = {n} is below the round-count formula's range; a single round is used"
        ));
    }
    ProtocolRun {
        engine,
        n,
        schedule: schedule.clone(),
        rounds,
        fidelity,
        error,
        log10_error: error.log10(),
        threshold,
        meets_threshold: error <= threshold,
        extension_losses,
        tail_mass,
        precision_warning,
        warnings,
        final_spectrum,
    }
}
