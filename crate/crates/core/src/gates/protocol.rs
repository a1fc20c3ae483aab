use std::collections::BTreeMap;

use super::adder::build_adder_circuit;
use super::circuit::{Gate, GateCircuit, RegisterLayout};
use super::sim::{apply_circuit, extract_register, reduced_fidelity, MeasureMode};
use crate::error::{invalid, Error, Result};
use crate::fourier::{RegisterSize, StateVector};

/// Adder from the first into the second register, then `H` and `MEASURE_Z`
/// on every first-register qubit. Keeping the all-zero outcome projects the
/// first register onto `|γ^(0)⟩`.
pub fn build_distillation_circuit(n: usize) -> Result<(GateCircuit, RegisterLayout)> {
    if n < 3 {
        return Err(invalid(format!(
            "distillation circuit needs n >= 3, got {n}"
        )));
    }
    let (mut c, layout) = build_adder_circuit(n)?;
    for q in layout.first_register.clone() {
        c.push(Gate::H(q))?;
        c.push(Gate::MeasureZ(q))?;
    }
    Ok((c, layout))
}

/// Clifford circuit producing the approximate initial state from `|0…0⟩`.
pub fn initial_state_circuit(n: usize) -> Result<GateCircuit> {
    if n < 2 {
        return Err(invalid(
            "the approximate initial state needs at least 2 qubits",
        ));
    }
    let mut c = GateCircuit::new(n);
    for q in 0..n {
        c.push(Gate::H(q))?;
    }
    c.push(Gate::Z(0))?;
    c.push(Gate::S(1))?;
    Ok(c)
}

/// Assembles `first ⊗ second ⊗ |0…0⟩_ancilla`.
fn joint_input(first: &StateVector, second: &StateVector, ancillas: usize) -> Result<StateVector> {
    let joint = first.tensor(second)?;
    if ancillas == 0 {
        return Ok(joint);
    }
    joint.tensor(&StateVector::basis(RegisterSize::new(ancillas as u32)?, 0)?)
}

#[derive(Clone, Debug)]
pub struct GateDistillation {
    pub p_success: f64,
    /// Surviving second register.
    pub output: StateVector,
    pub toffolis: usize,
    pub simulator_qubits: usize,
}

/// Runs the distillation circuit on `first ⊗ second` and postselects the
/// all-zero outcome.
pub fn simulate_distillation(
    n: usize,
    first: &StateVector,
    second: &StateVector,
) -> Result<GateDistillation> {
    for s in [first, second] {
        if s.qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.qubits(),
            });
        }
    }
    let (c, layout) = build_distillation_circuit(n)?;
    crate::fourier::check_capacity(layout.num_qubits())?;
    let input = joint_input(first, second, layout.ancilla.len())?;
    let zeros: BTreeMap<usize, bool> = layout.first_register.clone().map(|q| (q, false)).collect();
    let run = apply_circuit(&c, &input, MeasureMode::Postselect(&zeros))?;
    let output = extract_register(&run.state, layout.second_register.clone())?;
    Ok(GateDistillation {
        p_success: run.probability,
        output,
        toffolis: c.toffoli_count(),
        simulator_qubits: layout.num_qubits(),
    })
}

#[derive(Clone, Debug)]
pub struct CloneResult {
    /// Full post-circuit state including ancillas.
    pub joint: StateVector,
    pub layout: RegisterLayout,
    /// Fidelity of each output register with `reference`.
    pub fidelity_first: f64,
    pub fidelity_second: f64,
    /// `|⟨ref ⊗ ref|ψ⟩|²` on the two registers.
    pub joint_overlap: f64,
    pub toffolis: usize,
}

/// Copies a Fourier state into a blank register: the blank is set to
/// `|γ^(0)⟩`, added into the source, which turns the blank into `γ^(−k)`, and
/// a bitwise NOT (`y ↦ N−1−y`) maps that to `γ^(k)` up to global phase.
pub fn clone_fourier_state(
    n: usize,
    source: &StateVector,
    reference: &StateVector,
) -> Result<CloneResult> {
    if source.qubits() != n || reference.qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: source.qubits().max(reference.qubits()),
        });
    }
    let (adder, layout) = build_adder_circuit(n)?;
    let mut c = GateCircuit::new(layout.num_qubits());
    for q in layout.first_register.clone() {
        c.push(Gate::H(q))?;
    }
    c.extend_from(&adder)?;
    for q in layout.first_register.clone() {
        c.push(Gate::X(q))?;
    }
    crate::fourier::check_capacity(layout.num_qubits())?;
    let blank = StateVector::basis(source.size(), 0)?;
    let input = joint_input(&blank, source, layout.ancilla.len())?;
    let run = apply_circuit(&c, &input, MeasureMode::Sample { seed: 0 })?;
    let pair = reference.tensor(reference)?;
    let both = layout.first_register.start..layout.second_register.end;
    Ok(CloneResult {
        fidelity_first: reduced_fidelity(&run.state, layout.first_register.clone(), reference)?,
        fidelity_second: reduced_fidelity(&run.state, layout.second_register.clone(), reference)?,
        joint_overlap: reduced_fidelity(&run.state, both, &pair)?,
        joint: run.state,
        layout,
        toffolis: c.toffoli_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distill::distill_amplitudes;
    use crate::fourier::{approx_initial_state, pure_fourier_state, to_fourier_basis};

    fn rs(n: u32) -> RegisterSize {
        RegisterSize::new(n).unwrap()
    }

    #[test]
    fn circuit_structure() {
        let (c, layout) = build_distillation_circuit(5).unwrap();
        let measured: Vec<usize> = c
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::MeasureZ(q) => Some(*q),
                _ => None,
            })
            .collect();
        assert_eq!(measured.len(), 5);
        assert!(measured.iter().all(|q| layout.first_register.contains(q)));
        assert!(build_distillation_circuit(2).is_err());
    }

    #[test]
    fn initial_state_is_clifford() {
        for n in 2..=10 {
            let c = initial_state_circuit(n).unwrap();
            assert!(c
                .gates()
                .iter()
                .all(|g| matches!(g, Gate::H(_) | Gate::S(_) | Gate::Z(_))));
            let zero = StateVector::basis(rs(n as u32), 0).unwrap();
            let out = apply_circuit(&c, &zero, MeasureMode::Sample { seed: 0 })
                .unwrap()
                .state;
            let expect = approx_initial_state(rs(n as u32)).unwrap();
            assert!(out.distance(&expect).unwrap() < 1e-12);
        }
    }

    #[test]
    fn matches_amplitude_model() {
        let a = approx_initial_state(rs(5)).unwrap();
        let run = simulate_distillation(5, &a, &a).unwrap();
        let fa = to_fourier_basis(&a);
        let (p, out) = distill_amplitudes(&fa, &fa).unwrap();
        assert!((run.p_success - p).abs() < 1e-9);
        let got = to_fourier_basis(&run.output);
        for (x, y) in got.coeffs().iter().zip(out.coeffs()) {
            assert!((x - y).norm() < 1e-9);
        }
        assert!((run.p_success - 0.671875).abs() < 1e-12);
    }

    #[test]
    fn pure_inputs_pass_with_certainty() {
        let g = pure_fourier_state(rs(4), 1).unwrap();
        let run = simulate_distillation(4, &g, &g).unwrap();
        assert!((run.p_success - 1.0).abs() < 1e-12);
        assert!((run.output.overlap(&g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fourier_action_of_decomposed_adder() {
        // γ^(k) ⊗ γ^(k′) ↦ γ^(k−k′) ⊗ γ^(k′)
        for n in 3..=5usize {
            let size = rs(n as u32);
            let dim = 1u128 << n;
            let (c, layout) = build_adder_circuit(n).unwrap();
            for k in 0..dim {
                for k2 in 0..dim {
                    let a = pure_fourier_state(size, k).unwrap();
                    let b = pure_fourier_state(size, k2).unwrap();
                    let input = joint_input(&a, &b, layout.ancilla.len()).unwrap();
                    let out = apply_circuit(&c, &input, MeasureMode::Sample { seed: 0 })
                        .unwrap()
                        .state;
                    let expect = pure_fourier_state(size, (k + dim - k2) % dim)
                        .unwrap()
                        .tensor(&b)
                        .unwrap();
                    let both = 0..2 * n;
                    let f = reduced_fidelity(&out, both, &expect).unwrap();
                    assert!(f > 1.0 - 1e-10, "n={n} k={k} k'={k2} f={f}");
                }
            }
        }
    }

    #[test]
    fn clone_pure_state() {
        let g = pure_fourier_state(rs(4), 3).unwrap();
        let r = clone_fourier_state(4, &g, &g).unwrap();
        assert!(r.fidelity_first > 1.0 - 1e-9);
        assert!(r.fidelity_second > 1.0 - 1e-9);
        assert!(r.joint_overlap > 1.0 - 1e-9);
        assert_eq!(r.toffolis, 6);

        let zero = pure_fourier_state(rs(3), 0).unwrap();
        let r0 = clone_fourier_state(3, &zero, &zero).unwrap();
        assert!(r0.joint_overlap > 1.0 - 1e-9);
    }

    #[test]
    fn clone_approximate_state() {
        let a = approx_initial_state(rs(5)).unwrap();
        let g = pure_fourier_state(rs(5), 1).unwrap();
        let r = clone_fourier_state(5, &a, &g).unwrap();
        let f_in = a.overlap(&g).unwrap();
        assert!(r.joint_overlap > 0.0 && r.joint_overlap <= 1.0);
        assert!(r.fidelity_first <= 1.0 && r.fidelity_second <= 1.0);
        assert!((r.joint.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(f_in > 0.8);
    }
}
