use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circuit::{Gate, GateCircuit};
use crate::error::{invalid, Error, Result};
use crate::fourier::{RegisterSize, StateVector};

/// How `MEASURE_Z` gates are resolved.
#[derive(Clone, Copy, Debug)]
pub enum MeasureMode<'a> {
    /// Every measured qubit must appear in the map; the branch probability
    /// is accumulated and the state renormalized.
    Postselect(&'a BTreeMap<usize, bool>),
    /// Outcomes drawn from a seeded stream.
    Sample { seed: u64 },
}

#[derive(Clone, Debug)]
pub struct CircuitRun {
    /// Product of the probabilities of all observed outcomes.
    pub probability: f64,
    pub state: StateVector,
    pub outcomes: Vec<(usize, bool)>,
}

fn mask(num_qubits: usize, q: usize) -> usize {
    1 << (num_qubits - 1 - q)
}

fn apply_unitary(amps: &mut [Complex64], nq: usize, gate: Gate) {
    match gate {
        Gate::X(q) => {
            let m = mask(nq, q);
            for i in 0..amps.len() {
                if i & m == 0 {
                    amps.swap(i, i | m);
                }
            }
        }
        Gate::Z(q) => {
            let m = mask(nq, q);
            amps.iter_mut()
                .enumerate()
                .filter(|(i, _)| i & m != 0)
                .for_each(|(_, a)| *a = -*a);
        }
        Gate::S(q) => {
            let m = mask(nq, q);
            let i_unit = Complex64::new(0.0, 1.0);
            amps.iter_mut()
                .enumerate()
                .filter(|(i, _)| i & m != 0)
                .for_each(|(_, a)| *a *= i_unit);
        }
        Gate::H(q) => {
            let m = mask(nq, q);
            for i in 0..amps.len() {
                if i & m == 0 {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = (a + b) * FRAC_1_SQRT_2;
                    amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                }
            }
        }
        Gate::Cnot(c, t) => {
            let (mc, mt) = (mask(nq, c), mask(nq, t));
            for i in 0..amps.len() {
                if i & mc != 0 && i & mt == 0 {
                    amps.swap(i, i | mt);
                }
            }
        }
        Gate::Toffoli(a, b, t) => {
            let (ma, mb, mt) = (mask(nq, a), mask(nq, b), mask(nq, t));
            for i in 0..amps.len() {
                if i & ma != 0 && i & mb != 0 && i & mt == 0 {
                    amps.swap(i, i | mt);
                }
            }
        }
        Gate::MeasureZ(_) => unreachable!("measurements are handled by apply_circuit"),
    }
}

/// Applies `c` to a private copy of `s`.
pub fn apply_circuit(
    c: &GateCircuit,
    s: &StateVector,
    mode: MeasureMode<'_>,
) -> Result<CircuitRun> {
    if s.qubits() != c.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: c.num_qubits(),
            found: s.qubits(),
        });
    }
    let nq = c.num_qubits();
    let mut amps = s.amplitudes().to_vec();
    let mut probability = 1.0;
    let mut outcomes = Vec::new();
    let mut rng = match mode {
        MeasureMode::Sample { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        MeasureMode::Postselect(_) => None,
    };
    for &gate in c.gates() {
        let Gate::MeasureZ(q) = gate else {
            apply_unitary(&mut amps, nq, gate);
            continue;
        };
        let m = mask(nq, q);
        let p_one: f64 = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let p_one = (p_one / total).clamp(0.0, 1.0);
        let bit = match mode {
            MeasureMode::Postselect(map) => *map.get(&q).ok_or_else(|| {
                invalid(format!(
                    "qubit {q} is measured but has no postselected value"
                ))
            })?,
            MeasureMode::Sample { .. } => rng.as_mut().expect("seeded").gen::<f64>() < p_one,
        };
        let p = if bit { p_one } else { 1.0 - p_one };
        if !(p > 0.0) {
            return Err(Error::ZeroProbabilityBranch { qubit: q, bit });
        }
        let scale = 1.0 / p.sqrt();
        for (i, a) in amps.iter_mut().enumerate() {
            if ((i & m) != 0) == bit {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        probability *= p;
        outcomes.push((q, bit));
    }
    Ok(CircuitRun {
        probability,
        state: StateVector::from_parts_unchecked(s.size(), amps),
        outcomes,
    })
}

/// Runs a reversible (X/CNOT/TOFFOLI-only) circuit on a basis state.
pub fn permute_basis(c: &GateCircuit, input: u128) -> Result<u128> {
    let nq = c.num_qubits();
    if nq > 128 {
        return Err(invalid("basis permutation supports at most 128 qubits"));
    }
    let bit = |q: usize| 1u128 << (nq - 1 - q);
    let mut x = input;
    for &g in c.gates() {
        match g {
            Gate::X(q) => x ^= bit(q),
            Gate::Cnot(a, t) => {
                if x & bit(a) != 0 {
                    x ^= bit(t);
                }
            }
            Gate::Toffoli(a, b, t) => {
                if x & bit(a) != 0 && x & bit(b) != 0 {
                    x ^= bit(t);
                }
            }
            other => {
                return Err(invalid(format!(
                    "{} is not a classical reversible gate",
                    other.name()
                )));
            }
        }
    }
    Ok(x)
}

/// Splits a basis index into (span value, rest) for a contiguous qubit span.
fn split_index(i: usize, nq: usize, span: &Range<usize>) -> (usize, usize) {
    let low_bits = nq - span.end;
    let width = span.len();
    let value = (i >> low_bits) & ((1 << width) - 1);
    let rest = (i >> (low_bits + width) << low_bits) | (i & ((1 << low_bits) - 1));
    (value, rest)
}

/// Fidelity of the reduced state on `span` with the pure state `target`.
pub fn reduced_fidelity(s: &StateVector, span: Range<usize>, target: &StateVector) -> Result<f64> {
    let nq = s.qubits();
    if span.end > nq || span.len() != target.qubits() {
        return Err(invalid(format!(
            "span {span:?} does not match a {}-qubit target in a {nq}-qubit state",
            target.qubits()
        )));
    }
    let rest_len = 1usize << (nq - span.len());
    let mut overlaps = vec![Complex64::new(0.0, 0.0); rest_len];
    let t = target.amplitudes();
    for (i, a) in s.amplitudes().iter().enumerate() {
        let (v, rest) = split_index(i, nq, &span);
        overlaps[rest] += t[v].conj() * a;
    }
    Ok(overlaps.iter().map(|o| o.norm_sqr()).sum())
}

/// Pulls out the state of `span` when the remaining qubits sit in a single
/// basis configuration (as after postselection with clean ancillas).
pub fn extract_register(s: &StateVector, span: Range<usize>) -> Result<StateVector> {
    let nq = s.qubits();
    if span.is_empty() || span.end > nq {
        return Err(invalid(format!(
            "span {span:?} out of range for {nq} qubits"
        )));
    }
    let rest_len = 1usize << (nq - span.len());
    let mut rest_weight = vec![0.0; rest_len];
    for (i, a) in s.amplitudes().iter().enumerate() {
        rest_weight[split_index(i, nq, &span).1] += a.norm_sqr();
    }
    let total: f64 = rest_weight.iter().sum();
    let (best, w) = rest_weight
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if (total - w) > 1e-9 * total {
        return Err(invalid(format!(
            "qubits outside {span:?} are not in a single basis state (leak {:e})",
            (total - w) / total
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << span.len()];
    for (i, a) in s.amplitudes().iter().enumerate() {
        let (v, rest) = split_index(i, nq, &span);
        if rest == best {
            out[v] = *a;
        }
    }
    StateVector::normalized(RegisterSize::new(span.len() as u32)?, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(n: u32) -> RegisterSize {
        RegisterSize::new(n).unwrap()
    }

    fn circuit(text: &str) -> GateCircuit {
        text.parse().unwrap()
    }

    #[test]
    fn hh_is_identity() {
        let c = circuit("QUBITS 1\nH 0\nH 0\n");
        let s = StateVector::basis(rs(1), 0).unwrap();
        let run = apply_circuit(&c, &s, MeasureMode::Sample { seed: 0 }).unwrap();
        assert_eq!(run.probability, 1.0);
        assert!(run.state.distance(&s).unwrap() < 1e-15);
    }

    #[test]
    fn toffoli_flips_target() {
        let c = circuit("QUBITS 3\nTOFFOLI 0 1 2\n");
        let s = StateVector::basis(rs(3), 0b110).unwrap();
        let run = apply_circuit(&c, &s, MeasureMode::Sample { seed: 0 }).unwrap();
        assert!(
            run.state
                .distance(&StateVector::basis(rs(3), 0b111).unwrap())
                .unwrap()
                < 1e-15
        );
        assert_eq!(permute_basis(&c, 0b110).unwrap(), 0b111);
        assert_eq!(permute_basis(&c, 0b100).unwrap(), 0b100);
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let c = circuit("QUBITS 3\nX 0\n");
        assert_eq!(permute_basis(&c, 0).unwrap(), 0b100);
    }

    #[test]
    fn postselection_probability() {
        let c = circuit("QUBITS 2\nH 0\nCNOT 0 1\nMEASURE_Z 0\n");
        let s = StateVector::basis(rs(2), 0).unwrap();
        let map = BTreeMap::from([(0, true)]);
        let run = apply_circuit(&c, &s, MeasureMode::Postselect(&map)).unwrap();
        assert!((run.probability - 0.5).abs() < 1e-15);
        assert!(
            run.state
                .distance(&StateVector::basis(rs(2), 3).unwrap())
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn zero_probability_branch() {
        let c = circuit("QUBITS 1\nMEASURE_Z 0\n");
        let s = StateVector::basis(rs(1), 0).unwrap();
        let map = BTreeMap::from([(0, true)]);
        assert!(matches!(
            apply_circuit(&c, &s, MeasureMode::Postselect(&map)),
            Err(Error::ZeroProbabilityBranch {
                qubit: 0,
                bit: true
            })
        ));
        let empty = BTreeMap::new();
        assert!(apply_circuit(&c, &s, MeasureMode::Postselect(&empty)).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let c = circuit(
            "QUBITS 4\nH 0\nH 1\nH 2\nH 3\nMEASURE_Z 0\nMEASURE_Z 1\nMEASURE_Z 2\nMEASURE_Z 3\n",
        );
        let s = StateVector::basis(rs(4), 0).unwrap();
        let a = apply_circuit(&c, &s, MeasureMode::Sample { seed: 9 }).unwrap();
        let b = apply_circuit(&c, &s, MeasureMode::Sample { seed: 9 }).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        assert!((a.probability - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_preserves_norm() {
        let c = circuit("QUBITS 3\nH 0\nS 0\nCNOT 0 2\nH 1\nTOFFOLI 0 1 2\nZ 1\nX 2\n");
        let s = StateVector::plus(rs(3)).unwrap();
        let run = apply_circuit(&c, &s, MeasureMode::Sample { seed: 1 }).unwrap();
        assert!((run.state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn extract_and_reduce() {
        // |1⟩ ⊗ |+⟩ ⊗ |0⟩
        let a = StateVector::basis(rs(1), 1).unwrap();
        let p = StateVector::plus(rs(1)).unwrap();
        let z = StateVector::basis(rs(1), 0).unwrap();
        let s = a.tensor(&p).unwrap().tensor(&z).unwrap();
        let mid = extract_register(&s, 1..2).unwrap();
        assert!(mid.distance(&p).unwrap() < 1e-15);
        assert!((reduced_fidelity(&s, 1..2, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((reduced_fidelity(&s, 0..1, &z).unwrap()).abs() < 1e-15);
        let bell = circuit("QUBITS 2\nH 0\nCNOT 0 1\n");
        let b = apply_circuit(
            &bell,
            &StateVector::basis(rs(2), 0).unwrap(),
            MeasureMode::Sample { seed: 0 },
        )
        .unwrap()
        .state;
        assert!(extract_register(&b, 0..1).is_err());
        assert!((reduced_fidelity(&b, 0..1, &z).unwrap() - 0.5).abs() < 1e-15);
    }
}
