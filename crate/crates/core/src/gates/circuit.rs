use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Clifford+Toffoli gate set with computational-basis measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    X(usize),
    Z(usize),
    S(usize),
    H(usize),
    Cnot(usize, usize),
    Toffoli(usize, usize, usize),
    MeasureZ(usize),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::S(_) => "S",
            Gate::H(_) => "H",
            Gate::Cnot(..) => "CNOT",
            Gate::Toffoli(..) => "TOFFOLI",
            Gate::MeasureZ(_) => "MEASURE_Z",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q) | Gate::Z(q) | Gate::S(q) | Gate::H(q) | Gate::MeasureZ(q) => vec![q],
            Gate::Cnot(c, t) => vec![c, t],
            Gate::Toffoli(a, b, t) => vec![a, b, t],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub x: usize,
    pub z: usize,
    pub s: usize,
    pub h: usize,
    pub cnot: usize,
    pub toffoli: usize,
    pub measure: usize,
}

/// Ordered gate list on `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Appends a gate after checking its qubits are in range and distinct.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let qs = gate.qubits();
        if let Some(q) = qs.iter().find(|&&q| q >= self.num_qubits) {
            return Err(invalid(format!(
                "{} acts on qubit {q} of a {}-qubit circuit",
                gate.name(),
                self.num_qubits
            )));
        }
        for (i, a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(a) {
                return Err(invalid(format!("{gate} repeats qubit {a}")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`, which must not be wider.
    pub fn extend_from(&mut self, other: &GateCircuit) -> Result<()> {
        for &g in &other.gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::X(_) => c.x += 1,
                Gate::Z(_) => c.z += 1,
                Gate::S(_) => c.s += 1,
                Gate::H(_) => c.h += 1,
                Gate::Cnot(..) => c.cnot += 1,
                Gate::Toffoli(..) => c.toffoli += 1,
                Gate::MeasureZ(_) => c.measure += 1,
            }
        }
        c
    }

    pub fn toffoli_count(&self) -> usize {
        self.counts().toffoli
    }

    /// Plain-text gate list: a `QUBITS n` header, then one `GATE q0 [q1 [q2]]`
    /// per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("QUBITS {}\n", self.num_qubits);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for GateCircuit {
    type Err = Error;

    /// Parses [`GateCircuit::to_text`] output. Blank lines and lines starting
    /// with `#` are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut circuit: Option<GateCircuit> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut parts = line.split_whitespace();
            let op = parts.next().expect("non-empty line");
            let args: Vec<usize> = parts
                .map(|p| {
                    p.parse::<usize>()
                        .map_err(|e| parse_err(format!("bad qubit {p:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            let Some(c) = circuit.as_mut() else {
                if op != "QUBITS" || args.len() != 1 {
                    return Err(parse_err("expected `QUBITS n` header".into()));
                }
                circuit = Some(GateCircuit::new(args[0]));
                continue;
            };
            let arity = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(parse_err(format!(
                        "{op} takes {k} qubit(s), got {}",
                        args.len()
                    )))
                }
            };
            let gate = match op {
                "X" => arity(1).map(|_| Gate::X(args[0])),
                "Z" => arity(1).map(|_| Gate::Z(args[0])),
                "S" => arity(1).map(|_| Gate::S(args[0])),
                "H" => arity(1).map(|_| Gate::H(args[0])),
                "MEASURE_Z" => arity(1).map(|_| Gate::MeasureZ(args[0])),
                "CNOT" => arity(2).map(|_| Gate::Cnot(args[0], args[1])),
                "TOFFOLI" => arity(3).map(|_| Gate::Toffoli(args[0], args[1], args[2])),
                "QUBITS" => Err(parse_err("duplicate QUBITS header".into())),
                other => Err(parse_err(format!("unknown gate {other:?}"))),
            }?;
            c.push(gate).map_err(|e| parse_err(e.to_string()))?;
        }
        circuit.ok_or(Error::Parse {
            line: 0,
            message: "missing QUBITS header".into(),
        })
    }
}

/// Named qubit spans of a two-register circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    pub first_register: Range<usize>,
    pub second_register: Range<usize>,
    pub ancilla: Range<usize>,
}

impl RegisterLayout {
    /// `[0, n)`, `[n, 2n)`, then `ancillas` qubits.
    pub fn pair(n: usize, ancillas: usize) -> Self {
        Self {
            first_register: 0..n,
            second_register: n..2 * n,
            ancilla: 2 * n..2 * n + ancillas,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.ancilla.end
    }

    /// Logical width: both registers, ancillas excluded.
    pub fn register_width(&self) -> usize {
        self.first_register.len() + self.second_register.len()
    }

    /// Qubit carrying bit `i` (weight `2^i`) of the first register.
    pub fn first_bit(&self, i: usize) -> usize {
        self.first_register.end - 1 - i
    }

    pub fn second_bit(&self, i: usize) -> usize {
        self.second_register.end - 1 - i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let mut c = GateCircuit::new(3);
        for g in [
            Gate::H(0),
            Gate::S(1),
            Gate::Z(2),
            Gate::X(0),
            Gate::Cnot(0, 1),
            Gate::Toffoli(0, 1, 2),
            Gate::MeasureZ(2),
        ] {
            c.push(g).unwrap();
        }
        let text = c.to_text();
        assert_eq!(
            text,
            "QUBITS 3\nH 0\nS 1\nZ 2\nX 0\nCNOT 0 1\nTOFFOLI 0 1 2\nMEASURE_Z 2\n"
        );
        assert_eq!(text.parse::<GateCircuit>().unwrap(), c);
    }

    #[test]
    fn rejects_bad_indices() {
        let mut c = GateCircuit::new(2);
        assert!(c.push(Gate::X(2)).is_err());
        assert!(c.push(Gate::Cnot(1, 1)).is_err());
        assert!(c.gates().is_empty());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = "QUBITS 2\n\nFOO 1\n".parse::<GateCircuit>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = "H 0\n".parse::<GateCircuit>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = "QUBITS 2\nCNOT 0\n".parse::<GateCircuit>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!("".parse::<GateCircuit>().is_err());
    }

    #[test]
    fn counts() {
        let c: GateCircuit = "QUBITS 3\n# comment\nTOFFOLI 0 1 2\nTOFFOLI 1 2 0\nH 1\n"
            .parse()
            .unwrap();
        assert_eq!(c.counts().toffoli, 2);
        assert_eq!(c.counts().h, 1);
    }

    #[test]
    fn layout_bits() {
        let l = RegisterLayout::pair(4, 1);
        assert_eq!(l.num_qubits(), 9);
        assert_eq!(l.first_bit(0), 3);
        assert_eq!(l.second_bit(3), 4);
        assert_eq!(l.register_width(), 8);
    }
}
