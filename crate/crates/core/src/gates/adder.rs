use std::ops::Range;

use super::circuit::{Gate, GateCircuit, RegisterLayout};
use crate::error::{invalid, Result};

/// `|v⟩|w⟩ ↦ |v⟩|w + v mod 2^n⟩` as an explicit index permutation, with the
/// joint index `v·2^n + w` (first register most significant).
#[derive(Clone, Debug)]
pub struct ModularAddOracle {
    n: u32,
}

impl ModularAddOracle {
    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn apply(&self, v: u128, w: u128) -> (u128, u128) {
        let mask = (1u128 << self.n) - 1;
        (v & mask, (w.wrapping_add(v)) & mask)
    }

    /// Image of a joint basis index.
    pub fn map_index(&self, index: usize) -> usize {
        let dim = 1usize << self.n;
        let (v, w) = (index / dim, index % dim);
        v * dim + (w + v) % dim
    }

    /// The permutation as a table over all `4^n` joint indices.
    pub fn permutation(&self) -> Result<Vec<usize>> {
        crate::fourier::check_capacity(2 * self.n as usize)?;
        Ok((0..1usize << (2 * self.n))
            .map(|i| self.map_index(i))
            .collect())
    }
}

pub fn modular_add_oracle(n: u32) -> Result<ModularAddOracle> {
    if n == 0 || n > 63 {
        return Err(invalid(format!("adder width must be in 1..=63, got {n}")));
    }
    Ok(ModularAddOracle { n })
}

fn maj(c: &mut GateCircuit, x: usize, y: usize, z: usize) -> Result<()> {
    c.push(Gate::Cnot(z, y))?;
    c.push(Gate::Cnot(z, x))?;
    c.push(Gate::Toffoli(x, y, z))
}

fn uma(c: &mut GateCircuit, x: usize, y: usize, z: usize) -> Result<()> {
    c.push(Gate::Toffoli(x, y, z))?;
    c.push(Gate::Cnot(z, x))?;
    c.push(Gate::Cnot(x, y))
}

/// In-place ripple-carry adder, second register `+=` first register mod
/// `2^n`. Widths of 3 or more use the MAJ/UMA ladder with one ancilla and
/// `2n − 2` Toffolis; smaller widths use a direct circuit with no ancilla.
pub fn build_adder_circuit(n: usize) -> Result<(GateCircuit, RegisterLayout)> {
    if n == 0 {
        return Err(invalid("adder width must be positive"));
    }
    let ancillas = usize::from(n >= 3);
    let layout = RegisterLayout::pair(n, ancillas);
    let mut c = GateCircuit::new(layout.num_qubits());
    let a = |i| layout.first_bit(i);
    let b = |i| layout.second_bit(i);
    match n {
        1 => c.push(Gate::Cnot(a(0), b(0)))?,
        2 => {
            c.push(Gate::Toffoli(a(0), b(0), b(1)))?;
            c.push(Gate::Cnot(a(1), b(1)))?;
            c.push(Gate::Cnot(a(0), b(0)))?;
        }
        _ => {
            let c0 = layout.ancilla.start;
            maj(&mut c, c0, b(0), a(0))?;
            for i in 1..=n - 2 {
                maj(&mut c, a(i - 1), b(i), a(i))?;
            }
            c.push(Gate::Cnot(a(n - 1), b(n - 1)))?;
            c.push(Gate::Cnot(a(n - 2), b(n - 1)))?;
            for i in (1..=n - 2).rev() {
                uma(&mut c, a(i - 1), b(i), a(i))?;
            }
            uma(&mut c, c0, b(0), a(0))?;
        }
    }
    Ok((c, layout))
}

/// Adder for a classically known addend.
#[derive(Clone, Debug)]
pub struct ConstantAdder {
    pub circuit: GateCircuit,
    pub register: Range<usize>,
    /// Carry qubits, returned to `|0⟩`.
    pub ancilla: Range<usize>,
    pub constant: u128,
    /// Toffolis in the carry-computation pass alone.
    pub compute_toffolis: usize,
}

/// `|w⟩ ↦ |w + constant mod 2^n⟩` on qubits `[0, n)` with `n − 1` carry
/// ancillas. Carry bits where the addend bit is 0 need an AND, where it is 1
/// an OR; the lowest carry is a copy or nothing.
pub fn build_constant_adder_circuit(n: usize, constant: u128) -> Result<ConstantAdder> {
    if n == 0 || n > 127 {
        return Err(invalid(format!("adder width must be in 1..=127, got {n}")));
    }
    let constant = constant & ((1u128 << n) - 1);
    let bit_set = |i: usize| (constant >> i) & 1 == 1;
    let carries = n - 1;
    let mut c = GateCircuit::new(n + carries);
    let b = |i: usize| n - 1 - i;
    // carry into bit i, for i in 1..n
    let carry = |i: usize| n + i - 1;

    // carry i+1 from (b_i, carry i); self-inverse
    let carry_step = |c: &mut GateCircuit, i: usize| -> Result<()> {
        if i == 0 {
            if bit_set(0) {
                c.push(Gate::Cnot(b(0), carry(1)))?;
            }
            return Ok(());
        }
        if bit_set(i) {
            c.push(Gate::X(b(i)))?;
            c.push(Gate::X(carry(i)))?;
            c.push(Gate::Toffoli(b(i), carry(i), carry(i + 1)))?;
            c.push(Gate::X(b(i)))?;
            c.push(Gate::X(carry(i)))?;
            c.push(Gate::X(carry(i + 1)))
        } else {
            c.push(Gate::Toffoli(b(i), carry(i), carry(i + 1)))
        }
    };
    let sum_bit = |c: &mut GateCircuit, i: usize| -> Result<()> {
        if i > 0 {
            c.push(Gate::Cnot(carry(i), b(i)))?;
        }
        if bit_set(i) {
            c.push(Gate::X(b(i)))?;
        }
        Ok(())
    };

    for i in 0..n - 1 {
        carry_step(&mut c, i)?;
    }
    let compute_toffolis = c.toffoli_count();
    sum_bit(&mut c, n - 1)?;
    for i in (0..n - 1).rev() {
        carry_step(&mut c, i)?;
        sum_bit(&mut c, i)?;
    }
    Ok(ConstantAdder {
        circuit: c,
        register: 0..n,
        ancilla: n..n + carries,
        constant,
        compute_toffolis,
    })
}
