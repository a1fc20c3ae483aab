use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::{wrap_index, RegisterSize};
use crate::error::{invalid, Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Computational-basis amplitudes of an `n`-qubit register.
///
/// Index bit `n-1-q` belongs to qubit `q`, so qubit 0 is the most
/// significant bit. The vector is always normalized to `1e-10`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: RegisterSize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps an amplitude vector, checking length and normalization.
    pub fn new(n: RegisterSize, amps: Vec<Complex64>) -> Result<Self> {
        let len = n.dense_dim()?;
        if amps.len() != len {
            return Err(invalid(format!(
                "expected {len} amplitudes for {n} qubits, got {}",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("state is not normalized (norm² = {norm})")));
        }
        Ok(Self { n, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(n: RegisterSize, mut amps: Vec<Complex64>) -> Result<Self> {
        let len = n.dense_dim()?;
        if amps.len() != len {
            return Err(invalid(format!(
                "expected {len} amplitudes for {n} qubits, got {}",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        let scale = 1.0 / norm.sqrt();
        amps.iter_mut().for_each(|a| *a *= scale);
        Ok(Self { n, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: RegisterSize, index: usize) -> Result<Self> {
        let len = n.dense_dim()?;
        if index >= len {
            return Err(invalid(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// `|+⟩^{⊗n}`, which is also `|γ^(0)⟩`.
    pub fn plus(n: RegisterSize) -> Result<Self> {
        let len = n.dense_dim()?;
        let a = Complex64::new(1.0 / (len as f64).sqrt(), 0.0);
        Ok(Self {
            n,
            amps: vec![a; len],
        })
    }

    pub(crate) fn from_parts_unchecked(n: RegisterSize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n.qubits());
        Self { n, amps }
    }

    pub fn size(&self) -> RegisterSize {
        self.n
    }

    pub fn qubits(&self) -> usize {
        self.n.qubits() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Euclidean distance between amplitude vectors (phase sensitive).
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `self ⊗ low`, with `low` occupying the least significant qubits.
    pub fn tensor(&self, low: &StateVector) -> Result<StateVector> {
        let n = RegisterSize::new(self.n.qubits() + low.n.qubits())?;
        n.dense_dim()?;
        let mut amps = Vec::with_capacity(self.amps.len() * low.amps.len());
        for hi in &self.amps {
            amps.extend(low.amps.iter().map(|lo| hi * lo));
        }
        Ok(Self { n, amps })
    }

    /// Applies `|y⟩ ↦ |y + shift mod N⟩`.
    pub fn modular_shift(&self, shift: i128) -> StateVector {
        let len = self.amps.len();
        let s = wrap_index(shift, self.n) as usize;
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        for (y, a) in self.amps.iter().enumerate() {
            amps[(y + s) % len] = *a;
        }
        Self { n: self.n, amps }
    }

    /// Fidelity of the reduced state on the `target.qubits()` most significant
    /// qubits with the pure state `target`, tracing out the remaining low
    /// qubits.
    pub fn reduced_overlap(&self, target: &StateVector) -> Result<f64> {
        let hi_bits = target.qubits();
        if hi_bits > self.qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.qubits(),
                found: hi_bits,
            });
        }
        let lo_len = 1usize << (self.qubits() - hi_bits);
        let mut total = 0.0;
        for lo in 0..lo_len {
            let amp: Complex64 = target
                .amps
                .iter()
                .enumerate()
                .map(|(hi, t)| t.conj() * self.amps[hi * lo_len + lo])
                .sum();
            total += amp.norm_sqr();
        }
        Ok(total)
    }

    fn same_size(&self, other: &StateVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.qubits(),
                found: other.qubits(),
            });
        }
        Ok(())
    }
}

/// JSON form: array of `[re, im]` pairs in index order `0..N`.
impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.amps.len()))?;
        for a in &self.amps {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

/// `e^{i2π·num/N}` with `num` reduced modulo `N` first so the angle stays small.
pub(crate) fn root_of_unity(num: u128, n: RegisterSize) -> Complex64 {
    let m = num % n.dim();
    let angle = TAU * (m as f64) / (n.dim() as f64);
    Complex64::from_polar(1.0, angle)
}

/// `|γ^(k)⟩` with amplitudes `e^{i2πky/N}/√N`.
pub fn pure_fourier_state(n: RegisterSize, k: u128) -> Result<StateVector> {
    let len = n.dense_dim()?;
    if k >= n.dim() {
        return Err(invalid(format!(
            "Fourier index {k} out of range for {n} qubits"
        )));
    }
    let scale = 1.0 / (len as f64).sqrt();
    let amps = (0..len as u128)
        .map(|y| root_of_unity(k * y, n) * scale)
        .collect();
    Ok(StateVector { n, amps })
}

/// Per-qubit `R_z(φ) = exp[iπφ(I−Z)/2]` arguments decomposing `|γ^(k)⟩`
/// into `⊗_m R_z(φ_m)|+⟩`: `φ_m = k / 2^m` for qubit `m`.
pub fn rotation_angles(n: RegisterSize, k: i64) -> Vec<f64> {
    (0..n.qubits())
        .map(|m| k as f64 / 2f64.powi(m as i32))
        .collect()
}

/// Clifford-only approximation of `|γ^(1)⟩`: `Z|+⟩ ⊗ S|+⟩ ⊗ |+⟩ ⊗ …`.
///
/// Equivalently, samples of `e^{i2πν(t)}` with `ν` quantized to quarter
/// turns over four equal intervals of `t = y/N`.
pub fn approx_initial_state(n: RegisterSize) -> Result<StateVector> {
    if n.qubits() < 2 {
        return Err(invalid(
            "the approximate initial state needs at least 2 qubits",
        ));
    }
    let len = n.dense_dim()?;
    let shift = n.qubits() - 2;
    let scale = 1.0 / (len as f64).sqrt();
    let amps = (0..len)
        .map(|y| {
            let quarter = (y >> shift) as f64;
            Complex64::from_polar(scale, PI * quarter / 2.0)
        })
        .collect();
    Ok(StateVector { n, amps })
}

/// `|⟨γ^(k)|s⟩|²`.
pub fn fidelity(s: &StateVector, n: RegisterSize, k: u128) -> Result<f64> {
    if s.size() != n {
        return Err(Error::DimensionMismatch {
            expected: n.qubits() as usize,
            found: s.qubits(),
        });
    }
    let k = k % n.dim();
    let scale = 1.0 / (s.amps.len() as f64).sqrt();
    // ⟨γ^(k)|y⟩ = e^{-i2πky/N}/√N
    let amp: Complex64 = s
        .amps
        .iter()
        .enumerate()
        .map(|(y, a)| root_of_unity(k * y as u128, n).conj() * a)
        .sum();
    Ok((amp * scale).norm_sqr().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(n: u32) -> RegisterSize {
        RegisterSize::new(n).unwrap()
    }

    #[test]
    fn plus_state_is_gamma_zero() {
        let s = pure_fourier_state(rs(1), 0).unwrap();
        let h = 1.0 / 2f64.sqrt();
        for a in s.amplitudes() {
            assert!((a - Complex64::new(h, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn gamma_two_alternates() {
        let s = pure_fourier_state(rs(2), 2).unwrap();
        let expect = [0.5, -0.5, 0.5, -0.5];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn gamma_self_fidelity() {
        let s = pure_fourier_state(rs(3), 1).unwrap();
        assert!((fidelity(&s, rs(3), 1).unwrap() - 1.0).abs() < 1e-12);
        for (y, a) in s.amplitudes().iter().enumerate() {
            let e = Complex64::from_polar(1.0 / 8f64.sqrt(), TAU * y as f64 / 8.0);
            assert!((a - e).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_angle_examples() {
        assert_eq!(rotation_angles(rs(3), 1), vec![1.0, 0.5, 0.25]);
        assert_eq!(rotation_angles(rs(2), 0), vec![0.0, 0.0]);
        assert_eq!(rotation_angles(rs(4), 3), vec![3.0, 1.5, 0.75, 0.375]);
    }

    #[test]
    fn rotations_reproduce_fourier_state() {
        // ⊗_m R_z(φ_m)|+⟩ with qubit 0 as the top bit
        let n = rs(5);
        for k in [0u128, 1, 3, 17, 31] {
            let phis = rotation_angles(n, k as i64);
            let mut prod =
                StateVector::from_parts_unchecked(rs(1), vec![Complex64::new(1.0, 0.0); 2]);
            for (m, phi) in phis.iter().enumerate() {
                let q = StateVector::from_parts_unchecked(
                    rs(1),
                    vec![
                        Complex64::new(1.0 / 2f64.sqrt(), 0.0),
                        Complex64::from_polar(1.0 / 2f64.sqrt(), PI * phi),
                    ],
                );
                prod = if m == 0 { q } else { prod.tensor(&q).unwrap() };
            }
            let gamma = pure_fourier_state(n, k).unwrap();
            assert!(prod.distance(&gamma).unwrap() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn approx_state_two_qubits_is_exact() {
        // Z|+⟩ ⊗ S|+⟩ is γ^(1) at n = 2
        let s = approx_initial_state(rs(2)).unwrap();
        assert!((fidelity(&s, rs(2), 1).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn approx_state_requires_two_qubits() {
        assert!(approx_initial_state(rs(1)).is_err());
    }

    #[test]
    fn uniform_state_orthogonal_to_gamma_one() {
        let s = StateVector::plus(rs(3)).unwrap();
        assert!(fidelity(&s, rs(3), 1).unwrap() < 1e-15);
    }

    #[test]
    fn increment_eigenstate() {
        let n = rs(6);
        for k in [0u128, 1, 5, 33, 63] {
            let g = pure_fourier_state(n, k).unwrap();
            let shifted = g.modular_shift(1);
            let phase = Complex64::from_polar(1.0, -TAU * k as f64 / 64.0);
            for (a, b) in shifted.amplitudes().iter().zip(g.amplitudes()) {
                assert!((a - b * phase).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let err = pure_fourier_state(rs(40), 1).unwrap_err();
        assert!(matches!(err, Error::Capacity { qubits: 40, .. }));
    }

    #[test]
    fn normalization_is_checked() {
        let err = StateVector::new(rs(1), vec![Complex64::new(1.0, 0.0); 2]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn json_is_pairs() {
        let s = pure_fourier_state(rs(1), 1).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        assert!((arr[1][0].as_f64().unwrap() + 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }
}
