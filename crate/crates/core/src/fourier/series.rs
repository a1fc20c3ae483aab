use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{wrap_index, FourierAmplitudes, RegisterSize, StateVector};
use crate::error::{invalid, Result};

/// One Fourier-series coefficient `c_j` of the sampled phase function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesCoefficient {
    pub j: i128,
    #[serde(serialize_with = "serialize_complex")]
    pub value: Complex64,
}

fn serialize_complex<S: serde::Serializer>(
    c: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

impl SeriesCoefficient {
    pub fn of(j: i128) -> Self {
        Self {
            j,
            value: series_coefficient(j),
        }
    }

    pub fn weight(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// Fourier-series coefficient of `e^{i2πν(t)}` with `ν` quantized to quarter
/// turns: `(2−2i)/(πj)` when `j ≡ 1 (mod 4)`, zero otherwise (including
/// `j = 0`).
pub fn series_coefficient(j: i128) -> Complex64 {
    if j.rem_euclid(4) != 1 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(2.0, -2.0) / (PI * j as f64)
}

/// Phase function `f(t) = e^{i2πν(t)}` whose phase is discretized to
/// `phase_bits` bits, sampled on a `resolution_bits`-qubit register.
///
/// `phase_bits = 2` is the `Z`/`S` initial state; larger values keep more of
/// the exact single-qubit rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseFunctionSpec {
    pub resolution_bits: u32,
    pub phase_bits: u32,
}

impl PhaseFunctionSpec {
    pub fn new(resolution_bits: u32, phase_bits: u32) -> Result<Self> {
        if phase_bits == 0 || phase_bits > resolution_bits {
            return Err(invalid(format!(
                "phase bits must be in 1..={resolution_bits}, got {phase_bits}"
            )));
        }
        RegisterSize::new(resolution_bits)?;
        Ok(Self {
            resolution_bits,
            phase_bits,
        })
    }

    fn intervals(&self) -> f64 {
        2f64.powi(self.phase_bits as i32)
    }

    /// The sampled state `Σ_y f(y/N)|y⟩/√N`.
    pub fn state(&self) -> Result<StateVector> {
        let n = RegisterSize::new(self.resolution_bits)?;
        let len = n.dense_dim()?;
        let shift = self.resolution_bits - self.phase_bits;
        let scale = 1.0 / (len as f64).sqrt();
        let l = self.intervals();
        let amps = (0..len)
            .map(|y| Complex64::from_polar(scale, 2.0 * PI * (y >> shift) as f64 / l))
            .collect();
        StateVector::normalized(n, amps)
    }

    /// `c_j = L(1 − e^{-i2π/L})/(i2πj)` for `j ≡ 1 (mod L)`, `L = 2^phase_bits`.
    pub fn series_coefficient(&self, j: i128) -> Complex64 {
        let l = 1i128 << self.phase_bits;
        if j.rem_euclid(l) != 1 {
            return Complex64::new(0.0, 0.0);
        }
        let lf = l as f64;
        let num = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -2.0 * PI / lf)) * lf;
        num / Complex64::new(0.0, 2.0 * PI * j as f64)
    }

    /// Exact Fourier-basis weight `|a_j|²` of [`Self::state`]:
    /// `L² sin²(π/L) / (N² sin²(πj/N))` for `j ≡ 1 (mod L)`.
    ///
    /// Sampling the discontinuous phase exactly at its jumps makes this
    /// differ from the aliased series sum by `O(1/N)` per amplitude.
    pub fn exact_weight(&self, j: i128) -> f64 {
        let l = 1i128 << self.phase_bits;
        if j.rem_euclid(l) != 1 {
            return 0.0;
        }
        let n = RegisterSize::new(self.resolution_bits).expect("validated in new");
        if self.phase_bits == self.resolution_bits {
            return if wrap_index(j, n) == 1 { 1.0 } else { 0.0 };
        }
        let dim = n.dim() as f64;
        let js = super::signed_index(j, n) as f64;
        let lf = l as f64;
        let num = lf * (PI / lf).sin();
        let den = dim * (PI * js / dim).sin();
        (num / den).powi(2)
    }
}

/// Exact weight `|a_j|²` of the `Z`/`S` initial state on `n` qubits:
/// `8 / (N² sin²(πj/N))` for `j ≡ 1 (mod 4)`, else 0.
pub fn initial_spectrum_weight(n: RegisterSize, j: i128) -> f64 {
    if n.qubits() < 2 {
        return 0.0;
    }
    PhaseFunctionSpec {
        resolution_bits: n.qubits(),
        phase_bits: 2,
    }
    .exact_weight(j)
}

/// Result of folding a Fourier series onto an `N`-point register.
#[derive(Clone, Debug)]
pub struct AliasedAmplitudes {
    pub amplitudes: FourierAmplitudes,
    /// `1 − Σ_{|j| ≤ j_max} |c_j|²`: series mass outside the summation window.
    pub tail_mass: f64,
    /// `Σ_j |a_j|²` before renormalization.
    pub raw_norm: f64,
}

/// Aliasing `a_j = Σ_x c_{Nx+j}` truncated to `|Nx + j| ≤ j_max`, then
/// renormalized.
///
/// The series is assumed to come from a unit-modulus function, so that
/// `Σ_j |c_j|² = 1` and the excluded mass can be reported.
pub fn alias_fold<F>(n: RegisterSize, series: F, j_max: u128) -> Result<AliasedAmplitudes>
where
    F: Fn(i128) -> Complex64,
{
    let len = n.dense_dim()?;
    if j_max < n.dim() {
        return Err(invalid(format!(
            "j_max = {j_max} must be at least N = {}",
            n.dim()
        )));
    }
    let j_max = j_max as i128;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
    let mut kept = 0.0;
    for j in -j_max..=j_max {
        let c = series(j);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        kept += c.norm_sqr();
        coeffs[wrap_index(j, n) as usize] += c;
    }
    let raw_norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if !(raw_norm > 0.0) {
        return Err(invalid("series has no support in the summation window"));
    }
    let scale = 1.0 / raw_norm.sqrt();
    coeffs.iter_mut().for_each(|c| *c *= scale);
    Ok(AliasedAmplitudes {
        amplitudes: FourierAmplitudes::from_parts_unchecked(n, coeffs),
        tail_mass: (1.0 - kept).max(0.0),
        raw_norm,
    })
}

/// `sin²(π/2^n)`: the largest error a distilled `n`-qubit state may carry.
pub fn fidelity_threshold(n: RegisterSize) -> f64 {
    (PI / 2f64.powi(n.qubits() as i32)).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::super::{approx_initial_state, to_fourier_basis};
    use super::*;

    fn rs(n: u32) -> RegisterSize {
        RegisterSize::new(n).unwrap()
    }

    #[test]
    fn c1_weight() {
        assert!((series_coefficient(1).norm_sqr() - 8.0 / (PI * PI)).abs() < 1e-15);
        assert!((SeriesCoefficient::of(1).weight() - 0.810569469).abs() < 1e-9);
    }

    #[test]
    fn sideband_ratio_is_one_ninth() {
        let r = series_coefficient(-3).norm_sqr() / series_coefficient(1).norm_sqr();
        assert!((r - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn zero_off_residue() {
        for j in [-4i128, -2, -1, 0, 2, 3, 4, 6, 7, 8] {
            assert_eq!(series_coefficient(j), Complex64::new(0.0, 0.0), "j = {j}");
        }
    }

    #[test]
    fn tail_law() {
        for j in [-15i128, -3, 1, 5, 101, -1023] {
            let w = series_coefficient(j).norm_sqr();
            assert!((w - 8.0 / (PI * PI * (j * j) as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn general_phase_function_matches_quarter_turn_case() {
        let pf = PhaseFunctionSpec::new(6, 2).unwrap();
        for j in -20..20 {
            assert!((pf.series_coefficient(j) - series_coefficient(j)).norm() < 1e-15);
        }
        let s = pf.state().unwrap();
        assert!(s.distance(&approx_initial_state(rs(6)).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn general_phase_function_series_by_quadrature() {
        // midpoint rule on ∫ e^{i2π(ν(t) − jt)} dt, 8 intervals
        let pf = PhaseFunctionSpec::new(10, 3).unwrap();
        let steps = 1 << 16;
        for j in [-7i128, 1, 9, 2, 5] {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..steps {
                let t = (s as f64 + 0.5) / steps as f64;
                let nu = (t * 8.0).floor() / 8.0;
                acc += Complex64::from_polar(1.0, 2.0 * PI * (nu - j as f64 * t));
            }
            acc /= steps as f64;
            assert!((acc - pf.series_coefficient(j)).norm() < 1e-6, "j = {j}");
        }
    }

    #[test]
    fn exact_weight_matches_dft() {
        for bits in 2..=12 {
            let sp = to_fourier_basis(&approx_initial_state(rs(bits)).unwrap()).spectrum();
            for (j, w) in sp.weights().iter().enumerate() {
                assert!(
                    (w - initial_spectrum_weight(rs(bits), j as i128)).abs() < 1e-12,
                    "n = {bits}, j = {j}"
                );
            }
        }
        let pf = PhaseFunctionSpec::new(9, 4).unwrap();
        let sp = to_fourier_basis(&pf.state().unwrap()).spectrum();
        for (j, w) in sp.weights().iter().enumerate() {
            assert!((w - pf.exact_weight(j as i128)).abs() < 1e-12);
        }
    }

    #[test]
    fn alias_fold_rejects_short_window() {
        assert!(alias_fold(rs(6), series_coefficient, 32).is_err());
    }

    #[test]
    fn alias_fold_single_harmonic() {
        let series = |j: i128| {
            if j == 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let out = alias_fold(rs(6), series, 64).unwrap();
        let sp = out.amplitudes.spectrum();
        assert!((sp.weight(1) - 1.0).abs() < 1e-15);
        assert_eq!(out.tail_mass, 0.0);
    }

    #[test]
    fn alias_fold_bucket_by_brute_force() {
        // n = 4: bucket 13 ≡ -3 collects c_{-3}, c_{13}, c_{-19}, c_{29}, …
        let j_max = 1u128 << 12;
        let out = alias_fold(rs(4), series_coefficient, j_max).unwrap();
        let mut brute = Complex64::new(0.0, 0.0);
        let mut x = -(j_max as i128);
        while x <= j_max as i128 {
            if x.rem_euclid(16) == 13 {
                brute += series_coefficient(x);
            }
            x += 1;
        }
        let got = out.amplitudes.coeffs()[13] * out.raw_norm.sqrt();
        assert!((got - brute).norm() < 1e-14);
        let both = series_coefficient(-3) + series_coefficient(13);
        assert!(brute.norm() > both.norm() * 0.9);
        assert!(out.tail_mass > 0.0 && out.tail_mass < 1e-3);
    }

    #[test]
    fn threshold_values() {
        assert!((fidelity_threshold(rs(1)) - 1.0).abs() < 1e-15);
        assert!((fidelity_threshold(rs(5)) - 9.607e-3).abs() < 1e-6);
        let t10 = fidelity_threshold(rs(10));
        let small = (PI / 1024.0).powi(2);
        assert!((t10 - small).abs() / small < 0.01);
        assert!((t10 - 9.41e-6).abs() < 1e-8);
    }
}
