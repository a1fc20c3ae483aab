use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::{wrap_index, RegisterSize, StateVector};
use crate::error::{invalid, Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Coefficients `a_j = ⟨γ^(j)|ψ⟩` of a state in the Fourier basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierAmplitudes {
    n: RegisterSize,
    coeffs: Vec<Complex64>,
}

impl FourierAmplitudes {
    pub fn new(n: RegisterSize, coeffs: Vec<Complex64>) -> Result<Self> {
        let len = n.dense_dim()?;
        if coeffs.len() != len {
            return Err(invalid(format!(
                "expected {len} Fourier coefficients, got {}",
                coeffs.len()
            )));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!(
                "Fourier coefficients are not normalized (norm² = {norm})"
            )));
        }
        Ok(Self { n, coeffs })
    }

    pub(crate) fn from_parts_unchecked(n: RegisterSize, coeffs: Vec<Complex64>) -> Self {
        Self { n, coeffs }
    }

    /// All weight on `|γ^(k)⟩`.
    pub fn delta(n: RegisterSize, k: u128) -> Result<Self> {
        let len = n.dense_dim()?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        coeffs[wrap_index(k as i128, n) as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n, coeffs })
    }

    pub fn size(&self) -> RegisterSize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn spectrum(&self) -> FourierSpectrum {
        FourierSpectrum {
            n: self.n,
            weights: self.coeffs.iter().map(|c| c.norm_sqr()).collect(),
        }
    }
}

/// Squared magnitudes `|a_j|²` over Fourier indices `0..N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierSpectrum {
    #[serde(skip)]
    n: RegisterSize,
    weights: Vec<f64>,
}

impl FourierSpectrum {
    pub fn new(n: RegisterSize, weights: Vec<f64>) -> Result<Self> {
        let len = n.dense_dim()?;
        if weights.len() != len {
            return Err(invalid(format!(
                "expected {len} weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(invalid("spectrum weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("spectrum weights sum to {total}, not 1")));
        }
        Ok(Self { n, weights })
    }

    pub(crate) fn from_parts_unchecked(n: RegisterSize, weights: Vec<f64>) -> Self {
        Self { n, weights }
    }

    pub fn delta(n: RegisterSize, k: u128) -> Result<Self> {
        let len = n.dense_dim()?;
        let mut weights = vec![0.0; len];
        weights[wrap_index(k as i128, n) as usize] = 1.0;
        Ok(Self { n, weights })
    }

    pub fn size(&self) -> RegisterSize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at Fourier index `k mod N` (negative `k` allowed).
    pub fn weight(&self, k: i128) -> f64 {
        self.weights[wrap_index(k, self.n) as usize]
    }

    /// Spectrum of the reduced state on the `to` most significant qubits.
    ///
    /// Tracing out low qubits folds the Fourier index modulo `2^to`; the
    /// low-qubit factors of Fourier states whose indices differ by a multiple
    /// of `2^to` are orthogonal, so weights add without interference.
    pub fn fold(&self, to: RegisterSize) -> Result<FourierSpectrum> {
        if to > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n.qubits() as usize,
                found: to.qubits() as usize,
            });
        }
        let len = 1usize << to.qubits();
        let mut weights = vec![0.0; len];
        for (j, w) in self.weights.iter().enumerate() {
            weights[j % len] += w;
        }
        Ok(Self { n: to, weights })
    }
}

fn transform(values: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(values.len())
    } else {
        planner.plan_fft_forward(values.len())
    };
    fft.process(values);
    let scale = 1.0 / (values.len() as f64).sqrt();
    values.iter_mut().for_each(|v| *v *= scale);
}

/// `a_j = ⟨γ^(j)|s⟩ = (1/√N) Σ_y e^{-i2πjy/N} s_y`: a unitary forward FFT,
/// with the state convention `γ^(k)_y = e^{+i2πky/N}/√N`.
pub fn to_fourier_basis(s: &StateVector) -> FourierAmplitudes {
    let mut coeffs = s.amplitudes().to_vec();
    transform(&mut coeffs, false);
    FourierAmplitudes {
        n: s.size(),
        coeffs,
    }
}

/// Inverse of [`to_fourier_basis`]: `s_y = Σ_j a_j γ^(j)_y`.
pub fn from_fourier_basis(a: &FourierAmplitudes) -> StateVector {
    let mut amps = a.coeffs.clone();
    transform(&mut amps, true);
    StateVector::from_parts_unchecked(a.n, amps)
}
