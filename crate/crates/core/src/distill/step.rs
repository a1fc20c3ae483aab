use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fourier::{FourierAmplitudes, FourierSpectrum, RegisterSize, StateVector};

/// Postselection probability below which two inputs count as disjoint.
const DEGENERATE_P: f64 = 1e-300;

/// Result of one postselected distillation step.
#[derive(Clone, Debug)]
pub struct DistillationOutcome {
    pub p_success: f64,
    pub output: FourierSpectrum,
    /// Output weight at the target index.
    pub fidelity: f64,
    /// Output weight off the target index, summed directly so that it keeps
    /// full relative precision when tiny.
    pub error: f64,
}

impl DistillationOutcome {
    fn from_output(p_success: f64, output: FourierSpectrum, target_k: i128) -> Self {
        let target = crate::fourier::wrap_index(target_k, output.size()) as usize;
        let fidelity = output.weights()[target];
        let error = output
            .weights()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != target)
            .map(|(_, w)| w)
            .sum();
        Self {
            p_success,
            output,
            fidelity,
            error,
        }
    }
}

fn check_pair(a: &FourierSpectrum, b: &FourierSpectrum) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::DimensionMismatch {
            expected: a.size().qubits() as usize,
            found: b.size().qubits() as usize,
        });
    }
    Ok(())
}

/// Adds register `a` into register `a2`, measures `a` in the Fourier basis
/// and keeps the `|γ^(0)⟩` outcome.
///
/// `P = Σ_y a_y a2_y` and the output weights are `a_j a2_j / P`.
pub fn distill_pair(
    a: &FourierSpectrum,
    a2: &FourierSpectrum,
    target_k: i128,
) -> Result<DistillationOutcome> {
    check_pair(a, a2)?;
    let products: Vec<f64> = a
        .weights()
        .iter()
        .zip(a2.weights())
        .map(|(x, y)| x * y)
        .collect();
    let p: f64 = products.iter().sum();
    if !(p >= DEGENERATE_P) {
        return Err(Error::DegenerateInput(p));
    }
    let weights = products.into_iter().map(|w| w / p).collect();
    let output = FourierSpectrum::from_parts_unchecked(a.size(), weights);
    Ok(DistillationOutcome::from_output(p, output, target_k))
}

/// [`distill_pair`] with two copies of the same spectrum.
pub fn symmetric_round(a: &FourierSpectrum, target_k: i128) -> Result<DistillationOutcome> {
    distill_pair(a, a, target_k)
}

/// `r` successful symmetric rounds at fixed width: `a_j^{2^r} / Σ a^{2^r}`.
///
/// Evaluated in log space so that `2^r`-th powers never underflow before
/// normalization.
pub fn repeated_symmetric(a: &FourierSpectrum, r: u32, _target_k: i128) -> Result<FourierSpectrum> {
    if r == 0 {
        return Err(invalid("repeated_symmetric needs at least one round"));
    }
    if r > 60 {
        return Err(invalid("more than 60 rounds overflows the exponent"));
    }
    let exponent = 2f64.powi(r as i32);
    let logs: Vec<f64> = a
        .weights()
        .iter()
        .map(|&w| {
            if w > 0.0 {
                exponent * w.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::DegenerateInput(0.0));
    }
    let scaled: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = scaled.iter().sum();
    Ok(FourierSpectrum::from_parts_unchecked(
        a.size(),
        scaled.into_iter().map(|w| w / total).collect(),
    ))
}

/// Amplitude-level distillation: the surviving register holds
/// `Σ_j a_j b_j |γ^(j)⟩ / √P`, where `a` is the register that is added from
/// and then measured.
pub fn distill_amplitudes(
    a: &FourierAmplitudes,
    b: &FourierAmplitudes,
) -> Result<(f64, FourierAmplitudes)> {
    if a.size() != b.size() {
        return Err(Error::DimensionMismatch {
            expected: a.size().qubits() as usize,
            found: b.size().qubits() as usize,
        });
    }
    let products: Vec<Complex64> = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x * y)
        .collect();
    let p: f64 = products.iter().map(|c| c.norm_sqr()).sum();
    if !(p >= DEGENERATE_P) {
        return Err(Error::DegenerateInput(p));
    }
    let scale = 1.0 / p.sqrt();
    let coeffs = products.into_iter().map(|c| c * scale).collect();
    Ok((p, FourierAmplitudes::from_parts_unchecked(a.size(), coeffs)))
}

/// Appends `|+⟩` qubits on the least significant side.
pub fn extend_register(s: &StateVector, n_new: RegisterSize) -> Result<StateVector> {
    if n_new < s.size() {
        return Err(invalid(format!(
            "cannot extend a {}-qubit register to {n_new} qubits",
            s.size()
        )));
    }
    n_new.dense_dim()?;
    if n_new == s.size() {
        return Ok(s.clone());
    }
    let extra = RegisterSize::new(n_new.qubits() - s.size().qubits())?;
    s.tensor(&StateVector::plus(extra)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{
        approx_initial_state, fidelity, fidelity_threshold, pure_fourier_state, to_fourier_basis,
    };
    use std::f64::consts::PI;

    fn rs(n: u32) -> RegisterSize {
        RegisterSize::new(n).unwrap()
    }

    fn initial(n: u32) -> FourierSpectrum {
        to_fourier_basis(&approx_initial_state(rs(n)).unwrap()).spectrum()
    }

    #[test]
    fn deltas_distill_perfectly() {
        let d = FourierSpectrum::delta(rs(4), 3).unwrap();
        let out = distill_pair(&d, &d, 3).unwrap();
        assert_eq!(out.p_success, 1.0);
        assert_eq!(out.fidelity, 1.0);
        assert_eq!(out.error, 0.0);
    }

    #[test]
    fn disjoint_deltas_are_degenerate() {
        let a = FourierSpectrum::delta(rs(4), 1).unwrap();
        let b = FourierSpectrum::delta(rs(4), 3).unwrap();
        assert!(matches!(
            distill_pair(&a, &b, 1),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn size_mismatch() {
        let a = FourierSpectrum::delta(rs(4), 1).unwrap();
        let b = FourierSpectrum::delta(rs(5), 1).unwrap();
        assert!(matches!(
            distill_pair(&a, &b, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn large_register_symmetric_round() {
        // P → (64/π⁴)(π⁴/96) = 2/3 and F → 96/π⁴
        let out = symmetric_round(&initial(16), 1).unwrap();
        assert!((out.p_success - 2.0 / 3.0).abs() < 1e-6);
        assert!((out.fidelity - 96.0 / PI.powi(4)).abs() < 1e-6);
        assert!(out.fidelity < 0.986);
        assert!((out.fidelity + out.error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_repeated_round_matches_symmetric_round() {
        let a = initial(8);
        let once = symmetric_round(&a, 1).unwrap().output;
        let rep = repeated_symmetric(&a, 1, 1).unwrap();
        for (x, y) in once.weights().iter().zip(rep.weights()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn repeated_error_follows_ratio_law() {
        let a = initial(14);
        for (r, factor) in [(2u32, 9f64.powi(-4)), (3, 9f64.powi(-8))] {
            let out = repeated_symmetric(&a, r, 1).unwrap();
            let err: f64 = out
                .weights()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != 1)
                .map(|(_, w)| w)
                .sum();
            assert!(err / factor < 2.0 && err / factor > 0.5, "r = {r}: {err}");
        }
    }

    #[test]
    fn repeated_survives_deep_exponents() {
        let a = initial(10);
        let out = repeated_symmetric(&a, 12, 1).unwrap();
        assert!((out.weight(1) - 1.0).abs() < 1e-15);
        assert!(out.weights().iter().all(|w| w.is_finite()));
    }

    #[test]
    fn extend_plus_is_plus() {
        let s = StateVector::plus(rs(3)).unwrap();
        let e = extend_register(&s, rs(6)).unwrap();
        assert!(e.distance(&StateVector::plus(rs(6)).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn extending_pure_gamma_one_costs_little() {
        let g = pure_fourier_state(rs(5), 1).unwrap();
        let e = extend_register(&g, rs(10)).unwrap();
        let f = fidelity(&e, rs(10), 1).unwrap();
        // zero-order-hold kernel at the carrier: sin²(π/32) / (32² sin²(π/1024))
        let oracle = (PI / 32.0).sin().powi(2) / (1024.0 * (PI / 1024.0).sin().powi(2));
        assert!((f - oracle).abs() < 1e-12);
        assert!(1.0 - f < fidelity_threshold(rs(5)) / 2.0);
    }

    #[test]
    fn extend_rejects_shrink() {
        let g = pure_fourier_state(rs(5), 1).unwrap();
        assert!(extend_register(&g, rs(4)).is_err());
    }

    #[test]
    fn amplitude_distill_matches_weights() {
        let s = to_fourier_basis(&approx_initial_state(rs(7)).unwrap());
        let (p, out) = distill_amplitudes(&s, &s).unwrap();
        let w = symmetric_round(&s.spectrum(), 1).unwrap();
        assert!((p - w.p_success).abs() < 1e-14);
        for (x, y) in out.spectrum().weights().iter().zip(w.output.weights()) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
