//! Harmonic-domain model of Fourier weights for registers far beyond the
//! dense amplitude cap.
//!
//! Appending `|+⟩` qubits is a zero-order hold in the computational basis.
//! In the Fourier basis it sends coarse harmonic `j` (register of `M = 2^m`
//! points) to the fine harmonics `J = j + M·t`, `t ∈ 0..D` with `D = 2^d`,
//! with weights
//!
//! ```text
//! |K_j(J)|² = sin²(πj/M) / (D² sin²(πJ/(MD)))
//! ```
//!
//! Every fine harmonic has exactly one coarse source, so weights propagate
//! without interference and the whole protocol can be run on weights alone.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fourier::{initial_spectrum_weight, signed_index, FourierSpectrum, RegisterSize};

/// Harmonics retained after each extension.
pub const DEFAULT_K_MAX: usize = 4096;
/// Sidebands generated on each side of a harmonic when extending.
pub const DEFAULT_SIDEBAND_HALF_WIDTH: u64 = 64;

/// Weights are dropped into the tail once they fall below this.
const UNDERFLOW: f64 = 1e-300;

/// Sparse Fourier weights keyed by signed harmonic index in `(−N/2, N/2]`.
///
/// Mass discarded by truncation is tracked in `tail_mass`, together with an
/// upper bound on any single discarded weight, so that later distillation
/// rounds can bound how the tail shrinks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseSpectrum {
    n: RegisterSize,
    entries: BTreeMap<i128, f64>,
    tail_mass: f64,
    tail_max: f64,
}

impl SparseSpectrum {
    /// Exact weights of the `Z`/`S` initial state on `n` qubits, keeping the
    /// `k_max` largest (those nearest `j = 0`).
    pub fn initial(n: RegisterSize, k_max: usize) -> Result<Self> {
        if n.qubits() < 2 {
            return Err(invalid("the initial state needs at least 2 qubits"));
        }
        if k_max == 0 {
            return Err(invalid("k_max must be positive"));
        }
        let half = (n.dim() / 2) as i128;
        let mut entries = BTreeMap::new();
        let mut kept = 0.0;
        // nonzero harmonics are 1, −3, 5, −7, … in order of decreasing weight
        let mut m: i128 = 0;
        let next = |m: i128| if m % 2 == 0 { 1 + 2 * m } else { -(1 + 2 * m) };
        while entries.len() < k_max {
            let j = next(m);
            if j.abs() > half || (j == -half) {
                break;
            }
            let w = initial_spectrum_weight(n, j);
            kept += w;
            entries.insert(j, w);
            m += 1;
        }
        let j = next(m);
        let (tail_mass, tail_max) = if j.abs() <= half && j != -half {
            ((1.0 - kept).max(0.0), initial_spectrum_weight(n, j))
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            n,
            entries,
            tail_mass,
            tail_max,
        })
    }

    pub fn from_spectrum(sp: &FourierSpectrum) -> Self {
        let entries = sp
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(j, w)| (signed_index(j as i128, sp.size()), *w))
            .collect();
        Self {
            n: sp.size(),
            entries,
            tail_mass: 0.0,
            tail_max: 0.0,
        }
    }

    /// Dense weights; the tail is not representable and must be zero.
    pub fn to_dense(&self) -> Result<FourierSpectrum> {
        let len = self.n.dense_dim()?;
        let mut weights = vec![0.0; len];
        for (&j, &w) in &self.entries {
            weights[j.rem_euclid(len as i128) as usize] = w;
        }
        Ok(FourierSpectrum::from_parts_unchecked(self.n, weights))
    }

    pub fn size(&self) -> RegisterSize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (i128, f64)> + '_ {
        self.entries.iter().map(|(&j, &w)| (j, w))
    }

    pub fn weight(&self, j: i128) -> f64 {
        self.entries
            .get(&signed_index(j, self.n))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Upper bound on any single weight inside the tail.
    pub fn tail_max(&self) -> f64 {
        self.tail_max
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum::<f64>() + self.tail_mass
    }

    /// Weight of the reduced state on the `to` most significant qubits at
    /// Fourier index `target`, and the remaining retained mass there.
    pub fn folded(&self, target: i128, to: RegisterSize) -> Result<(f64, f64)> {
        if to > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n.qubits() as usize,
                found: to.qubits() as usize,
            });
        }
        let modulus = to.dim() as i128;
        let t = target.rem_euclid(modulus);
        let (mut on, mut off) = (0.0, 0.0);
        for (&j, &w) in &self.entries {
            if j.rem_euclid(modulus) == t {
                on += w;
            } else {
                off += w;
            }
        }
        Ok((on, off))
    }

    /// One symmetric distillation round on weights.
    ///
    /// Returns the estimated success probability `Σ w² + T·τ`, which bounds
    /// the tail's contribution from above (`T` = tail mass, `τ` = largest
    /// tail weight). The new tail is `T·τ/P` with largest weight `τ²/P`.
    pub fn distill_symmetric(&self) -> Result<(f64, SparseSpectrum)> {
        let tail_sq = self.tail_mass * self.tail_max;
        let p: f64 = self.entries.values().map(|w| w * w).sum::<f64>() + tail_sq;
        if !(p >= UNDERFLOW) {
            return Err(Error::DegenerateInput(p));
        }
        let mut entries = BTreeMap::new();
        let mut tail_mass = tail_sq / p;
        let mut tail_max = self.tail_max * self.tail_max / p;
        for (&j, &w) in &self.entries {
            let v = w * w / p;
            if v >= UNDERFLOW {
                entries.insert(j, v);
            } else {
                tail_mass += v;
                tail_max = tail_max.max(v);
            }
        }
        Ok((
            p,
            SparseSpectrum {
                n: self.n,
                entries,
                tail_mass,
                tail_max,
            },
        ))
    }

    /// Keeps the `k_max` heaviest harmonics, moving the rest into the tail.
    pub fn truncate(&mut self, k_max: usize) {
        if self.entries.len() <= k_max {
            return;
        }
        let mut all: Vec<(i128, f64)> = self.entries.iter().map(|(&j, &w)| (j, w)).collect();
        // heaviest first; ties broken by index for determinism
        all.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for &(_, w) in &all[k_max..] {
            self.tail_mass += w;
            self.tail_max = self.tail_max.max(w);
        }
        self.entries = all.into_iter().take(k_max).collect();
    }
}

/// `sin²(πx)` for `x` given as an exact ratio of integers in `[-1/2, 1/2]`.
fn sin_sq_ratio(num: i128, den: u128) -> f64 {
    (PI * (num as f64) / (den as f64)).sin().powi(2)
}

/// Frequency-domain form of appending `n_new − sp.n` qubits in `|+⟩`.
///
/// Each harmonic keeps the `2·half_width + 1` sidebands nearest the carrier
/// (all of them when that covers the whole family); the rest of its kernel
/// mass is bounded via `sin x ≥ 2x/π` and added to the tail. The result is
/// truncated to `k_max` entries.
pub fn sparse_extend(
    sp: &SparseSpectrum,
    n_new: RegisterSize,
    k_max: usize,
    half_width: u64,
) -> Result<SparseSpectrum> {
    if n_new < sp.n {
        return Err(invalid(format!(
            "cannot extend a {}-qubit spectrum to {n_new} qubits",
            sp.n
        )));
    }
    if k_max == 0 {
        return Err(invalid("k_max must be positive"));
    }
    if n_new == sp.n {
        let mut out = sp.clone();
        out.truncate(k_max);
        return Ok(out);
    }
    let m = sp.n.dim();
    let d_bits = n_new.qubits() - sp.n.qubits();
    let d = 1u128 << d_bits;
    let fine = n_new.dim();
    let full = (2 * half_width as u128 + 1) >= d;
    let ts: Vec<i128> = if full {
        (0..d as i128).collect()
    } else {
        (-(half_width as i128)..=half_width as i128).collect()
    };

    let mut out: Vec<(i128, f64)> = Vec::with_capacity(sp.entries.len() * ts.len());
    let mut tail_mass = sp.tail_mass;
    let mut tail_max = sp.tail_max;
    for (&j, &w) in &sp.entries {
        if j == 0 {
            out.push((0, w));
            continue;
        }
        let carrier = sin_sq_ratio(j, m);
        let d2 = (d as f64) * (d as f64);
        let mut kept = 0.0;
        for &t in &ts {
            let big_j = signed_index(j + (m as i128) * t, n_new);
            let k = carrier / (d2 * sin_sq_ratio(big_j, fine));
            kept += k;
            let v = w * k;
            if v >= UNDERFLOW {
                out.push((big_j, v));
            } else {
                tail_mass += v;
                tail_max = tail_max.max(v);
            }
        }
        if !full {
            let t = half_width as f64;
            let bound = carrier / (2.0 * t);
            let dropped = bound.min((1.0 - kept).max(0.0) + 4.0 * f64::EPSILON);
            tail_mass += w * dropped;
            tail_max = tail_max.max(w * carrier / (4.0 * (t + 0.5).powi(2)));
        }
    }
    let mut result = SparseSpectrum {
        n: n_new,
        entries: out.into_iter().collect(),
        tail_mass,
        tail_max,
    };
    result.truncate(k_max);
    Ok(result)
}
