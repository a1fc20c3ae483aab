//! Toffoli accounting for the distillation tree and the comparison between
//! phase-kickback rotations and T-gate approximation sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distill::{
    plan_schedule, run_protocol_exact, run_protocol_sparse, ProtocolSchedule, DEFAULT_K_MAX,
    DEFAULT_SIDEBAND_HALF_WIDTH,
};
use crate::error::{invalid, Result};
use crate::fourier::RegisterSize;
use crate::numfmt::{csv_float, round_sig};

/// Largest target width whose round probabilities come from the dense engine.
pub const EXACT_ENGINE_MAX_N: u32 = 16;

/// Slope and intercepts of the T-gate sequence cost model.
pub const T_COST_SLOPE: f64 = 3.21;
pub const T_COST_INTERCEPT: f64 = 6.93;
pub const T_COST_BITS_INTERCEPT: f64 = 6.45;

/// Toffolis in one mod-`2^s` adder without the carry-out gate.
pub fn adder_toffolis(size: u32) -> u64 {
    (2 * u64::from(size)).saturating_sub(4)
}

/// `2^{R+1}·R·s − 2^{R+2} + 4`: a full doubling tree whose round `r`
/// registers have `2^r·s` qubits.
pub fn toffoli_closed_form(rounds: u32, s: u64) -> Result<u128> {
    check_tree(rounds, s)?;
    let r = u128::from(rounds);
    let s = u128::from(s);
    Ok((1u128 << (r + 1)) * r * s + 4 - (1u128 << (r + 2)))
}

/// `Σ_{r=1}^{R} 2^{R−r}(2^{r+1}s − 4)`, summed term by term.
pub fn toffoli_direct_sum(rounds: u32, s: u64) -> Result<u128> {
    check_tree(rounds, s)?;
    Ok((1..=rounds)
        .map(|r| (1u128 << (rounds - r)) * ((1u128 << (r + 1)) * u128::from(s) - 4))
        .sum())
}

fn check_tree(rounds: u32, s: u64) -> Result<()> {
    if rounds == 0 || rounds > 60 {
        return Err(invalid(format!(
            "round count must be in 1..=60, got {rounds}"
        )));
    }
    if s < 3 {
        return Err(invalid(format!(
            "register size must be at least 3, got {s}"
        )));
    }
    Ok(())
}

/// Cost of one level of the tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundCost {
    pub size: u32,
    pub adders: u64,
    pub toffolis_per_adder: u64,
    pub p_success: f64,
}

/// `(mean, std)` of sampled Toffoli totals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedCost {
    pub mean: f64,
    pub std: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub n: u32,
    pub rounds: u32,
    pub per_round: Vec<RoundCost>,
    /// Every node succeeds at the first attempt.
    pub toffoli_deterministic: u64,
    /// Retry-inclusive expectation from the level recursion.
    pub toffoli_expected_analytic: f64,
    pub toffoli_expected: Option<ExpectedCost>,
    /// Two registers of the widest round plus the adder ancilla.
    pub width_qubits: u32,
    /// Register qubits only.
    pub register_width: u32,
}

impl ResourceReport {
    pub const CSV_HEADER: &'static str =
        "n,toffoli_deterministic,toffoli_expected_mean,toffoli_expected_std,rounds,width";

    pub fn csv_row(&self) -> String {
        let (mean, std) = match &self.toffoli_expected {
            Some(e) => (csv_float(e.mean), csv_float(e.std)),
            None => (String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{},{}",
            self.n, self.toffoli_deterministic, mean, std, self.rounds, self.width_qubits
        )
    }

    /// Expected extra Toffolis spent on retries.
    pub fn retry_overhead(&self) -> f64 {
        self.toffoli_expected_analytic - self.toffoli_deterministic as f64
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain data");
        v["toffoli_expected_analytic"] = round_sig(self.toffoli_expected_analytic).into();
        v["retry_overhead"] = round_sig(self.retry_overhead()).into();
        if let Some(rounds) = v["per_round"].as_array_mut() {
            for r in rounds {
                r["p_success"] = round_sig(r["p_success"].as_f64().unwrap_or(f64::NAN)).into();
            }
        }
        if let Some(e) = &self.toffoli_expected {
            v["toffoli_expected"]["mean"] = round_sig(e.mean).into();
            v["toffoli_expected"]["std"] = round_sig(e.std).into();
            v["toffoli_expected"]["std_error"] = round_sig(e.std_error).into();
        }
        v
    }
}

/// Postselection probability of every round, from the dense engine up to
/// [`EXACT_ENGINE_MAX_N`] and the sparse engine above.
pub fn round_success_probabilities(
    n: RegisterSize,
    schedule: &ProtocolSchedule,
) -> Result<Vec<f64>> {
    let run = if n.qubits() <= EXACT_ENGINE_MAX_N {
        run_protocol_exact(n, schedule)?
    } else {
        run_protocol_sparse(n, schedule, DEFAULT_K_MAX, DEFAULT_SIDEBAND_HALF_WIDTH)?
    };
    Ok(run.rounds.iter().map(|r| r.p_success).collect())
}

/// Per-level costs for a schedule and its success probabilities.
pub fn round_costs(schedule: &ProtocolSchedule, p_success: &[f64]) -> Result<Vec<RoundCost>> {
    if p_success.len() != schedule.sizes.len() {
        return Err(invalid("one success probability per round is required"));
    }
    if let Some(p) = p_success.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(invalid(format!("success probability {p} outside (0, 1]")));
    }
    Ok(schedule
        .sizes
        .iter()
        .zip(p_success)
        .enumerate()
        .map(|(i, (&size, &p))| RoundCost {
            size,
            adders: schedule.adders_in_round(i as u32 + 1),
            toffolis_per_adder: adder_toffolis(size),
            p_success: p,
        })
        .collect())
}

pub fn deterministic_cost(per_round: &[RoundCost]) -> u64 {
    per_round
        .iter()
        .map(|r| r.adders * r.toffolis_per_adder)
        .sum()
}

/// `E_r = (2E_{r−1} + A_r)/p_r`, `E_0 = 0`: a failed node discards both of
/// its inputs and everything that fed them.
pub fn expected_cost_analytic(per_round: &[RoundCost]) -> f64 {
    per_round.iter().fold(0.0, |e, r| {
        (2.0 * e + r.toffolis_per_adder as f64) / r.p_success
    })
}

/// Toffolis spent producing one successful node at level `level` (1-based).
fn sample_node(per_round: &[RoundCost], level: usize, rng: &mut ChaCha8Rng) -> u64 {
    if level == 0 {
        return 0;
    }
    let round = &per_round[level - 1];
    let mut spent = 0;
    loop {
        spent += sample_node(per_round, level - 1, rng);
        spent += sample_node(per_round, level - 1, rng);
        spent += round.toffolis_per_adder;
        if round.p_success >= 1.0 || rng.gen::<f64>() < round.p_success {
            return spent;
        }
    }
}

/// Samples the retry tree `trials` times. Trial `t` draws from stream `t` of
/// a generator seeded with `seed`, so the result does not depend on thread
/// scheduling.
pub fn expected_cost_monte_carlo(
    per_round: &[RoundCost],
    trials: u64,
    seed: u64,
) -> Result<ExpectedCost> {
    if trials == 0 {
        return Err(invalid("Monte Carlo needs at least one trial"));
    }
    if per_round.is_empty() {
        return Err(invalid("no rounds to sample"));
    }
    let samples: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            sample_node(per_round, per_round.len(), &mut rng)
        })
        .collect();
    let count = samples.len() as f64;
    let mean = samples.iter().map(|&x| x as f64).sum::<f64>() / count;
    let var = if samples.len() > 1 {
        samples
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / (count - 1.0)
    } else {
        0.0
    };
    let std = var.sqrt();
    Ok(ExpectedCost {
        mean,
        std,
        std_error: std / count.sqrt(),
        trials,
        seed,
    })
}

/// Full report for target width `n` using [`plan_schedule`]. With
/// `trials = 0` only the deterministic and analytic figures are filled.
pub fn toffoli_capped(n: u32, s0: u32, pad: u32, trials: u64, seed: u64) -> Result<ResourceReport> {
    if n < 5 {
        return Err(invalid(format!("resource reports need n >= 5, got {n}")));
    }
    let size = RegisterSize::new(n)?;
    let schedule = plan_schedule(size, s0, pad)?;
    let p = round_success_probabilities(size, &schedule)?;
    report_for(&schedule, &p, trials, seed)
}

/// Report for an explicit schedule and probabilities, e.g. `p = 1` everywhere.
pub fn report_for(
    schedule: &ProtocolSchedule,
    p_success: &[f64],
    trials: u64,
    seed: u64,
) -> Result<ResourceReport> {
    let per_round = round_costs(schedule, p_success)?;
    let toffoli_expected = if trials > 0 {
        Some(expected_cost_monte_carlo(&per_round, trials, seed)?)
    } else {
        None
    };
    Ok(ResourceReport {
        n: schedule.n_target.qubits(),
        rounds: schedule.rounds,
        toffoli_deterministic: deterministic_cost(&per_round),
        toffoli_expected_analytic: expected_cost_analytic(&per_round),
        toffoli_expected,
        per_round,
        width_qubits: schedule.logical_width(),
        register_width: 2 * schedule.max_size(),
    })
}

pub fn resources_csv(reports: &[ResourceReport]) -> String {
    let mut out = String::from(ResourceReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Phase-kickback rotation to `p` bits on an `(p+1)`-qubit Fourier register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KickbackCost {
    pub p: u32,
    pub register_qubits: u32,
    pub toffolis: u64,
    /// Carry ancillas plus the Fourier register.
    pub ancillas: u64,
    pub controlled_toffolis: u64,
    pub controlled_ancillas: u64,
}

pub fn kickback_rotation_cost(p: u32) -> Result<KickbackCost> {
    if !(2..=120).contains(&p) {
        return Err(invalid(format!(
            "precision must be in 2..=120 bits, got {p}"
        )));
    }
    let n = u64::from(p) + 1;
    let toffolis = n - 2;
    let ancillas = (n - 1) + n;
    Ok(KickbackCost {
        p,
        register_qubits: p + 1,
        toffolis,
        ancillas,
        controlled_toffolis: toffolis + 1,
        controlled_ancillas: ancillas + 1,
    })
}

/// `√(1 − ½|1 + e^{iπ/2^p}|)`, evaluated as `√2·sin(π/2^{p+2})` to avoid
/// cancellation.
pub fn epsilon_f_kickback(p: u32) -> Result<f64> {
    if p == 0 || p > 1000 {
        return Err(invalid(format!(
            "precision must be in 1..=1000 bits, got {p}"
        )));
    }
    let x = std::f64::consts::PI * 2f64.powi(-(p as i32) - 2);
    Ok(std::f64::consts::SQRT_2 * x.sin())
}

/// Leading-order form `(1/√8)(π/2^p)`.
pub fn epsilon_f_kickback_approx(p: u32) -> Result<f64> {
    if p == 0 || p > 1000 {
        return Err(invalid(format!(
            "precision must be in 1..=1000 bits, got {p}"
        )));
    }
    Ok(std::f64::consts::PI * 2f64.powi(-(p as i32)) / 8f64.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TCost {
    pub t_gates: f64,
    /// The formula went negative and was clamped to zero.
    pub clamped: bool,
}

/// `C_T = 3.21·log₂(1/ε) − 6.93`, clamped at zero.
pub fn t_sequence_cost(eps_f: f64) -> Result<TCost> {
    if !(eps_f > 0.0 && eps_f < 1.0) {
        return Err(invalid(format!(
            "approximation error must lie in (0, 1), got {eps_f}"
        )));
    }
    let raw = T_COST_SLOPE * (1.0 / eps_f).log2() - T_COST_INTERCEPT;
    Ok(TCost {
        t_gates: raw.max(0.0),
        clamped: raw < 0.0,
    })
}

/// `3.21p − 6.45`.
pub fn t_sequence_cost_bits(p: u32) -> f64 {
    T_COST_SLOPE * f64::from(p) - T_COST_BITS_INTERCEPT
}

/// `Σ_{s=3}^{n−1}(s−2) = (n−3)(n−2)/2` Toffolis to turn an odd-`k` Fourier
/// state into `γ^(1)`.
pub fn transform_cost(n: u32) -> Result<u64> {
    if n < 4 {
        return Err(invalid(format!("transform cost needs n >= 4, got {n}")));
    }
    let n = u64::from(n);
    Ok((n - 3) * (n - 2) / 2)
}

pub fn transform_cost_direct(n: u32) -> Result<u64> {
    if n < 4 {
        return Err(invalid(format!("transform cost needs n >= 4, got {n}")));
    }
    Ok((3..u64::from(n)).map(|s| s - 2).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub p: u32,
    pub eps_f: f64,
    pub eps_f_approx: f64,
    pub log2_inv_eps_f: f64,
    /// `3.21p − 6.45`.
    pub t_gate_cost: f64,
    /// `C_T` evaluated at this row's `eps_f`.
    pub t_gate_cost_from_eps: f64,
    pub kickback_toffoli_cost: u64,
    pub kickback_ancillas: u64,
}

impl ComparisonRow {
    pub const CSV_HEADER: &'static str = "p,eps_f,eps_f_approx,log2_inv_eps_f,t_gate_cost,t_gate_cost_from_eps,kickback_toffoli_cost,kickback_ancillas";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.p,
            csv_float(self.eps_f),
            csv_float(self.eps_f_approx),
            csv_float(self.log2_inv_eps_f),
            csv_float(self.t_gate_cost),
            csv_float(self.t_gate_cost_from_eps),
            self.kickback_toffoli_cost,
            self.kickback_ancillas
        )
    }
}

pub fn comparison_row(p: u32) -> Result<ComparisonRow> {
    let eps_f = epsilon_f_kickback(p)?;
    let kick = kickback_rotation_cost(p)?;
    Ok(ComparisonRow {
        p,
        eps_f,
        eps_f_approx: epsilon_f_kickback_approx(p)?,
        log2_inv_eps_f: -eps_f.log2(),
        t_gate_cost: t_sequence_cost_bits(p),
        t_gate_cost_from_eps: t_sequence_cost(eps_f)?.t_gates,
        kickback_toffoli_cost: kick.toffolis,
        kickback_ancillas: kick.ancillas,
    })
}

pub fn comparison_table(p_range: impl IntoIterator<Item = u32>) -> Result<Vec<ComparisonRow>> {
    p_range.into_iter().map(comparison_row).collect()
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(ComparisonRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
