//! Command implementations behind the `fourier-distill` binary.
//!
//! Every command is a pure function of its [`RunConfig`] and returns the
//! report text; the binary only handles output and exit codes.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::arbitrary_k::{default_truncate_bits, distill_k, prepare_approx_k};
use crate::distill::{
    distill_amplitudes, plan_schedule, run_protocol_exact, run_protocol_sparse, DEFAULT_K_MAX,
    DEFAULT_PAD, DEFAULT_S0, DEFAULT_SIDEBAND_HALF_WIDTH,
};
use crate::error::{invalid, Error, Result};
use crate::fourier::{
    approx_initial_state, fidelity, initial_spectrum_weight, pure_fourier_state,
    series_coefficient, to_fourier_basis, RegisterSize, StateVector,
};
use crate::gates::{
    build_adder_circuit, clone_fourier_state, modular_add_oracle, permute_basis,
    simulate_distillation,
};
use crate::numfmt::{csv_float, round_sig};
use crate::resources::{
    comparison_csv, comparison_table, resources_csv, toffoli_capped, EXACT_ENGINE_MAX_N,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

/// Largest register width accepted by `simulate`.
pub const SIMULATE_MAX_N: u32 = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    /// Dense engine up to 16 qubits, sparse above.
    #[default]
    Auto,
    Exact,
    Sparse,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum CloneSource {
    /// Exact `|γ^(k)⟩`.
    #[default]
    Pure,
    /// The Clifford-only approximation (requires k = 1).
    Clifford,
    /// Truncated-QVR preparation.
    Qvr,
}

#[derive(Debug, Parser)]
#[command(
    name = "fourier-distill",
    version,
    about = "Fourier-state distillation: simulation and resource accounting"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Exit with status 4 when a numerical-precision warning is raised.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Series and sampled spectrum of the Clifford-only initial state.
    Spectrum(SpectrumArgs),
    /// Run the distillation tree and emit the per-round trace.
    Distill(DistillArgs),
    /// Gate-level simulation of one distillation step.
    Simulate(SimulateArgs),
    /// Toffoli counts and expected cost over a range of target widths.
    Resources(ResourcesArgs),
    /// Phase kickback versus T-gate sequences over a precision range.
    Compare(CompareArgs),
    /// Prepare and distill an arbitrary Fourier index.
    #[command(name = "arbitrary-k")]
    ArbitraryK(ArbitraryKArgs),
    /// Clone a Fourier state with one adder.
    Clone(CloneArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = -15, allow_negative_numbers = true)]
    pub j_min: i64,
    #[arg(long, default_value_t = 15, allow_negative_numbers = true)]
    pub j_max: i64,
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t)]
    pub engine: EngineChoice,
    #[arg(long, default_value_t = DEFAULT_S0)]
    pub s0: u32,
    #[arg(long, default_value_t = DEFAULT_PAD)]
    pub pad: u32,
    /// Harmonics kept per round by the sparse engine.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
    /// Sidebands kept on each side of a carrier when the sparse engine
    /// extends a register.
    #[arg(long, default_value_t = DEFAULT_SIDEBAND_HALF_WIDTH)]
    pub half_width: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct ResourcesArgs {
    /// Single target width; overrides the range.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 5)]
    pub n_min: u32,
    #[arg(long, default_value_t = 30)]
    pub n_max: u32,
    #[arg(long, default_value_t = DEFAULT_S0)]
    pub s0: u32,
    #[arg(long, default_value_t = DEFAULT_PAD)]
    pub pad: u32,
    /// Monte Carlo trials per width; 0 skips sampling.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    /// Required whenever `--trials` is positive.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 6)]
    pub p_min: u32,
    #[arg(long, default_value_t = 20)]
    pub p_max: u32,
}

#[derive(Debug, Args)]
pub struct ArbitraryKArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u128,
    #[arg(long, default_value_t = 3)]
    pub rounds: u32,
    /// Defaults to ⌈log₂ n⌉ + 2.
    #[arg(long)]
    pub truncate_bits: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CloneArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u128,
    #[arg(long, value_enum, default_value_t)]
    pub source: CloneSource,
    /// Used with `--source qvr`; defaults to ⌈log₂ n⌉ + 2.
    #[arg(long)]
    pub truncate_bits: Option<u32>,
}

/// A rendered report.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub text: String,
    pub precision_warning: bool,
    pub warnings: Vec<String>,
}

impl Report {
    fn plain(text: String) -> Self {
        Self {
            text,
            precision_warning: false,
            warnings: Vec::new(),
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv_table(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match &cfg.command {
        Command::Spectrum(a) => cmd_spectrum(a, cfg.format),
        Command::Distill(a) => cmd_distill(a, cfg.format),
        Command::Simulate(a) => cmd_simulate(a, cfg.format),
        Command::Resources(a) => cmd_resources(a, cfg.format),
        Command::Compare(a) => cmd_compare(a, cfg.format),
        Command::ArbitraryK(a) => cmd_arbitrary_k(a, cfg.format),
        Command::Clone(a) => cmd_clone(a, cfg.format),
    }
}

pub fn cmd_spectrum(a: &SpectrumArgs, format: Format) -> Result<Report> {
    let n = RegisterSize::new(a.n)?;
    if a.n < 2 {
        return Err(invalid("the initial state needs at least 2 qubits"));
    }
    let rows: Vec<(i64, f64, f64)> = if a.j_min > a.j_max {
        Vec::new()
    } else {
        (a.j_min..=a.j_max)
            .map(|j| {
                let j = i128::from(j);
                (
                    j as i64,
                    series_coefficient(j).norm_sqr(),
                    initial_spectrum_weight(n, j),
                )
            })
            .collect()
    };
    let text = match format {
        Format::Csv => csv_table(
            "j,series_weight,sampled_weight",
            &rows
                .iter()
                .map(|&(j, c, w)| vec![j.to_string(), csv_float(c), csv_float(w)])
                .collect::<Vec<_>>(),
        ),
        Format::Json => json_text(&json!({
            "schema": "fourier-distill/spectrum/v1",
            "n": a.n,
            "rows": rows
                .iter()
                .map(|&(j, c, w)| json!({"j": j, "series_weight": round_sig(c), "sampled_weight": round_sig(w)}))
                .collect::<Vec<_>>(),
        })),
    };
    Ok(Report::plain(text))
}

pub fn cmd_distill(a: &DistillArgs, format: Format) -> Result<Report> {
    let n = RegisterSize::new(a.n)?;
    let schedule = plan_schedule(n, a.s0, a.pad)?;
    let exact = match a.engine {
        EngineChoice::Exact => true,
        EngineChoice::Sparse => false,
        EngineChoice::Auto => a.n <= EXACT_ENGINE_MAX_N,
    };
    let run = if exact {
        run_protocol_exact(n, &schedule)?
    } else {
        run_protocol_sparse(n, &schedule, a.k_max, a.half_width)?
    };
    let text = match format {
        Format::Csv => run.to_csv(),
        Format::Json => json_text(&run.to_json()),
    };
    Ok(Report {
        text,
        precision_warning: run.precision_warning,
        warnings: run.warnings.clone(),
    })
}

pub fn cmd_simulate(a: &SimulateArgs, format: Format) -> Result<Report> {
    if !(3..=SIMULATE_MAX_N).contains(&a.n) {
        return Err(invalid(format!(
            "simulate supports 3 <= n <= {SIMULATE_MAX_N}, got {}",
            a.n
        )));
    }
    let n = RegisterSize::new(a.n)?;
    let width = a.n as usize;
    crate::fourier::check_capacity(2 * width + 1)?;

    let approx = approx_initial_state(n)?;
    let gate = simulate_distillation(width, &approx, &approx)?;
    let fa = to_fourier_basis(&approx);
    let (p_spectral, out_spectral) = distill_amplitudes(&fa, &fa)?;
    let out_gate = to_fourier_basis(&gate.output).spectrum();
    let max_weight_diff = out_gate
        .weights()
        .iter()
        .zip(out_spectral.spectrum().weights())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let fid = fidelity(&gate.output, n, 1)?;

    let pure = pure_fourier_state(n, 1)?;
    let pure_run = simulate_distillation(width, &pure, &pure)?;
    let pure_fid = fidelity(&pure_run.output, n, 1)?;

    let adder_ok = exhaustive_adder_check(width)?;

    let text = match format {
        Format::Csv => csv_table(
            "n,p_success,p_success_spectral,max_weight_diff,fidelity,pure_p_success,pure_fidelity,toffolis,simulator_qubits,adder_exhaustive_ok",
            &[vec![
                a.n.to_string(),
                csv_float(gate.p_success),
                csv_float(p_spectral),
                csv_float(max_weight_diff),
                csv_float(fid),
                csv_float(pure_run.p_success),
                csv_float(pure_fid),
                gate.toffolis.to_string(),
                gate.simulator_qubits.to_string(),
                adder_ok.to_string(),
            ]],
        ),
        Format::Json => json_text(&json!({
            "schema": "fourier-distill/simulate/v1",
            "n": a.n,
            "p_success": round_sig(gate.p_success),
            "p_success_spectral": round_sig(p_spectral),
            "max_weight_diff": round_sig(max_weight_diff),
            "fidelity": round_sig(fid),
            "pure_input": {"p_success": round_sig(pure_run.p_success), "fidelity": round_sig(pure_fid)},
            "toffolis": gate.toffolis,
            "register_width": 2 * width,
            "simulator_qubits": gate.simulator_qubits,
            "adder_exhaustive_ok": adder_ok,
        })),
    };
    Ok(Report::plain(text))
}

/// Compares the decomposed adder against the permutation oracle on every
/// basis input with clean ancillas.
fn exhaustive_adder_check(n: usize) -> Result<bool> {
    let (c, layout) = build_adder_circuit(n)?;
    let oracle = modular_add_oracle(n as u32)?;
    let anc = layout.ancilla.len();
    for v in 0..1u128 << n {
        for w in 0..1u128 << n {
            let (v2, w2) = oracle.apply(v, w);
            if permute_basis(&c, (v << n | w) << anc)? != (v2 << n | w2) << anc {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn cmd_resources(a: &ResourcesArgs, format: Format) -> Result<Report> {
    let (lo, hi) = match a.n {
        Some(n) => (n, n),
        None => (a.n_min, a.n_max),
    };
    let seed = match (a.trials, a.seed) {
        (0, s) => s.unwrap_or(0),
        (_, Some(s)) => s,
        (_, None) => return Err(invalid("--seed is required when --trials is positive")),
    };
    let reports = if lo > hi {
        Vec::new()
    } else {
        (lo..=hi)
            .map(|n| toffoli_capped(n, a.s0, a.pad, a.trials, seed))
            .collect::<Result<Vec<_>>>()?
    };
    let text = match format {
        Format::Csv => resources_csv(&reports),
        Format::Json => json_text(&json!({
            "schema": "fourier-distill/resources/v1",
            "s0": a.s0,
            "pad": a.pad,
            "trials": a.trials,
            "seed": a.seed,
            "rows": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        })),
    };
    Ok(Report::plain(text))
}

pub fn cmd_compare(a: &CompareArgs, format: Format) -> Result<Report> {
    let rows = if a.p_min > a.p_max {
        Vec::new()
    } else {
        comparison_table(a.p_min..=a.p_max)?
    };
    let text = match format {
        Format::Csv => comparison_csv(&rows),
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "p": r.p,
                        "eps_f": round_sig(r.eps_f),
                        "eps_f_approx": round_sig(r.eps_f_approx),
                        "log2_inv_eps_f": round_sig(r.log2_inv_eps_f),
                        "t_gate_cost": round_sig(r.t_gate_cost),
                        "t_gate_cost_from_eps": round_sig(r.t_gate_cost_from_eps),
                        "kickback_toffoli_cost": r.kickback_toffoli_cost,
                        "kickback_ancillas": r.kickback_ancillas,
                    })
                })
                .collect();
            json_text(&json!({"schema": "fourier-distill/compare/v1", "rows": rows}))
        }
    };
    Ok(Report::plain(text))
}

pub fn cmd_arbitrary_k(a: &ArbitraryKArgs, format: Format) -> Result<Report> {
    let n = RegisterSize::new(a.n)?;
    n.dense_dim()?;
    let t = a
        .truncate_bits
        .unwrap_or_else(|| default_truncate_bits(a.n));
    let d = distill_k(n, a.k, a.rounds, t)?;
    let text = match format {
        Format::Csv => d.to_csv(),
        Format::Json => json_text(&d.to_json()),
    };
    Ok(Report {
        text,
        precision_warning: false,
        warnings: d.warnings.clone(),
    })
}

pub fn cmd_clone(a: &CloneArgs, format: Format) -> Result<Report> {
    let n = RegisterSize::new(a.n)?;
    let width = a.n as usize;
    crate::fourier::check_capacity(2 * width + 1)?;
    if a.k >= n.dim() {
        return Err(invalid(format!(
            "k = {} out of range for {} qubits",
            a.k, a.n
        )));
    }
    let reference = pure_fourier_state(n, a.k)?;
    let source: StateVector = match a.source {
        CloneSource::Pure => reference.clone(),
        CloneSource::Clifford => {
            if a.k != 1 {
                return Err(invalid("the Clifford-only source approximates k = 1 only"));
            }
            approx_initial_state(n)?
        }
        CloneSource::Qvr => {
            let t = a
                .truncate_bits
                .unwrap_or_else(|| default_truncate_bits(a.n));
            prepare_approx_k(n, a.k, t)?
        }
    };
    let input_fidelity = fidelity(&source, n, a.k)?;
    let r = clone_fourier_state(width, &source, &reference)?;
    let fields: BTreeMap<&str, f64> = BTreeMap::from([
        ("input_fidelity", input_fidelity),
        ("fidelity_first", r.fidelity_first),
        ("fidelity_second", r.fidelity_second),
        ("joint_overlap", r.joint_overlap),
    ]);
    let text = match format {
        Format::Csv => csv_table(
            "n,k,input_fidelity,fidelity_first,fidelity_second,joint_overlap,toffolis",
            &[vec![
                a.n.to_string(),
                a.k.to_string(),
                csv_float(fields["input_fidelity"]),
                csv_float(fields["fidelity_first"]),
                csv_float(fields["fidelity_second"]),
                csv_float(fields["joint_overlap"]),
                r.toffolis.to_string(),
            ]],
        ),
        Format::Json => {
            let mut v = json!({
                "schema": "fourier-distill/clone/v1",
                "n": a.n,
                "k": a.k.to_string(),
                "toffolis": r.toffolis,
            });
            for (key, val) in &fields {
                v[*key] = round_sig(*val).into();
            }
            json_text(&v)
        }
    };
    Ok(Report::plain(text))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("fourier-distill").chain(args.iter().copied()))
            .unwrap()
    }

    #[test]
    fn spectrum_rows() {
        let r = run(&parse(&["spectrum", "--n", "8", "--format", "csv"])).unwrap();
        let lines: Vec<&str> = r.text.lines().collect();
        assert_eq!(lines[0], "j,series_weight,sampled_weight");
        assert_eq!(lines.len(), 32);
        let nonzero: Vec<i64> = lines[1..]
            .iter()
            .filter(|l| !l.contains(",0e0,"))
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(nonzero, [-15, -11, -7, -3, 1, 5, 9, 13]);
        assert!(lines.contains(&"1,8.10569469139e-1,8.10610160468e-1"));
        let empty = run(&parse(&[
            "spectrum", "--n", "8", "--j-min", "3", "--j-max", "2", "--format", "csv",
        ]))
        .unwrap();
        assert_eq!(empty.text, "j,series_weight,sampled_weight\n");
    }

    #[test]
    fn distill_reports() {
        let r = run(&parse(&["distill", "--n", "10", "--engine", "exact"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.text).unwrap();
        assert_eq!(v["meets_threshold"], true);
        assert_eq!(v["rounds"].as_array().unwrap().len(), 3);
        let small = run(&parse(&["distill", "--n", "4"])).unwrap();
        assert!(small.warnings.iter().any(|w| w.contains("single round")));
        let big = run(&parse(&["distill", "--n", "100", "--format", "csv"])).unwrap();
        assert_eq!(big.text.lines().count(), 7);
        assert!(!big.precision_warning);
    }

    #[test]
    fn capacity_is_reported() {
        let e = run(&parse(&["distill", "--n", "40", "--engine", "exact"])).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CAPACITY);
        let e = run(&parse(&["simulate", "--n", "9"])).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_VALIDATION);
    }

    #[test]
    fn resources_need_seed() {
        let e = run(&parse(&["resources", "--n", "10", "--trials", "10"])).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_VALIDATION);
        let r = run(&parse(&["resources", "--n", "10", "--format", "csv"])).unwrap();
        assert_eq!(
            r.text,
            format!(
                "{}\n10,76,,,3,25\n",
                crate::resources::ResourceReport::CSV_HEADER
            )
        );
    }

    #[test]
    fn simulate_small() {
        let r = run(&parse(&["simulate", "--n", "3"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.text).unwrap();
        assert_eq!(v["adder_exhaustive_ok"], true);
        assert_eq!(v["pure_input"]["p_success"], 1.0);
    }

    #[test]
    fn clone_sources() {
        let r = run(&parse(&["clone", "--n", "4", "--k", "3"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.text).unwrap();
        assert!(v["joint_overlap"].as_f64().unwrap() > 1.0 - 1e-9);
        assert!(run(&parse(&[
            "clone", "--n", "4", "--k", "3", "--source", "clifford"
        ]))
        .is_err());
        assert!(run(&parse(&[
            "clone", "--n", "5", "--k", "1", "--source", "clifford"
        ]))
        .is_ok());
    }
}
