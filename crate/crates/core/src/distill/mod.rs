//! The distillation step, protocol schedules and the two protocol engines.

mod engine;
mod schedule;
mod sparse;
mod step;

pub use engine::{run_protocol_exact, run_protocol_sparse, Engine, ProtocolRun, RoundTrace};
pub use schedule::{
    plan_schedule, rounds_required, rounds_simplified, ProtocolSchedule, RoundsRequired,
    ADDER_ANCILLAS, DEFAULT_PAD, DEFAULT_S0,
};
pub use sparse::{sparse_extend, SparseSpectrum, DEFAULT_K_MAX, DEFAULT_SIDEBAND_HALF_WIDTH};
pub use step::{
    distill_amplitudes, distill_pair, extend_register, repeated_symmetric, symmetric_round,
    DistillationOutcome,
};
