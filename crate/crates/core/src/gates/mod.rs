//! Gate-level realization of the distillation circuit on Clifford+Toffoli
//! circuits.

mod adder;
mod circuit;
mod protocol;
mod sim;

pub use adder::{
    build_adder_circuit, build_constant_adder_circuit, modular_add_oracle, ConstantAdder,
    ModularAddOracle,
};
pub use circuit::{Gate, GateCircuit, GateCounts, RegisterLayout};
pub use protocol::{
    build_distillation_circuit, clone_fourier_state, initial_state_circuit, simulate_distillation,
    CloneResult, GateDistillation,
};
pub use sim::{
    apply_circuit, extract_register, permute_basis, reduced_fidelity, CircuitRun, MeasureMode,
};
