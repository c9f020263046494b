//! Exact state-vector algebra for two qubits.

mod gate;
mod state;

pub use gate::{
    dispersive_phase, dispersive_phase_correction, dispersive_two_qubit_gate, hadamard_like,
    iswap, phase_aligned_deviation, rx, ry, rz, ComplexScalar, SingleQubitGate, TwoQubitGate,
    EXACT_TOL,
};
pub use state::{Expectations, LogicState, Qubit, TwoQubitState};
