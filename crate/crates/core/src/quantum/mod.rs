//! Dense mixed-state simulation over labeled qubit registers.
//!
//! Qubit position follows insertion order in the register, and position 0 is
//! the most significant bit of a basis index (so `|01⟩` has index 1).

mod chsh;
mod entangled;
mod operator;
mod state;

pub use chsh::{chsh_value, ChshAngles};
pub use entangled::{bell_state, ghz_state, w_state, BellKind};
pub use operator::{gates, KrausChannel, UnitaryOp};
pub use state::{labels, Measurement, QuantumState, QubitLabel};

pub use num_complex::Complex64 as C64;

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 8;

/// Tolerance for structural invariants (Hermiticity, trace, positivity,
/// unitarity, trace preservation).
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Purity threshold for references passed to [`QuantumState::fidelity`].
pub const PURITY_TOL: f64 = 1e-9;
