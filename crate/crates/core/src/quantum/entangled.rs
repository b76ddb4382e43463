use super::{QuantumState, QubitLabel, C64};
use crate::error::{Error, Result};

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    /// (|00⟩ + |11⟩)/√2
    PhiPlus,
    /// (|00⟩ − |11⟩)/√2
    PhiMinus,
    /// (|01⟩ + |10⟩)/√2
    PsiPlus,
    /// (|01⟩ − |10⟩)/√2
    PsiMinus,
}

pub fn bell_state(kind: BellKind, a: QubitLabel, b: QubitLabel) -> Result<QuantumState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (z, p, m) = (C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0));
    let amps = match kind {
        BellKind::PhiPlus => [p, z, z, p],
        BellKind::PhiMinus => [p, z, z, m],
        BellKind::PsiPlus => [z, p, p, z],
        BellKind::PsiMinus => [z, p, m, z],
    };
    QuantumState::from_pure(vec![a, b], &amps)
}

/// (|0…0⟩ + |1…1⟩)/√2 on three or more qubits.
pub fn ghz_state(labels: Vec<QubitLabel>) -> Result<QuantumState> {
    let n = labels.len();
    if n < 3 {
        return Err(Error::TooFewQubits { needed: 3, got: n });
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = amps[0];
    QuantumState::from_pure(labels, &amps)
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w_state(labels: Vec<QubitLabel>) -> Result<QuantumState> {
    let n = labels.len();
    if n < 3 {
        return Err(Error::TooFewQubits { needed: 3, got: n });
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amps[1 << k] = a;
    }
    QuantumState::from_pure(labels, &amps)
}
