use nalgebra::DMatrix;

use super::{QuantumState, C64};
use crate::error::{Error, Result};

/// Measurement angles (radians, X–Z plane) for the two CHSH settings of
/// each party.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshAngles {
    /// Settings that reach 2√2 on Φ⁺.
    pub fn optimal() -> Self {
        use std::f64::consts::PI;
        Self {
            a: 0.0,
            a_prime: PI / 2.0,
            b: PI / 4.0,
            b_prime: 3.0 * PI / 4.0,
        }
    }
}

/// `cos θ · Z + sin θ · X`
fn observable(theta: f64) -> DMatrix<C64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(-c, 0.0),
        ],
    )
}

fn correlator(rho: &DMatrix<C64>, alpha: f64, beta: f64) -> f64 {
    let joint = observable(alpha).kronecker(&observable(beta));
    (rho * joint).trace().re
}

/// Exact CHSH statistic `E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
pub fn chsh_value(state: &QuantumState, angles: &ChshAngles) -> Result<f64> {
    if state.num_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.num_qubits(),
        });
    }
    let rho = state.matrix();
    let ChshAngles {
        a,
        a_prime,
        b,
        b_prime,
    } = *angles;
    Ok(correlator(rho, a, b) - correlator(rho, a, b_prime)
        + correlator(rho, a_prime, b)
        + correlator(rho, a_prime, b_prime))
}
