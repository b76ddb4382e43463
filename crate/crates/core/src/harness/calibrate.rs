use crate::error::{Error, Result};

/// Degradation at which the published fidelity anchor was reported.
pub const ANCHOR_DEGRADATION: f64 = 0.25;
/// Fidelity reported at [`ANCHOR_DEGRADATION`].
pub const ANCHOR_FIDELITY: f64 = 0.972;

/// Mean fidelity over Haar-random messages when both key pairs are Werner
/// states with parameter `x_eff`.
///
/// Each key pair disagrees in the Z basis with probability `x_eff/2`, so the
/// residual mask is an X (resp. Z) flip with that probability; a
/// non-identity Pauli has Haar-average fidelity 1/3.
pub fn haar_mean_fidelity(x_eff: f64) -> f64 {
    let p_identity = (1.0 - x_eff / 2.0).powi(2);
    (1.0 + 2.0 * p_identity) / 3.0
}

/// Blend factor `β` such that `haar_mean_fidelity(β · anchor_x)` equals
/// `anchor_fidelity`.
pub fn calibrate_blend(anchor_x: f64, anchor_fidelity: f64) -> Result<f64> {
    if !(anchor_x > 0.0 && anchor_x <= 1.0) {
        return Err(Error::OutOfRange {
            name: "anchor_x",
            value: anchor_x,
        });
    }
    if !(anchor_fidelity > 1.0 / 3.0 && anchor_fidelity <= 1.0) {
        return Err(Error::OutOfRange {
            name: "anchor_fidelity",
            value: anchor_fidelity,
        });
    }
    let p_identity = (3.0 * anchor_fidelity - 1.0) / 2.0;
    let x_eff = 2.0 * (1.0 - p_identity.sqrt());
    let beta = x_eff / anchor_x;
    if beta > 1.0 {
        // the anchor would need more degradation than the Werner family allows
        return Err(Error::OutOfRange {
            name: "blend_beta",
            value: beta,
        });
    }
    Ok(beta)
}
