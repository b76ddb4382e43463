use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// End-to-end latency model parameters, in abstract time units.
///
/// The defaults are calibrated so the baseline-vs-proposed reduction comes
/// out at 36.5%; they are not measured values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatencyParams {
    pub hops: u32,
    pub per_hop_delay: f64,
    pub classical_rtt: f64,
    /// Baseline only.
    pub handshake_rounds: u32,
    /// Baseline only.
    pub reconciliation_time: f64,
}

impl Default for LatencyParams {
    fn default() -> Self {
        Self {
            hops: 4,
            per_hop_delay: 1.0,
            classical_rtt: 1.0,
            handshake_rounds: 2,
            reconciliation_time: 0.3,
        }
    }
}

impl LatencyParams {
    pub fn validate(&self) -> Result<()> {
        if self.hops == 0 {
            return Err(Error::Config("latency.hops must be at least 1".into()));
        }
        for (name, v) in [
            ("per_hop_delay", self.per_hop_delay),
            ("classical_rtt", self.classical_rtt),
            ("reconciliation_time", self.reconciliation_time),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyComparison {
    pub proposed: f64,
    pub baseline: f64,
    pub reduction: f64,
}

/// Forwarding-only latency against forwarding plus handshake and
/// reconciliation.
pub fn latency_compare(p: &LatencyParams) -> Result<LatencyComparison> {
    p.validate()?;
    let proposed = f64::from(p.hops) * p.per_hop_delay;
    let baseline =
        proposed + f64::from(p.handshake_rounds) * p.classical_rtt + p.reconciliation_time;
    if baseline == 0.0 {
        return Err(Error::Config("baseline latency is zero".into()));
    }
    Ok(LatencyComparison {
        proposed,
        baseline,
        reduction: 1.0 - proposed / baseline,
    })
}
