//! Noise processes: depolarizing and dephasing channels, Werner-degraded
//! pairs, and per-hop photon loss.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{bell_state, gates, BellKind, KrausChannel, QuantumState, QubitLabel, C64};

/// Upper sanity bound on per-hop attenuation.
pub const MAX_ATTENUATION_DB: f64 = 60.0;

/// Optical attenuation of one hop, in decibels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AttenuationSpec {
    db: f64,
}

impl AttenuationSpec {
    pub fn new(db: f64) -> Result<Self> {
        if !(0.0..=MAX_ATTENUATION_DB).contains(&db) {
            return Err(Error::OutOfRange {
                name: "db",
                value: db,
            });
        }
        Ok(Self { db })
    }

    pub fn db(&self) -> f64 {
        self.db
    }
}

impl<'de> Deserialize<'de> for AttenuationSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let db = f64::deserialize(d)?;
        AttenuationSpec::new(db).map_err(serde::de::Error::custom)
    }
}

/// Memory coherence parameters, in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoherence")]
pub struct CoherenceSpec {
    t2: f64,
    window: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoherence {
    #[serde(default = "default_t2")]
    t2: f64,
    #[serde(default = "default_window")]
    window: f64,
}

fn default_t2() -> f64 {
    CoherenceSpec::DEFAULT_T2
}

fn default_window() -> f64 {
    CoherenceSpec::DEFAULT_WINDOW
}

impl TryFrom<RawCoherence> for CoherenceSpec {
    type Error = Error;
    fn try_from(raw: RawCoherence) -> Result<Self> {
        CoherenceSpec::new(raw.t2, raw.window)
    }
}

impl CoherenceSpec {
    pub const DEFAULT_T2: f64 = 3.0;
    pub const DEFAULT_WINDOW: f64 = 3.0;

    pub fn new(t2: f64, window: f64) -> Result<Self> {
        if !(t2 > 0.0 && t2.is_finite()) {
            return Err(Error::OutOfRange {
                name: "t2",
                value: t2,
            });
        }
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::OutOfRange {
                name: "window",
                value: window,
            });
        }
        Ok(Self { t2, window })
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    /// Off-diagonal decay factor `e^(−elapsed/t2)` after `elapsed` μs.
    pub fn decay(&self, elapsed: f64) -> f64 {
        (-elapsed / self.t2).exp()
    }
}

impl Default for CoherenceSpec {
    fn default() -> Self {
        Self {
            t2: Self::DEFAULT_T2,
            window: Self::DEFAULT_WINDOW,
        }
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name, value: p });
    }
    Ok(())
}

fn scaled(u: &crate::quantum::UnitaryOp, weight: f64) -> DMatrix<C64> {
    u.matrix() * C64::new(weight.sqrt(), 0.0)
}

/// Single-qubit depolarizing channel with Kraus set
/// `{√(1−3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}`.
pub fn depolarizing_channel(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    if p == 0.0 {
        return Ok(KrausChannel::identity(1));
    }
    KrausChannel::new(vec![
        scaled(&gates::identity(1), 1.0 - 0.75 * p),
        scaled(&gates::pauli_x(), p / 4.0),
        scaled(&gates::pauli_y(), p / 4.0),
        scaled(&gates::pauli_z(), p / 4.0),
    ])
}

/// Phase damping that scales single-qubit coherences by `decay`.
pub fn phase_damping_channel(decay: f64) -> Result<KrausChannel> {
    check_probability("decay", decay)?;
    if decay == 1.0 {
        return Ok(KrausChannel::identity(1));
    }
    KrausChannel::new(vec![
        scaled(&gates::identity(1), (1.0 + decay) / 2.0),
        scaled(&gates::pauli_z(), (1.0 - decay) / 2.0),
    ])
}

/// Storage dephasing after `elapsed` μs in a memory described by `coh`.
pub fn dephasing_channel(elapsed: f64, coh: &CoherenceSpec) -> Result<KrausChannel> {
    if elapsed.is_nan() || elapsed < 0.0 {
        return Err(Error::OutOfRange {
            name: "elapsed",
            value: elapsed,
        });
    }
    phase_damping_channel(coh.decay(elapsed))
}

/// `(1−x)|Φ⁺⟩⟨Φ⁺| + x·I/4`.
pub fn werner_pair(x: f64, a: QubitLabel, b: QubitLabel) -> Result<QuantumState> {
    check_probability("x", x)?;
    let phi = bell_state(BellKind::PhiPlus, a.clone(), b.clone())?;
    let mixed = QuantumState::maximally_mixed(vec![a, b])?;
    let matrix = phi.matrix() * C64::new(1.0 - x, 0.0) + mixed.matrix() * C64::new(x, 0.0);
    QuantumState::from_density(phi.register().to_vec(), matrix)
}

/// `10^(−dB/10)`.
pub fn survival_probability(att: &AttenuationSpec) -> f64 {
    10f64.powf(-att.db / 10.0)
}

/// One Bernoulli draw: `true` with probability `p_survive`.
pub fn sample_erasure<R: Rng + ?Sized>(p_survive: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < p_survive
}
