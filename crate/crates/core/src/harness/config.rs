use std::path::Path;

use serde::{Deserialize, Serialize};

use super::calibrate::{calibrate_blend, ANCHOR_DEGRADATION, ANCHOR_FIDELITY};
use super::latency::LatencyParams;
use crate::error::{Error, Result};
use crate::network::{Node, Role, Topology};
use crate::noise::{self, AttenuationSpec, CoherenceSpec};
use crate::protocol::MessageKind;

/// Blend factor between heralded loss and undetected Werner degradation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlendBeta {
    /// Calibrated from the default fidelity anchor.
    Auto,
    Fixed(f64),
}

impl Serialize for BlendBeta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BlendBeta::Auto => s.serialize_str("auto"),
            BlendBeta::Fixed(b) => s.serialize_f64(*b),
        }
    }
}

impl<'de> Deserialize<'de> for BlendBeta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(b) => Ok(BlendBeta::Fixed(b)),
            Raw::Text(s) if s == "auto" => Ok(BlendBeta::Auto),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "blend_beta must be a number or \"auto\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: String,
    pub role: Role,
}

/// File form of a topology: nodes, the message path and per-hop dB.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    pub nodes: Vec<NodeSpec>,
    pub message_path: Vec<String>,
    pub hop_db: Vec<f64>,
}

impl TopologySpec {
    pub fn build(&self, coh: CoherenceSpec) -> Result<Topology> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node::new(n.id.clone(), n.role, coh))
            .collect();
        let hops = self
            .hop_db
            .iter()
            .map(|db| AttenuationSpec::new(*db))
            .collect::<Result<Vec<_>>>()?;
        Topology::new(nodes, self.message_path.clone(), hops)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    topology: Option<TopologySpec>,
    trials: Option<usize>,
    seed: Option<u64>,
    degradation_sweep: Option<Vec<f64>>,
    herald_loss: Option<f64>,
    hop_depolarizing: Option<f64>,
    blend_beta: Option<BlendBeta>,
    message_kind: Option<MessageKind>,
    coherence: Option<CoherenceSpec>,
    bob_delay: Option<f64>,
    latency: Option<LatencyParams>,
}

/// Full experiment definition.
///
/// `coherence` is the memory model for stored key qubits; topologies built
/// from a config carry the same value on every node.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub topology: Topology,
    pub trials: usize,
    pub seed: u64,
    pub degradation_sweep: Vec<f64>,
    pub herald_loss: f64,
    /// Depolarizing strength applied to the message qubit at every hop.
    pub hop_depolarizing: f64,
    pub blend_beta: BlendBeta,
    pub message_kind: MessageKind,
    pub coherence: CoherenceSpec,
    /// Storage time of Bob's key qubits before decoding, in μs.
    pub bob_delay: f64,
    pub latency: LatencyParams,
}

pub const DEFAULT_TRIALS: usize = 10_000;

/// 0.00, 0.05, …, 0.40.
pub fn default_sweep() -> Vec<f64> {
    (0..=8).map(|i| f64::from(i) * 0.05).collect()
}

impl ExperimentConfig {
    /// Default experiment on the five-node, 10 dB-per-hop network.
    pub fn new(seed: u64) -> Self {
        Self {
            topology: crate::network::default_topology(),
            trials: DEFAULT_TRIALS,
            seed,
            degradation_sweep: default_sweep(),
            herald_loss: 0.0,
            hop_depolarizing: 0.0,
            blend_beta: BlendBeta::Auto,
            message_kind: MessageKind::HaarRandom,
            coherence: CoherenceSpec::default(),
            bob_delay: 0.0,
            latency: LatencyParams::default(),
        }
    }

    /// Parses a JSON config. `seed_override` takes precedence over the
    /// file's `seed`; one of the two must be present.
    pub fn from_json(text: &str, seed_override: Option<u64>) -> Result<Self> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let seed = seed_override
            .or(file.seed)
            .ok_or_else(|| Error::Config("no seed given (set `seed` or pass --seed)".into()))?;
        let mut cfg = Self::new(seed);
        if let Some(c) = file.coherence {
            cfg.coherence = c;
        }
        cfg.topology = match file.topology {
            Some(spec) => spec.build(cfg.coherence)?,
            None => Topology::five_node(10.0, cfg.coherence)?,
        };
        if let Some(v) = file.trials {
            cfg.trials = v;
        }
        if let Some(v) = file.degradation_sweep {
            cfg.degradation_sweep = v;
        }
        if let Some(v) = file.herald_loss {
            cfg.herald_loss = v;
        }
        if let Some(v) = file.hop_depolarizing {
            cfg.hop_depolarizing = v;
        }
        if let Some(v) = file.blend_beta {
            cfg.blend_beta = v;
        }
        if let Some(v) = file.message_kind {
            cfg.message_kind = v;
        }
        if let Some(v) = file.bob_delay {
            cfg.bob_delay = v;
        }
        if let Some(v) = file.latency {
            cfg.latency = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path, seed_override: Option<u64>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, seed_override)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.trials > u32::MAX as usize {
            return Err(Error::Config(format!(
                "trials must be in 1..=2^32-1, got {}",
                self.trials
            )));
        }
        if self.degradation_sweep.is_empty() {
            return Err(Error::Config("degradation_sweep is empty".into()));
        }
        if self.degradation_sweep.len() >= 1 << 23 {
            return Err(Error::Config("degradation_sweep is too long".into()));
        }
        for x in &self.degradation_sweep {
            if !(0.0..=1.0).contains(x) {
                return Err(Error::OutOfRange {
                    name: "degradation_sweep",
                    value: *x,
                });
            }
        }
        if self.degradation_sweep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "degradation_sweep must be strictly ascending".into(),
            ));
        }
        for (name, v) in [
            ("herald_loss", self.herald_loss),
            ("hop_depolarizing", self.hop_depolarizing),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        if !(self.bob_delay >= 0.0 && self.bob_delay.is_finite()) {
            return Err(Error::OutOfRange {
                name: "bob_delay",
                value: self.bob_delay,
            });
        }
        if let BlendBeta::Fixed(b) = self.blend_beta {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::OutOfRange {
                    name: "blend_beta",
                    value: b,
                });
            }
        }
        if let MessageKind::FixedBasis(bit) = self.message_kind {
            if bit > 1 {
                return Err(Error::OutOfRange {
                    name: "message bit",
                    value: f64::from(bit),
                });
            }
        }
        self.latency.validate()
    }

    /// Resolved blend factor.
    pub fn beta(&self) -> Result<f64> {
        match self.blend_beta {
            BlendBeta::Auto => calibrate_blend(ANCHOR_DEGRADATION, ANCHOR_FIDELITY),
            BlendBeta::Fixed(b) => Ok(b),
        }
    }

    /// Loss probability of each hop on the message path.
    pub fn photon_loss_per_hop(&self) -> Vec<f64> {
        self.topology
            .hop_attenuations()
            .iter()
            .map(|h| 1.0 - noise::survival_probability(h))
            .collect()
    }

    /// Replaces every hop's attenuation with `db`, keeping the path.
    pub fn with_uniform_hop_db(mut self, db: f64) -> Result<Self> {
        let hops = vec![AttenuationSpec::new(db)?; self.topology.hop_count()];
        self.topology = Topology::new(
            self.topology.nodes().to_vec(),
            self.topology.message_path().to_vec(),
            hops,
        )?;
        Ok(self)
    }
}
