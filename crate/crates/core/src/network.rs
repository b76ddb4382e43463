//! Network layer: nodes, the relay message path, and the lifecycle of
//! pre-shared entangled pairs (distribution, storage dephasing,
//! coherence-window expiry, single-use consumption).

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{self, AttenuationSpec, CoherenceSpec};
use crate::quantum::{QuantumState, QubitLabel};

/// Attempts allowed per required link before distribution is abandoned.
pub const DEFAULT_MAX_ATTEMPTS_PER_LINK: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Sender,
    Receiver,
    Relay,
    Adversary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub role: Role,
    pub held_qubits: BTreeSet<QubitLabel>,
    pub memory_coh: CoherenceSpec,
}

impl Node {
    pub fn new(id: impl Into<String>, role: Role, memory_coh: CoherenceSpec) -> Self {
        Self {
            id: id.into(),
            role,
            held_qubits: BTreeSet::new(),
            memory_coh,
        }
    }
}

/// Nodes plus the ordered message path and its per-hop attenuation.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: Vec<Node>,
    message_path: Vec<String>,
    hop_attenuations: Vec<AttenuationSpec>,
}

impl Topology {
    pub fn new(
        nodes: Vec<Node>,
        message_path: Vec<String>,
        hop_attenuations: Vec<AttenuationSpec>,
    ) -> Result<Self> {
        let mut ids = HashSet::new();
        for n in &nodes {
            if n.id.is_empty() {
                return Err(Error::Topology("empty node id".into()));
            }
            if !ids.insert(n.id.as_str()) {
                return Err(Error::Topology(format!("duplicate node id `{}`", n.id)));
            }
            if n.role == Role::Relay && !n.held_qubits.is_empty() {
                return Err(Error::Topology(format!(
                    "relay `{}` holds key qubits",
                    n.id
                )));
            }
        }
        if message_path.len() < 2 {
            return Err(Error::Topology(
                "message path needs a sender and a receiver".into(),
            ));
        }
        let topo = Self {
            nodes,
            message_path,
            hop_attenuations,
        };
        let last = topo.message_path.len() - 1;
        for (i, id) in topo.message_path.iter().enumerate() {
            let node = topo.node(id)?;
            let expected = match i {
                0 => Role::Sender,
                i if i == last => Role::Receiver,
                _ => Role::Relay,
            };
            if node.role != expected {
                return Err(Error::Topology(format!(
                    "path position {i} (`{id}`) must be a {expected:?}, found {:?}",
                    node.role
                )));
            }
        }
        if topo.hop_attenuations.len() != last {
            return Err(Error::Topology(format!(
                "{} hops need {} attenuation entries, got {}",
                last,
                last,
                topo.hop_attenuations.len()
            )));
        }
        Ok(topo)
    }

    /// alice → r1 → r2 → r3 → bob at `hop_db` per hop.
    pub fn five_node(hop_db: f64, coh: CoherenceSpec) -> Result<Self> {
        let nodes = vec![
            Node::new("alice", Role::Sender, coh),
            Node::new("r1", Role::Relay, coh),
            Node::new("r2", Role::Relay, coh),
            Node::new("r3", Role::Relay, coh),
            Node::new("bob", Role::Receiver, coh),
        ];
        let path = nodes.iter().map(|n| n.id.clone()).collect();
        let hop = AttenuationSpec::new(hop_db)?;
        Self::new(nodes, path, vec![hop; 4])
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn message_path(&self) -> &[String] {
        &self.message_path
    }

    pub fn hop_attenuations(&self) -> &[AttenuationSpec] {
        &self.hop_attenuations
    }

    pub fn hop_count(&self) -> usize {
        self.hop_attenuations.len()
    }

    pub fn node(&self, id: &str) -> Result<&Node> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or_else(|| Error::Topology(format!("unknown node `{id}`")))
    }

    pub fn sender(&self) -> &Node {
        self.node(&self.message_path[0]).expect("validated path")
    }

    pub fn receiver(&self) -> &Node {
        self.node(self.message_path.last().expect("validated path"))
            .expect("validated path")
    }

    pub fn relays(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.role == Role::Relay)
    }

    /// Product of the per-hop survival probabilities.
    pub fn end_to_end_survival(&self) -> f64 {
        self.hop_attenuations
            .iter()
            .map(noise::survival_probability)
            .product()
    }
}

/// Five-node reference network with 10 dB hops.
pub fn default_topology() -> Topology {
    Topology::five_node(10.0, CoherenceSpec::default()).expect("default topology is valid")
}

/// One pre-shared pair between a sender and a receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementLink {
    id: u64,
    endpoints: (String, String),
    degradation: f64,
    state: QuantumState,
    created_at: f64,
    consumed: bool,
    aged_until: f64,
    decay: f64,
}

impl EntanglementLink {
    /// A fresh Werner pair with effective degradation `degradation`.
    pub fn new(
        id: u64,
        sender: &str,
        receiver: &str,
        degradation: f64,
        created_at: f64,
    ) -> Result<Self> {
        if sender == receiver {
            return Err(Error::Topology(format!(
                "link endpoints must differ (`{sender}`)"
            )));
        }
        let a = QubitLabel::new(format!("{sender}.A{id}"))?;
        let b = QubitLabel::new(format!("{receiver}.B{id}"))?;
        Ok(Self {
            id,
            endpoints: (sender.to_string(), receiver.to_string()),
            degradation,
            state: noise::werner_pair(degradation, a, b)?,
            created_at,
            consumed: false,
            aged_until: created_at,
            decay: 1.0,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn endpoints(&self) -> (&str, &str) {
        (&self.endpoints.0, &self.endpoints.1)
    }

    pub fn degradation(&self) -> f64 {
        self.degradation
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn created_at(&self) -> f64 {
        self.created_at
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Qubit held by the sender.
    pub fn sender_qubit(&self) -> &QubitLabel {
        &self.state.register()[0]
    }

    /// Qubit held by the receiver.
    pub fn receiver_qubit(&self) -> &QubitLabel {
        &self.state.register()[1]
    }

    /// Accumulated per-qubit coherence decay factor from storage.
    pub fn storage_decay(&self) -> f64 {
        self.decay
    }

    fn age_at(&self, now: f64) -> Result<f64> {
        if now < self.created_at {
            return Err(Error::ClockRegression {
                now,
                created_at: self.created_at,
            });
        }
        Ok(now - self.created_at)
    }

    /// Inclusive window check: `now − created_at ≤ window`.
    pub fn coherence_ok(&self, now: f64, coh: &CoherenceSpec) -> Result<bool> {
        Ok(self.age_at(now)? <= coh.window())
    }

    /// Dephases both qubits for the storage time since the last call (or
    /// since creation). Repeated calls compose to the total elapsed time.
    pub fn age(&mut self, now: f64, coh: &CoherenceSpec) -> Result<()> {
        self.age_at(now)?;
        if now <= self.aged_until {
            return Ok(());
        }
        let elapsed = now - self.aged_until;
        let ch = noise::dephasing_channel(elapsed, coh)?;
        let (a, b) = (self.sender_qubit().clone(), self.receiver_qubit().clone());
        self.state = self
            .state
            .apply_channel(&ch, &[a])?
            .apply_channel(&ch, &[b])?;
        self.decay *= coh.decay(elapsed);
        self.aged_until = now;
        Ok(())
    }

    /// Marks the link used and scrubs its memory to `I/4`. A second call is
    /// a replay attempt.
    pub fn consume(&mut self) -> Result<()> {
        if self.consumed {
            return Err(Error::Replay(self.id));
        }
        self.state = QuantumState::maximally_mixed(self.state.register().to_vec())?;
        self.consumed = true;
        Ok(())
    }
}

/// Parameters for one out-of-band distribution run.
#[derive(Debug, Clone)]
pub struct PairRequest<'a> {
    pub sender: &'a str,
    pub receiver: &'a str,
    pub count: usize,
    /// Effective Werner parameter of each heralded pair (already scaled by
    /// the blend factor).
    pub degradation: f64,
    /// Probability that an attempt is lost and detected as lost.
    pub herald_loss: f64,
    pub now: f64,
    pub first_id: u64,
    pub max_attempts_per_link: u64,
}

impl<'a> PairRequest<'a> {
    pub fn new(sender: &'a str, receiver: &'a str, count: usize) -> Self {
        Self {
            sender,
            receiver,
            count,
            degradation: 0.0,
            herald_loss: 0.0,
            now: 0.0,
            first_id: 0,
            max_attempts_per_link: DEFAULT_MAX_ATTEMPTS_PER_LINK,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Distribution {
    pub links: Vec<EntanglementLink>,
    pub attempts: u64,
}

/// Heralded distribution: attempts repeat until `count` pairs survive.
pub fn distribute_pairs<R: Rng + ?Sized>(
    topo: &Topology,
    req: &PairRequest<'_>,
    rng: &mut R,
) -> Result<Distribution> {
    let sender = topo.node(req.sender)?;
    let receiver = topo.node(req.receiver)?;
    if sender.role != Role::Sender {
        return Err(Error::Topology(format!("`{}` is not a sender", sender.id)));
    }
    if receiver.role != Role::Receiver {
        return Err(Error::Topology(format!(
            "`{}` is not a receiver",
            receiver.id
        )));
    }
    if req.count == 0 {
        return Err(Error::Config("pair count must be at least 1".into()));
    }
    for (name, v) in [
        ("degradation", req.degradation),
        ("herald_loss", req.herald_loss),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange { name, value: v });
        }
    }

    let p_herald = 1.0 - req.herald_loss;
    let mut links = Vec::with_capacity(req.count);
    let mut attempts = 0u64;
    for k in 0..req.count {
        let mut tries = 0u64;
        loop {
            if tries == req.max_attempts_per_link {
                return Err(Error::DistributionFailed { attempts });
            }
            tries += 1;
            attempts += 1;
            if noise::sample_erasure(p_herald, rng) {
                break;
            }
        }
        links.push(EntanglementLink::new(
            req.first_id + k as u64,
            req.sender,
            req.receiver,
            req.degradation,
            req.now,
        )?);
    }
    Ok(Distribution { links, attempts })
}
