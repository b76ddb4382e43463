//! Entanglement-keyed relay protocol.
//!
//! Alice masks the message qubit with an X from key pair 1 (CNOT controlled
//! by her half) and a Z from key pair 2 (CZ controlled by her half). Relays
//! forward the qubit untouched apart from loss and channel noise. Bob applies
//! the same controlled gates from his halves; on Φ⁺ keys the masks cancel
//! branch by branch, so no classical message is ever exchanged. Anyone
//! without the B-side qubits sees the message qubit as exactly `I/2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::EntanglementLink;
use crate::noise::{self, AttenuationSpec, CoherenceSpec};
use crate::quantum::{bell_state, gates, BellKind, QuantumState, QubitLabel, C64};

/// Label of the message-carrying qubit.
pub const MESSAGE_QUBIT: &str = "msg.M";

fn message_label() -> QubitLabel {
    QubitLabel::new(MESSAGE_QUBIT).expect("non-empty")
}

/// How message states are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MessageKind {
    /// Uniform over the Bloch sphere.
    #[default]
    HaarRandom,
    /// `|0⟩` or `|1⟩`.
    FixedBasis(u8),
    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    Fixed { theta: f64, phi: f64 },
}

/// A realized single-qubit message.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageSpec {
    kind: MessageKind,
    amplitudes: [C64; 2],
}

impl MessageSpec {
    pub fn realize<R: Rng + ?Sized>(kind: MessageKind, rng: &mut R) -> Result<Self> {
        match kind {
            MessageKind::HaarRandom => {
                let cos_theta = 1.0 - 2.0 * rng.random::<f64>();
                let phi = 2.0 * PI * rng.random::<f64>();
                let mut m = Self::bloch(cos_theta.clamp(-1.0, 1.0).acos(), phi);
                m.kind = kind;
                Ok(m)
            }
            MessageKind::FixedBasis(bit) => Self::basis(bit),
            MessageKind::Fixed { theta, phi } => {
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(Error::OutOfRange {
                        name: "theta",
                        value: theta,
                    });
                }
                Ok(Self::bloch(theta, phi))
            }
        }
    }

    pub fn basis(bit: u8) -> Result<Self> {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let amplitudes = match bit {
            0 => [one, zero],
            1 => [zero, one],
            _ => {
                return Err(Error::OutOfRange {
                    name: "bit",
                    value: f64::from(bit),
                })
            }
        };
        Ok(Self {
            kind: MessageKind::FixedBasis(bit),
            amplitudes,
        })
    }

    pub fn bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            kind: MessageKind::Fixed { theta, phi },
            amplitudes: [C64::new(c, 0.0), C64::from_polar(s, phi)],
        }
    }

    pub fn kind(&self) -> MessageKind {
        self.kind
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amplitudes
    }

    /// Classical bit carried by a basis message.
    pub fn bit(&self) -> Option<u8> {
        match self.kind {
            MessageKind::FixedBasis(b) => Some(b),
            _ => None,
        }
    }

    /// `|ψ⟩⟨ψ|` on the message qubit.
    pub fn state(&self) -> QuantumState {
        QuantumState::from_pure(vec![message_label()], &self.amplitudes)
            .expect("normalized message")
    }
}

/// The masked message qubit together with both key pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPayload {
    state: Option<QuantumState>,
    key_link_ids: [u64; 2],
    key_qubits: [(QubitLabel, QubitLabel); 2],
    key_decay_at_encode: [f64; 2],
    emitted_at: f64,
}

impl EncodedPayload {
    /// Joint state over `{M, A1, B1, A2, B2}`; `None` once erased.
    pub fn state(&self) -> Option<&QuantumState> {
        self.state.as_ref()
    }

    pub fn is_erased(&self) -> bool {
        self.state.is_none()
    }

    pub fn key_link_ids(&self) -> [u64; 2] {
        self.key_link_ids
    }

    pub fn emitted_at(&self) -> f64 {
        self.emitted_at
    }

    /// What an interceptor holding only the message qubit sees.
    pub fn message_marginal(&self) -> Result<QuantumState> {
        self.state
            .as_ref()
            .ok_or(Error::PayloadErased)?
            .partial_trace(&[message_label()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Ok,
    Erased,
    Expired,
    Unauthorized,
    Replay,
}

impl fmt::Display for DecodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DecodeStatus::Ok => "ok",
            DecodeStatus::Erased => "erased",
            DecodeStatus::Expired => "expired",
            DecodeStatus::Unauthorized => "unauthorized",
            DecodeStatus::Replay => "replay",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub reconstructed: Option<QuantumState>,
    pub fidelity: Option<f64>,
    pub status: DecodeStatus,
}

impl DecodeResult {
    fn empty(status: DecodeStatus) -> Self {
        Self {
            reconstructed: None,
            fidelity: None,
            status,
        }
    }

    fn with_state(
        reconstructed: QuantumState,
        msg: &MessageSpec,
        status: DecodeStatus,
    ) -> Result<Self> {
        let fidelity = reconstructed.fidelity(&msg.state())?;
        Ok(Self {
            reconstructed: Some(reconstructed),
            fidelity: Some(fidelity),
            status,
        })
    }
}

/// Masks `msg` with the two key pairs. Both links must be unconsumed,
/// within their coherence window, and share a sender.
pub fn encode(
    msg: &MessageSpec,
    link1: &EntanglementLink,
    link2: &EntanglementLink,
    now: f64,
    coh: &CoherenceSpec,
) -> Result<EncodedPayload> {
    for link in [link1, link2] {
        if link.is_consumed() {
            return Err(Error::Replay(link.id()));
        }
        if !link.coherence_ok(now, coh)? {
            return Err(Error::Expired(link.id()));
        }
    }
    if link1.endpoints().0 != link2.endpoints().0 {
        return Err(Error::Topology("key pairs must share a sender".into()));
    }
    let m = message_label();
    let state = msg
        .state()
        .tensor(link1.state())?
        .tensor(link2.state())?
        .apply_unitary(&gates::cnot(), &[link1.sender_qubit().clone(), m.clone()])?
        .apply_unitary(&gates::cz(), &[link2.sender_qubit().clone(), m])?;
    Ok(EncodedPayload {
        state: Some(state),
        key_link_ids: [link1.id(), link2.id()],
        key_qubits: [
            (link1.sender_qubit().clone(), link1.receiver_qubit().clone()),
            (link2.sender_qubit().clone(), link2.receiver_qubit().clone()),
        ],
        key_decay_at_encode: [link1.storage_decay(), link2.storage_decay()],
        emitted_at: now,
    })
}

/// One pass-through hop: erasure with probability `1 − survival`, else
/// depolarizing noise on the message qubit only.
pub fn relay_forward<R: Rng + ?Sized>(
    payload: EncodedPayload,
    hop: &AttenuationSpec,
    hop_depol: f64,
    rng: &mut R,
) -> Result<EncodedPayload> {
    let Some(state) = payload.state.as_ref() else {
        return Err(Error::PayloadErased);
    };
    if !noise::sample_erasure(noise::survival_probability(hop), rng) {
        return Ok(EncodedPayload {
            state: None,
            ..payload
        });
    }
    if hop_depol == 0.0 {
        return Ok(payload);
    }
    let state =
        state.apply_channel(&noise::depolarizing_channel(hop_depol)?, &[message_label()])?;
    Ok(EncodedPayload {
        state: Some(state),
        ..payload
    })
}

/// Key material Bob brings to one slot of the decoder.
enum KeySource<'a> {
    /// The pair embedded in the payload, dephased by the given extra factor.
    Embedded { decay: f64 },
    /// A standalone pair uncorrelated with the payload.
    Substitute(&'a QuantumState),
}

fn run_decoder(payload: &EncodedPayload, sources: [KeySource<'_>; 2]) -> Result<QuantumState> {
    let m = message_label();
    let mut state = payload.state.clone().ok_or(Error::PayloadErased)?;
    let mut receiver_qubits = Vec::with_capacity(2);
    for (slot, source) in sources.into_iter().enumerate() {
        let (a, b) = &payload.key_qubits[slot];
        match source {
            KeySource::Embedded { decay } => {
                if decay < 1.0 {
                    let ch = noise::phase_damping_channel(decay)?;
                    state = state
                        .apply_channel(&ch, std::slice::from_ref(a))?
                        .apply_channel(&ch, std::slice::from_ref(b))?;
                }
                receiver_qubits.push(b.clone());
            }
            KeySource::Substitute(pair) => {
                let keep: Vec<QubitLabel> = state
                    .register()
                    .iter()
                    .filter(|q| *q != a && *q != b)
                    .cloned()
                    .collect();
                state = state.partial_trace(&keep)?.tensor(pair)?;
                receiver_qubits.push(pair.register()[1].clone());
            }
        }
    }
    state
        .apply_unitary(&gates::cnot(), &[receiver_qubits[0].clone(), m.clone()])?
        .apply_unitary(&gates::cz(), &[receiver_qubits[1].clone(), m.clone()])?
        .partial_trace(&[m])
}

fn holds_key(payload: &EncodedPayload, slot: usize, link: &EntanglementLink) -> bool {
    link.id() == payload.key_link_ids[slot] && link.receiver_qubit() == &payload.key_qubits[slot].1
}

fn key_source<'a>(
    payload: &EncodedPayload,
    slot: usize,
    link: &'a EntanglementLink,
) -> KeySource<'a> {
    if !link.is_consumed() && holds_key(payload, slot, link) {
        KeySource::Embedded {
            decay: link.storage_decay() / payload.key_decay_at_encode[slot],
        }
    } else {
        KeySource::Substitute(link.state())
    }
}

/// Bob's decoder. Erased payloads, consumed links and expired links map to
/// their statuses; links that are not the payload's keys decode
/// mechanically but report `Unauthorized`. A completed decode consumes both
/// links.
pub fn decode(
    payload: &EncodedPayload,
    link1: &mut EntanglementLink,
    link2: &mut EntanglementLink,
    msg: &MessageSpec,
    now: f64,
    coh: &CoherenceSpec,
) -> Result<DecodeResult> {
    if payload.is_erased() {
        return Ok(DecodeResult::empty(DecodeStatus::Erased));
    }
    if link1.is_consumed() || link2.is_consumed() {
        return replay_decode(payload, link1, link2, msg);
    }
    for link in [&*link1, &*link2] {
        if !link.coherence_ok(now, coh)? {
            return Ok(DecodeResult::empty(DecodeStatus::Expired));
        }
    }

    let authorized = holds_key(payload, 0, link1) && holds_key(payload, 1, link2);
    let reconstructed = run_decoder(
        payload,
        [key_source(payload, 0, link1), key_source(payload, 1, link2)],
    )?;
    let status = if authorized {
        DecodeStatus::Ok
    } else {
        DecodeStatus::Unauthorized
    };
    let result = DecodeResult::with_state(reconstructed, msg, status)?;
    link1.consume()?;
    link2.consume()?;
    Ok(result)
}

/// Runs the decoder against links of which at least one was already used.
/// Consumed links contribute their scrubbed memory, which carries no
/// correlation with the payload.
pub fn replay_decode(
    payload: &EncodedPayload,
    link1: &EntanglementLink,
    link2: &EntanglementLink,
    msg: &MessageSpec,
) -> Result<DecodeResult> {
    if !(link1.is_consumed() || link2.is_consumed()) {
        return Err(Error::InvalidState(
            "replay decode needs a consumed link".into(),
        ));
    }
    if payload.is_erased() {
        return Ok(DecodeResult::empty(DecodeStatus::Erased));
    }
    let reconstructed = run_decoder(
        payload,
        [key_source(payload, 0, link1), key_source(payload, 1, link2)],
    )?;
    DecodeResult::with_state(reconstructed, msg, DecodeStatus::Replay)
}

/// Attack run by a party that holds the message qubit but neither B-side
/// key qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryStrategy {
    /// Read the intercepted qubit as is.
    TraceOut,
    /// Run Bob's decoder with the adversary's own pristine Φ⁺ pairs.
    FreshPairs,
}

impl FromStr for AdversaryStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trace_out" => Ok(Self::TraceOut),
            "fresh_pairs" => Ok(Self::FreshPairs),
            other => Err(Error::Config(format!(
                "unknown strategy `{other}` (expected trace_out or fresh_pairs)"
            ))),
        }
    }
}

impl fmt::Display for AdversaryStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TraceOut => "trace_out",
            Self::FreshPairs => "fresh_pairs",
        })
    }
}

pub fn adversary_decode(
    payload: &EncodedPayload,
    strategy: AdversaryStrategy,
    msg: &MessageSpec,
) -> Result<DecodeResult> {
    if payload.is_erased() {
        return Ok(DecodeResult::empty(DecodeStatus::Erased));
    }
    let intercepted = payload.message_marginal()?;
    let reconstructed = match strategy {
        AdversaryStrategy::TraceOut => intercepted,
        AdversaryStrategy::FreshPairs => {
            let q = |name: &str| QubitLabel::new(name).expect("non-empty");
            let m = message_label();
            let x_pair = bell_state(BellKind::PhiPlus, q("eve.E0"), q("eve.F0"))?;
            let z_pair = bell_state(BellKind::PhiPlus, q("eve.E1"), q("eve.F1"))?;
            intercepted
                .tensor(&x_pair)?
                .tensor(&z_pair)?
                .apply_unitary(&gates::cnot(), &[q("eve.F0"), m.clone()])?
                .apply_unitary(&gates::cz(), &[q("eve.F1"), m.clone()])?
                .partial_trace(&[m])?
        }
    };
    DecodeResult::with_state(reconstructed, msg, DecodeStatus::Unauthorized)
}
