//! Simulator for authentication-free quantum relay networks.
//!
//! Pre-shared entangled pairs serve as both the decryption key and the
//! authentication filter: a message qubit masked with entanglement-controlled
//! Pauli operations can only be unmasked by the holder of the partner
//! qubits, while relays and interceptors see a maximally mixed state.
//!
//! Modules, bottom up:
//! - [`quantum`]: labeled density matrices, gates, channels, partial trace.
//! - [`noise`]: depolarizing/dephasing channels, Werner pairs, photon loss.
//! - [`network`]: topology and the lifecycle of entangled links.
//! - [`protocol`]: encoding, relay forwarding, decoding and adversaries.
//! - [`harness`]: seeded parallel Monte Carlo experiments, CSV output.

#![forbid(unsafe_code)]

pub mod error;
pub mod harness;
pub mod network;
pub mod noise;
pub mod protocol;
pub mod quantum;

pub use error::{Error, Result};
