use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::network::{distribute_pairs, EntanglementLink, PairRequest};
use crate::protocol::{self, AdversaryStrategy, DecodeStatus, EncodedPayload, MessageSpec};

/// Independent RNG stream families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamDomain {
    Sweep = 0,
    Adversary = 1,
}

/// Per-trial RNG stream, a pure function of its coordinates. Trial indices
/// use the low 32 bits of the ChaCha stream id, sweep points the next 23,
/// the domain the top bits.
pub fn trial_rng(
    seed: u64,
    domain: StreamDomain,
    point_index: usize,
    trial_index: usize,
) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = ((domain as u64) << 55) | ((point_index as u64) << 32) | trial_index as u64;
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial_index: usize,
    pub status: DecodeStatus,
    pub fidelity: Option<f64>,
    pub delivered: bool,
}

/// Aggregated statistics for one sweep point. Fidelity statistics cover
/// delivered trials only.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub x: f64,
    pub mean_fidelity: Option<f64>,
    pub stderr_fidelity: Option<f64>,
    pub delivery_rate: f64,
    pub n_delivered: usize,
    pub adversary_mean_fidelity: Option<f64>,
    /// Fraction of correct bit guesses from a Z readout (basis messages).
    pub adversary_guess_rate: Option<f64>,
}

/// Mean and standard error (sample std / √n).
pub fn mean_and_stderr(values: &[f64]) -> Option<(f64, f64)> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some((mean, (var / n as f64).sqrt()))
}

struct Transit {
    links: [EntanglementLink; 2],
    msg: MessageSpec,
    payload: EncodedPayload,
}

/// Distribution, message draw, encoding and hop-by-hop forwarding.
fn transmit(cfg: &ExperimentConfig, x_eff: f64, rng: &mut ChaCha8Rng) -> Result<Transit> {
    let topo = &cfg.topology;
    let req = PairRequest {
        degradation: x_eff,
        herald_loss: cfg.herald_loss,
        ..PairRequest::new(&topo.sender().id, &topo.receiver().id, 2)
    };
    let mut dist = distribute_pairs(topo, &req, rng)?;
    let l2 = dist.links.pop().expect("two links");
    let l1 = dist.links.pop().expect("two links");

    let msg = MessageSpec::realize(cfg.message_kind, rng)?;
    let mut payload = protocol::encode(&msg, &l1, &l2, 0.0, &cfg.coherence)?;
    for hop in topo.hop_attenuations() {
        payload = protocol::relay_forward(payload, hop, cfg.hop_depolarizing, rng)?;
        if payload.is_erased() {
            break;
        }
    }
    Ok(Transit {
        links: [l1, l2],
        msg,
        payload,
    })
}

fn bob_decode(cfg: &ExperimentConfig, transit: &mut Transit) -> Result<protocol::DecodeResult> {
    let now = cfg.bob_delay;
    let [l1, l2] = &mut transit.links;
    l1.age(now, &cfg.coherence)?;
    l2.age(now, &cfg.coherence)?;
    protocol::decode(&transit.payload, l1, l2, &transit.msg, now, &cfg.coherence)
}

fn run_trial_unchecked(
    cfg: &ExperimentConfig,
    beta: f64,
    point_index: usize,
    x: f64,
    trial_index: usize,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(cfg.seed, StreamDomain::Sweep, point_index, trial_index);
    let mut transit = transmit(cfg, beta * x, &mut rng)?;
    let result = bob_decode(cfg, &mut transit)?;
    Ok(TrialOutcome {
        trial_index,
        status: result.status,
        fidelity: result.fidelity,
        delivered: result.status != DecodeStatus::Erased,
    })
}

/// One end-to-end trial at degradation `x`; deterministic in
/// `(seed, point_index, trial_index)`.
pub fn run_trial(
    cfg: &ExperimentConfig,
    point_index: usize,
    x: f64,
    trial_index: usize,
) -> Result<TrialOutcome> {
    cfg.validate()?;
    run_trial_unchecked(cfg, cfg.beta()?, point_index, x, trial_index)
}

fn aggregate(cfg: &ExperimentConfig, x: f64, outcomes: &[TrialOutcome]) -> MetricsRecord {
    let n_delivered = outcomes.iter().filter(|o| o.delivered).count();
    let fids: Vec<f64> = outcomes.iter().filter_map(|o| o.fidelity).collect();
    let stats = mean_and_stderr(&fids);
    MetricsRecord {
        x,
        mean_fidelity: stats.map(|s| s.0),
        stderr_fidelity: stats.map(|s| s.1),
        delivery_rate: n_delivered as f64 / cfg.trials as f64,
        n_delivered,
        adversary_mean_fidelity: None,
        adversary_guess_rate: None,
    }
}

/// All trials at one sweep point.
pub fn run_point(cfg: &ExperimentConfig, point_index: usize) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let beta = cfg.beta()?;
    let x = cfg.degradation_sweep[point_index];
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial_unchecked(cfg, beta, point_index, x, t))
        .collect()
}

/// Degradation sweep; one record per sweep value, in sweep order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<MetricsRecord>> {
    cfg.validate()?;
    (0..cfg.degradation_sweep.len())
        .map(|i| {
            let outcomes = run_point(cfg, i)?;
            Ok(aggregate(cfg, cfg.degradation_sweep[i], &outcomes))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryOutcome {
    pub trial_index: usize,
    pub delivered: bool,
    pub adversary_fidelity: Option<f64>,
    pub guess_correct: Option<bool>,
    pub bob_fidelity: Option<f64>,
}

fn adversary_trial(
    cfg: &ExperimentConfig,
    beta: f64,
    strategy: AdversaryStrategy,
    point_index: usize,
    trial_index: usize,
) -> Result<AdversaryOutcome> {
    let x = cfg.degradation_sweep[point_index];
    let mut rng = trial_rng(cfg.seed, StreamDomain::Adversary, point_index, trial_index);
    let mut transit = transmit(cfg, beta * x, &mut rng)?;
    if transit.payload.is_erased() {
        return Ok(AdversaryOutcome {
            trial_index,
            delivered: false,
            adversary_fidelity: None,
            guess_correct: None,
            bob_fidelity: None,
        });
    }
    let stolen = protocol::adversary_decode(&transit.payload, strategy, &transit.msg)?;
    let guess_correct = match (transit.msg.bit(), stolen.reconstructed.as_ref()) {
        (Some(bit), Some(view)) => {
            let m = &view.register()[0];
            Some(view.measure_z(m, &mut rng)?.outcome == bit)
        }
        _ => None,
    };
    let bob = bob_decode(cfg, &mut transit)?;
    Ok(AdversaryOutcome {
        trial_index,
        delivered: true,
        adversary_fidelity: stolen.fidelity,
        guess_correct,
        bob_fidelity: bob.fidelity,
    })
}

/// Interception experiment at one sweep point: the adversary reads the
/// payload after the last hop, then Bob decodes the same payload.
pub fn run_adversary_point(
    cfg: &ExperimentConfig,
    strategy: AdversaryStrategy,
    point_index: usize,
) -> Result<MetricsRecord> {
    cfg.validate()?;
    let beta = cfg.beta()?;
    let outcomes: Vec<AdversaryOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| adversary_trial(cfg, beta, strategy, point_index, t))
        .collect::<Result<_>>()?;

    let n_delivered = outcomes.iter().filter(|o| o.delivered).count();
    let bob: Vec<f64> = outcomes.iter().filter_map(|o| o.bob_fidelity).collect();
    let eve: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| o.adversary_fidelity)
        .collect();
    let guesses: Vec<bool> = outcomes.iter().filter_map(|o| o.guess_correct).collect();
    let bob_stats = mean_and_stderr(&bob);
    Ok(MetricsRecord {
        x: cfg.degradation_sweep[point_index],
        mean_fidelity: bob_stats.map(|s| s.0),
        stderr_fidelity: bob_stats.map(|s| s.1),
        delivery_rate: n_delivered as f64 / cfg.trials as f64,
        n_delivered,
        adversary_mean_fidelity: mean_and_stderr(&eve).map(|s| s.0),
        adversary_guess_rate: (!guesses.is_empty())
            .then(|| guesses.iter().filter(|g| **g).count() as f64 / guesses.len() as f64),
    })
}

/// Interception experiment over every sweep point.
pub fn run_adversary(
    cfg: &ExperimentConfig,
    strategy: AdversaryStrategy,
) -> Result<Vec<MetricsRecord>> {
    cfg.validate()?;
    (0..cfg.degradation_sweep.len())
        .map(|i| run_adversary_point(cfg, strategy, i))
        .collect()
}
