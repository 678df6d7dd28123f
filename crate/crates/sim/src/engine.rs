//! Slot-driven replication loop.
//!
//! Each slot: roll allocation-period state at period boundaries (sensing
//! buffers, SPS reselection, packet generation, attempt scheduling),
//! advance mobility, then resolve the slot in two passes — received
//! powers for every listener (feeding the sensing ledgers), then
//! per-receiver SINR with co-channel interference and the Doppler ICI
//! floor, mapped through BER to a Bernoulli decode.

use crate::config::{HarqMode, ScenarioConfig};
use crate::mac::{self, SensingLedger, SpsAgent};
use crate::metrics::MetricsAccumulator;
use crate::mobility::{self, NodeKind};
use crate::rngs::RngStreams;
use anyhow::{Context, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sidelink_core as core;
use sidelink_core::units::{db_to_linear, dbm_to_mw};

/// A packet being (re)transmitted by one node.
struct Inflight {
    gen_slot: u64,
    attempts_done: u32,
    delivered: bool,
    /// (absolute slot, first subchannel) of the attempt scheduled in the
    /// current period, fixed at the period boundary.
    scheduled: Option<(u64, u32)>,
    /// RSU packets only: first-success slot per vehicle (node id - 1).
    first_success: Option<Vec<Option<u64>>>,
}

struct Transmitter {
    node_id: u32,
    agent: SpsAgent,
    ledger: SensingLedger,
    inflight: Vec<Inflight>,
}

/// AR(1) shadowing state per ordered (tx, rx) pair, lazily initialized
/// and advanced by the change in link distance at the moment of use.
struct ShadowField {
    n: usize,
    sigma_db: f64,
    d_corr_m: f64,
    states: Vec<Option<(f64, f64)>>,
}

impl ShadowField {
    fn new(n: usize, sigma_db: f64, d_corr_m: f64) -> Self {
        ShadowField { n, sigma_db, d_corr_m, states: vec![None; n * n] }
    }

    fn gain_db(&mut self, tx: usize, rx: usize, d_m: f64, rng: &mut impl Rng) -> f64 {
        let slot = &mut self.states[tx * self.n + rx];
        let s = match *slot {
            None => self.sigma_db * rng.sample::<f64, _>(StandardNormal),
            Some((s, last_d)) => {
                let delta = (d_m - last_d).abs();
                if delta == 0.0 {
                    s
                } else {
                    let noise = self.sigma_db * rng.sample::<f64, _>(StandardNormal);
                    core::shadowing_step(s, delta, self.d_corr_m, noise)
                }
            }
        };
        *slot = Some((s, d_m));
        s
    }
}

struct ActiveTx {
    tx_index: usize,
    node_id: u32,
    packet_index: usize,
    subchannel_start: u32,
}

/// One attempt-ledger row: a transmission attempt and its per-receiver
/// decode outcomes.
#[derive(Debug, Clone)]
pub struct AttemptRecord {
    pub replication: u32,
    pub tx: u32,
    pub gen_slot: u64,
    pub attempt: u32,
    pub slot: u64,
    pub subchannel_start: u32,
    pub outcomes: Vec<(u32, bool)>,
}

/// One vehicle-trace row, sampled at allocation-period boundaries.
#[derive(Debug, Clone)]
pub struct VehicleSample {
    pub t_s: f64,
    pub id: u32,
    pub x_m: f64,
    pub lane: u32,
    pub speed_ms: f64,
}

/// Optional debug traces collected during a replication.
#[derive(Debug, Default)]
pub struct Trace {
    pub attempts: Option<Vec<AttemptRecord>>,
    pub vehicles: Option<Vec<VehicleSample>>,
}

/// Runs one replication and returns its metrics.
pub fn run_replication(
    cfg: &ScenarioConfig,
    master_seed: u64,
    replication: u32,
) -> Result<MetricsAccumulator> {
    run_replication_traced(cfg, master_seed, replication, &mut Trace::default())
}

/// [`run_replication`] with debug trace collection enabled for whichever
/// trace vectors the caller pre-populates with `Some(Vec::new())`.
pub fn run_replication_traced(
    cfg: &ScenarioConfig,
    master_seed: u64,
    replication: u32,
    trace: &mut Trace,
) -> Result<MetricsAccumulator> {
    let mcs = cfg.mcs_resolved().context("resolving MCS entry")?;
    let rate_bps = cfg.data_rate_bps_with(mcs);
    let packet_bits = cfg.packet_bits();
    let noise_dbm = core::noise_power_dbm(cfg.noise_bandwidth_hz(), cfg.noise_figure_db)
        .map_err(|e| anyhow::anyhow!("noise power: {e:?}"))?;
    let noise_mw = dbm_to_mw(noise_dbm);
    // The SINR -> Eb/N0 conversion always scales by the occupied
    // transmission bandwidth; pairing it with noise integrated over the
    // full channel (the default) reproduces the reference link budget
    // (Eb/N0 of roughly 10 dB at 375 m, 23 dBm, MCS 8).
    let occupied_bw_hz = cfg.occupied_bandwidth_hz();
    let scs_hz = cfg.scs_khz as f64 * 1000.0;
    let width = cfg.subchannels_per_packet;
    let slot_s = cfg.slot_duration_s();
    let slots_per_period = cfg.slots_per_period();
    let total_slots = ((cfg.warmup_s + cfg.sim_duration_s) / slot_s).round() as u64;
    let warmup_slot = (cfg.warmup_s / slot_s).round() as u64;
    let gen_interval = cfg.generation_interval_periods();
    let horizon_slots = cfg.harq_max_attempts as u64 * slots_per_period;
    let attempt_energy_j = core::dbm_to_watts(cfg.pt_dbm) * packet_bits as f64 / rate_bps;
    let antenna_gain = cfg.antenna_gain_tx_dbi + cfg.antenna_gain_rx_dbi;
    let road = cfg.road_length_m;

    let mut rngs = RngStreams::new(master_seed, replication);
    let mut nodes = mobility::spawn_traffic(cfg, &mut rngs.mobility);
    let n = nodes.len();
    let n_vehicles = n - 1;
    let mut shadow = ShadowField::new(n, cfg.shadowing_sigma_db, cfg.decorr_distance_m);
    let mut acc = MetricsAccumulator::new(cfg.prr_bin_width_m, cfg.max_eval_distance_m);

    // Transmitters in ascending node id; the RSU (id 0) always sends,
    // vehicles only when not configured passive.
    let mut txs: Vec<Transmitter> = nodes
        .iter()
        .filter(|node| node.kind == NodeKind::Rsu || !cfg.passive_vehicles)
        .map(|node| {
            let ledger = SensingLedger::new(slots_per_period, cfg.num_subchannels);
            let agent = SpsAgent::new(node.id, cfg, &ledger, &mut rngs.sps);
            Transmitter { node_id: node.id, agent, ledger, inflight: Vec::new() }
        })
        .collect();

    let mut is_transmitting = vec![false; n];
    let mut deliveries: Vec<(usize, u32)> = Vec::new();

    for slot in 0..total_slots {
        if slot % slots_per_period == 0 {
            let period = slot / slots_per_period;
            for t in &mut txs {
                t.ledger.roll_period();
                if period > 0 {
                    t.agent.period_tick(cfg, &t.ledger, &mut rngs.sps);
                }
                flush_retired(t, cfg, &mut acc, warmup_slot, horizon_slots, attempt_energy_j);
                if period.is_multiple_of(gen_interval) {
                    let first_success =
                        (t.node_id == 0).then(|| vec![None; n_vehicles]);
                    t.inflight.push(Inflight {
                        gen_slot: slot,
                        attempts_done: 0,
                        delivered: false,
                        scheduled: None,
                        first_success,
                    });
                }
                for p in &mut t.inflight {
                    p.scheduled = None;
                    let cancelled =
                        cfg.harq_mode == HarqMode::TruncatedStop && p.delivered;
                    if p.attempts_done < cfg.harq_max_attempts && !cancelled {
                        let res = t.agent.selections[p.attempts_done as usize];
                        p.scheduled = Some((slot + res.slot, res.subchannel_start));
                    }
                }
            }

            if let Some(v) = &mut trace.vehicles {
                for node in nodes.iter().filter(|n| n.kind == NodeKind::Vehicle) {
                    v.push(VehicleSample {
                        t_s: slot as f64 * slot_s,
                        id: node.id,
                        x_m: node.position_x,
                        lane: node.lane,
                        speed_ms: node.speed_ms,
                    });
                }
            }
        }

        mobility::advance(&mut nodes, slot_s, road);

        // Collect this slot's transmissions (ascending node id by
        // construction; one per transmitter thanks to distinct slots).
        let mut active: Vec<ActiveTx> = Vec::new();
        let mut attempt_meta: Vec<(u64, u32)> = Vec::new();
        is_transmitting.iter_mut().for_each(|b| *b = false);
        for (ti, t) in txs.iter_mut().enumerate() {
            for (pi, p) in t.inflight.iter_mut().enumerate() {
                if let Some((s, sub)) = p.scheduled {
                    if s == slot {
                        p.attempts_done += 1;
                        active.push(ActiveTx {
                            tx_index: ti,
                            node_id: t.node_id,
                            packet_index: pi,
                            subchannel_start: sub,
                        });
                        attempt_meta.push((p.gen_slot, p.attempts_done));
                        is_transmitting[t.node_id as usize] = true;
                    }
                }
            }
        }
        if active.is_empty() {
            continue;
        }

        // Pass 1: received power of every transmission at every other
        // node, also driving the per-link shadowing processes.
        let slot_in_period = slot % slots_per_period;
        let mut p_rx_mw = vec![vec![0.0f64; n]; active.len()];
        for (ai, a) in active.iter().enumerate() {
            let tx = a.node_id as usize;
            for rx in 0..n {
                if rx == tx {
                    continue;
                }
                let d = mobility::pathloss_distance(&nodes[tx], &nodes[rx], road);
                let s_db = shadow.gain_db(tx, rx, d, &mut rngs.shadowing);
                let pl = core::pathloss_db(d, cfg.fc_ghz).expect("validated fc");
                p_rx_mw[ai][rx] = dbm_to_mw(cfg.pt_dbm + antenna_gain - pl + s_db);
            }
        }

        // Sensing: idle transmitters log per-subchannel power.
        for t in &mut txs {
            let me = t.node_id as usize;
            if is_transmitting[me] {
                continue;
            }
            for (ai, a) in active.iter().enumerate() {
                let per_sub = p_rx_mw[ai][me] / width as f64;
                for sub in a.subchannel_start..a.subchannel_start + width {
                    t.ledger.observe(slot_in_period, sub, per_sub);
                }
            }
        }

        // Pass 2: decode at every vehicle receiver.
        let measuring = slot >= warmup_slot;
        deliveries.clear();
        let mut traced_outcomes: Vec<Vec<(u32, bool)>> = if trace.attempts.is_some() {
            vec![Vec::new(); active.len()]
        } else {
            Vec::new()
        };
        for (ai, a) in active.iter().enumerate() {
            let tx = a.node_id as usize;
            for rx in 1..n {
                if rx == tx {
                    continue;
                }
                let dist = mobility::distance(&nodes[tx], &nodes[rx], road);
                // Half-duplex: a node transmitting this slot hears nothing.
                if is_transmitting[rx] {
                    if measuring {
                        acc.record_reception(dist, false, 1.0);
                    }
                    if trace.attempts.is_some() {
                        traced_outcomes[ai].push((rx as u32, false));
                    }
                    continue;
                }
                let per = match cfg.fixed_per {
                    Some(p) => p,
                    None => {
                        let mut interference = 0.0;
                        for (bi, b) in active.iter().enumerate() {
                            if bi == ai {
                                continue;
                            }
                            let overlap = mac::subchannel_overlap(
                                a.subchannel_start,
                                b.subchannel_start,
                                width,
                            );
                            if overlap == 0 {
                                continue;
                            }
                            let frac = if cfg.interference_overlap_scaling {
                                overlap as f64 / width as f64
                            } else {
                                1.0
                            };
                            interference += frac * p_rx_mw[bi][rx];
                        }
                        let signal = p_rx_mw[ai][rx];
                        let ici_mw = if cfg.ici_enabled {
                            let v_rel =
                                (nodes[tx].velocity_x() - nodes[rx].velocity_x()).abs();
                            core::ici_ratio(v_rel, cfg.fc_ghz, scs_hz) * signal
                        } else {
                            0.0
                        };
                        let sinr = core::sinr_db_linear(signal, noise_mw, interference, ici_mw);
                        let ebn0_db = core::ebn0_from_sinr(sinr, occupied_bw_hz, rate_bps);
                        let ber = core::ber_from_ebn0(db_to_linear(ebn0_db), mcs.modulation);
                        core::per_from_ber(ber, packet_bits)
                    }
                };
                let success = if per <= 0.0 {
                    true
                } else if per >= 1.0 {
                    false
                } else {
                    rngs.decode.gen::<f64>() >= per
                };
                if measuring {
                    acc.record_reception(dist, success, per);
                }
                if trace.attempts.is_some() {
                    traced_outcomes[ai].push((rx as u32, success));
                }
                if success {
                    deliveries.push((ai, rx as u32));
                }
            }
        }
        if let Some(records) = &mut trace.attempts {
            for (ai, a) in active.iter().enumerate() {
                let (gen_slot, attempt) = attempt_meta[ai];
                records.push(AttemptRecord {
                    replication,
                    tx: a.node_id,
                    gen_slot,
                    attempt,
                    slot,
                    subchannel_start: a.subchannel_start,
                    outcomes: std::mem::take(&mut traced_outcomes[ai]),
                });
            }
        }
        for &(ai, rx) in &deliveries {
            let a = &active[ai];
            let p = &mut txs[a.tx_index].inflight[a.packet_index];
            p.delivered = true;
            if let Some(fs) = &mut p.first_success {
                let entry = &mut fs[rx as usize - 1];
                if entry.is_none() {
                    *entry = Some(slot);
                }
            }
        }
    }

    for t in &mut txs {
        flush_retired(t, cfg, &mut acc, warmup_slot, horizon_slots, attempt_energy_j);
    }
    Ok(acc)
}

/// Retires finished packets, booking their attempts, energy, delivery
/// flag and (for RSU packets) per-receiver first-success delays. Packets
/// generated during warmup, and packets still in flight when the run
/// ends, are never booked.
fn flush_retired(
    t: &mut Transmitter,
    cfg: &ScenarioConfig,
    acc: &mut MetricsAccumulator,
    warmup_slot: u64,
    horizon_slots: u64,
    attempt_energy_j: f64,
) {
    let is_rsu = t.node_id == 0;
    let mut kept = Vec::with_capacity(t.inflight.len());
    for p in t.inflight.drain(..) {
        let exhausted = p.attempts_done >= cfg.harq_max_attempts;
        let cancelled = cfg.harq_mode == HarqMode::TruncatedStop && p.delivered;
        if !(exhausted || cancelled) {
            kept.push(p);
            continue;
        }
        if p.gen_slot < warmup_slot {
            continue;
        }
        acc.generated_packets += 1;
        for _ in 0..p.attempts_done {
            acc.record_attempt(is_rsu, attempt_energy_j);
        }
        if p.delivered {
            acc.delivered_packets += 1;
        }
        if let Some(fs) = p.first_success {
            for outcome in fs {
                match outcome {
                    Some(s) => acc.record_delivery_delay(s - p.gen_slot, false),
                    None => acc.record_delivery_delay(horizon_slots, true),
                }
            }
        }
    }
    t.inflight = kept;
}

/// Runs all replications of a scenario in parallel with the seed taken
/// from the configuration, merging in replication order.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsAccumulator> {
    run_scenario_seeded(cfg, cfg.master_seed)
}

/// Same as [`run_scenario`] with an explicit master seed (sweep points).
pub fn run_scenario_seeded(cfg: &ScenarioConfig, master_seed: u64) -> Result<MetricsAccumulator> {
    let mut reps: Vec<MetricsAccumulator> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| run_replication(cfg, master_seed, r))
        .collect::<Result<_>>()?;
    let mut merged = reps.remove(0);
    merged.replications = 1;
    for r in &reps {
        merged.merge(r);
    }
    Ok(merged)
}
