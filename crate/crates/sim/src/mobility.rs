//! Vehicle and RSU placement on a ring road with constant-speed motion.
//!
//! The road wraps around (positions mod road length) so density stays
//! constant over a replication. Lanes 0..lanes_per_direction run in the
//! +x direction, the remaining lanes in -x; the RSU sits at a lateral
//! offset beyond the last lane.

use crate::config::ScenarioConfig;
use rand::Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Rsu,
    Vehicle,
}

#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub id: u32,
    pub kind: NodeKind,
    pub lane: u32,
    pub position_x: f64,
    /// Lateral position across the road, meters.
    pub position_y: f64,
    /// +1 or -1 along the road; 0 for the RSU.
    pub direction: f64,
    /// Constant speed for the replication, m/s.
    pub speed_ms: f64,
}

impl Node {
    /// Signed velocity along the road axis.
    pub fn velocity_x(&self) -> f64 {
        self.direction * self.speed_ms
    }
}

/// Lane center lateral coordinate. Lane 0 is nearest y = 0.
fn lane_center(lane: u32, lane_width: f64) -> f64 {
    lane as f64 * lane_width + lane_width / 2.0
}

/// Draws one truncated-Gaussian speed in m/s.
fn draw_speed(cfg: &ScenarioConfig, rng: &mut impl Rng) -> f64 {
    let mean = cfg.mean_speed_kmh;
    let sd = cfg.speed_stddev_kmh;
    let lo = (mean - 3.0 * sd).max(0.0);
    let hi = (mean + 3.0 * sd).min(cfg.speed_limit_kmh);
    if sd == 0.0 || lo >= hi {
        return mean.clamp(lo.min(hi), hi.max(lo)) / 3.6;
    }
    let dist = Normal::new(mean, sd).expect("valid normal");
    // Rejection sampling; the acceptance region covers ~3 sigma.
    for _ in 0..1000 {
        let v = dist.sample(rng);
        if (lo..=hi).contains(&v) {
            return v / 3.6;
        }
    }
    mean / 3.6
}

/// Places the RSU (node id 0) and `vehicle_count` vehicles, lanes filled
/// round-robin, positions uniform along the road, speeds drawn from the
/// truncated Gaussian. Deterministic given the RNG stream.
pub fn spawn_traffic(cfg: &ScenarioConfig, rng: &mut impl Rng) -> Vec<Node> {
    let total_lanes = 2 * cfg.lanes_per_direction;
    let n = cfg.vehicle_count();
    let mut nodes = Vec::with_capacity(n as usize + 1);
    nodes.push(Node {
        id: 0,
        kind: NodeKind::Rsu,
        lane: 0,
        position_x: cfg.rsu_position_x_m.unwrap_or(cfg.road_length_m / 2.0),
        position_y: -cfg.rsu_lateral_offset_m,
        direction: 0.0,
        speed_ms: 0.0,
    });
    for i in 0..n {
        let lane = i % total_lanes;
        let direction = if lane < cfg.lanes_per_direction { 1.0 } else { -1.0 };
        nodes.push(Node {
            id: i + 1,
            kind: NodeKind::Vehicle,
            lane,
            position_x: rng.gen::<f64>() * cfg.road_length_m,
            position_y: lane_center(lane, cfg.lane_width_m),
            direction,
            speed_ms: draw_speed(cfg, rng),
        });
    }
    nodes
}

/// Advances every node by `dt` seconds with wrap-around.
pub fn advance(nodes: &mut [Node], dt: f64, road_length: f64) {
    debug_assert!(dt > 0.0);
    for node in nodes {
        let x = node.position_x + node.velocity_x() * dt;
        node.position_x = x.rem_euclid(road_length);
    }
}

/// Euclidean distance between two nodes including lateral offsets, with
/// the along-road component wrapped on the ring.
pub fn distance(a: &Node, b: &Node, road_length: f64) -> f64 {
    let dx_raw = (a.position_x - b.position_x).abs();
    let dx = dx_raw.min(road_length - dx_raw);
    let dy = a.position_y - b.position_y;
    (dx * dx + dy * dy).sqrt()
}

/// Distance clamped below 1 m for pathloss evaluation.
pub fn pathloss_distance(a: &Node, b: &Node, road_length: f64) -> f64 {
    distance(a, b, road_length).max(1.0)
}
