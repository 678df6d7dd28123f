//! Sensing-based semi-persistent resource selection over a
//! slot x subchannel grid, plus the per-node sensing ledger.

use crate::config::ScenarioConfig;
use rand::Rng;

/// One selectable resource: a slot within the allocation period and the
/// first subchannel of a contiguous block of `subchannels_per_packet`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resource {
    pub slot: u64,
    pub subchannel_start: u32,
}

/// Per-listener received-power ledger over one allocation period.
///
/// `previous` holds the period most recently completed and is what
/// reselection decisions read; `current` accumulates the running period.
#[derive(Debug, Clone)]
pub struct SensingLedger {
    num_subchannels: u32,
    previous: Vec<f64>,
    current: Vec<f64>,
}

impl SensingLedger {
    pub fn new(slots_per_period: u64, num_subchannels: u32) -> Self {
        let len = (slots_per_period * num_subchannels as u64) as usize;
        SensingLedger {
            num_subchannels,
            previous: vec![0.0; len],
            current: vec![0.0; len],
        }
    }

    fn idx(&self, slot: u64, subchannel: u32) -> usize {
        (slot * self.num_subchannels as u64 + subchannel as u64) as usize
    }

    /// Records received power (linear mW) on one subchannel of a slot.
    pub fn observe(&mut self, slot: u64, subchannel: u32, power_mw: f64) {
        let i = self.idx(slot, subchannel);
        self.current[i] += power_mw;
    }

    /// Rolls to a new allocation period.
    pub fn roll_period(&mut self) {
        std::mem::swap(&mut self.previous, &mut self.current);
        self.current.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Sensed power of a candidate resource: sum over its subchannels in
    /// the last completed period.
    pub fn resource_rssi_mw(&self, res: Resource, width: u32) -> f64 {
        (res.subchannel_start..res.subchannel_start + width)
            .map(|s| self.previous[self.idx(res.slot, s)])
            .sum()
    }
}

/// Semi-persistent scheduling state of one transmitter.
#[derive(Debug, Clone)]
pub struct SpsAgent {
    pub owner: u32,
    /// One resource per HARQ attempt; distinct slots within the period.
    pub selections: Vec<Resource>,
    pub reselection_counter: u32,
}

fn all_resources(cfg: &ScenarioConfig) -> Vec<Resource> {
    let pair_positions = cfg.num_subchannels - cfg.subchannels_per_packet + 1;
    let mut out = Vec::with_capacity((cfg.slots_per_period() * pair_positions as u64) as usize);
    for slot in 0..cfg.slots_per_period() {
        for p in 0..pair_positions {
            out.push(Resource { slot, subchannel_start: p });
        }
    }
    out
}

/// Picks `count` resources with pairwise distinct slots, uniformly at
/// random from `pool`. Widens to duplicates-allowed only if the pool
/// cannot supply enough distinct slots.
fn pick_distinct_slots(pool: &[Resource], count: u32, rng: &mut impl Rng) -> Vec<Resource> {
    let mut chosen: Vec<Resource> = Vec::with_capacity(count as usize);
    let mut remaining: Vec<Resource> = pool.to_vec();
    while chosen.len() < count as usize && !remaining.is_empty() {
        let i = rng.gen_range(0..remaining.len());
        let res = remaining.swap_remove(i);
        chosen.push(res);
        remaining.retain(|r| r.slot != res.slot);
    }
    // Degenerate grids only: allow slot reuse rather than under-selecting.
    while chosen.len() < count as usize && !pool.is_empty() {
        chosen.push(pool[rng.gen_range(0..pool.len())]);
    }
    chosen
}

/// Builds a fresh selection from the sensing ledger: candidates are all
/// resources sensed below the threshold; when that set is empty the
/// fallback pool is the lowest-RSSI 20% of the grid.
pub fn select_resources(
    cfg: &ScenarioConfig,
    ledger: &SensingLedger,
    rng: &mut impl Rng,
) -> Vec<Resource> {
    let width = cfg.subchannels_per_packet;
    let threshold_mw = sidelink_core::units::dbm_to_mw(cfg.sensing_threshold_dbm);
    let resources = all_resources(cfg);
    let candidates: Vec<Resource> = resources
        .iter()
        .copied()
        .filter(|r| ledger.resource_rssi_mw(*r, width) < threshold_mw)
        .collect();
    let pool = if candidates.len() >= cfg.harq_max_attempts as usize {
        candidates
    } else {
        let mut ranked = resources;
        ranked.sort_by(|a, b| {
            let ra = ledger.resource_rssi_mw(*a, width);
            let rb = ledger.resource_rssi_mw(*b, width);
            ra.partial_cmp(&rb)
                .unwrap()
                .then(a.slot.cmp(&b.slot))
                .then(a.subchannel_start.cmp(&b.subchannel_start))
        });
        let keep = ((ranked.len() as f64 * 0.2).ceil() as usize).max(cfg.harq_max_attempts as usize);
        ranked.truncate(keep.min(ranked.len()));
        ranked
    };
    pick_distinct_slots(&pool, cfg.harq_max_attempts, rng)
}

impl SpsAgent {
    pub fn new(
        owner: u32,
        cfg: &ScenarioConfig,
        ledger: &SensingLedger,
        rng: &mut impl Rng,
    ) -> Self {
        SpsAgent {
            owner,
            selections: select_resources(cfg, ledger, rng),
            reselection_counter: draw_counter(rng),
        }
    }

    /// Once-per-period tick: on counter expiry either keep the selection
    /// (probability `keep_probability`) or reselect from the ledger;
    /// either way a fresh counter is drawn.
    pub fn period_tick(
        &mut self,
        cfg: &ScenarioConfig,
        ledger: &SensingLedger,
        rng: &mut impl Rng,
    ) {
        if self.reselection_counter > 0 {
            self.reselection_counter -= 1;
            return;
        }
        if rng.gen::<f64>() >= cfg.keep_probability {
            self.selections = select_resources(cfg, ledger, rng);
        }
        self.reselection_counter = draw_counter(rng);
    }
}

/// Reselection counter, uniform over [5, 15] periods.
fn draw_counter(rng: &mut impl Rng) -> u32 {
    rng.gen_range(5..=15)
}

/// Number of subchannels shared by two transmissions of `width`
/// subchannels starting at `a` and `b`.
pub fn subchannel_overlap(a: u32, b: u32, width: u32) -> u32 {
    let lo = a.max(b);
    let hi = (a + width).min(b + width);
    hi.saturating_sub(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::from_toml_str("", &[]).unwrap()
    }

    #[test]
    fn empty_ledger_selection_is_valid() {
        let c = cfg();
        let ledger = SensingLedger::new(c.slots_per_period(), c.num_subchannels);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let sel = select_resources(&c, &ledger, &mut rng);
        assert_eq!(sel.len(), 3);
        for r in &sel {
            assert!(r.slot < c.slots_per_period());
            assert!(r.subchannel_start + c.subchannels_per_packet <= c.num_subchannels);
        }
        // Distinct slots across HARQ attempts.
        let mut slots: Vec<u64> = sel.iter().map(|r| r.slot).collect();
        slots.dedup();
        slots.sort_unstable();
        slots.dedup();
        assert_eq!(slots.len(), 3);
    }

    #[test]
    fn keep_probability_one_freezes_selection() {
        let mut c = cfg();
        c.keep_probability = 1.0;
        let ledger = SensingLedger::new(c.slots_per_period(), c.num_subchannels);
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut agent = SpsAgent::new(1, &c, &ledger, &mut rng);
        let initial = agent.selections.clone();
        for _ in 0..200 {
            agent.period_tick(&c, &ledger, &mut rng);
        }
        assert_eq!(agent.selections, initial);
    }

    #[test]
    fn all_hot_resources_fall_back_to_quietest_fifth() {
        let c = cfg();
        let mut ledger = SensingLedger::new(c.slots_per_period(), c.num_subchannels);
        // Everything loud, but slots 0..10 quieter than the rest.
        for slot in 0..c.slots_per_period() {
            for sub in 0..c.num_subchannels {
                let p = if slot < 10 { 1e-9 } else { 1e-6 };
                ledger.observe(slot, sub, p);
            }
        }
        ledger.roll_period();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..50 {
            let sel = select_resources(&c, &ledger, &mut rng);
            assert_eq!(sel.len(), 3);
            // 20% of 800 resources = 160 quietest = slots 0..40.
            for r in &sel {
                assert!(r.slot < 40, "selected hot slot {}", r.slot);
            }
        }
    }

    #[test]
    fn ledger_roll_and_rssi() {
        let c = cfg();
        let mut ledger = SensingLedger::new(c.slots_per_period(), c.num_subchannels);
        ledger.observe(7, 1, 2.0e-9);
        ledger.observe(7, 2, 3.0e-9);
        let res = Resource { slot: 7, subchannel_start: 1 };
        // Not visible until the period rolls.
        assert_eq!(ledger.resource_rssi_mw(res, 2), 0.0);
        ledger.roll_period();
        assert!((ledger.resource_rssi_mw(res, 2) - 5.0e-9).abs() < 1e-24);
        ledger.roll_period();
        assert_eq!(ledger.resource_rssi_mw(res, 2), 0.0);
    }

    #[test]
    fn overlap_fractions() {
        assert_eq!(subchannel_overlap(0, 0, 2), 2);
        assert_eq!(subchannel_overlap(0, 1, 2), 1);
        assert_eq!(subchannel_overlap(0, 2, 2), 0);
        assert_eq!(subchannel_overlap(3, 1, 2), 0);
        assert_eq!(subchannel_overlap(2, 1, 2), 1);
    }
}
