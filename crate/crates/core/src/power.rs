//! Relative per-block power score.
//!
//! `P_avg = P_s + P_D * alpha * f`, where `P_s` is the block's static power
//! from its resource census, `P_D` its switching energy per active cycle, and
//! `alpha` the fraction of profiled cycles in which the block is active.
//!
//! A block is active in cycle `t` when one of its own rules fires at `t`, or
//! when a rule that writes state the block reads fired at `t - 1`. Every
//! write is treated as a value change. Several causes in one cycle still make
//! one active cycle; the raw cause count is reported as `events`.
//!
//! The score compares blocks within one device; it is not an absolute power
//! figure and is not comparable across device families.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::annotation::{BlockKey, BlockLabel, BlockRegistry};
use crate::area::{resources, ResourceKind};
use crate::error::AnalysisError;
use crate::netlist::Netlist;

pub const SCORE_NOTICE: &str =
    "relative power score: compare blocks within one device only, never across devices";

/// Cell power characterization and operating frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerModel {
    /// Static power per resource, microwatts.
    pub static_uw: BTreeMap<ResourceKind, f64>,
    /// Switching energy per resource per active cycle, picojoules.
    pub dynamic_pj: BTreeMap<ResourceKind, f64>,
    pub frequency_hz: f64,
}

impl Default for PowerModel {
    /// Placeholder coefficients: LUT_k 0.1k uW / 0.5k pJ, FF 0.2 uW / 1.0 pJ,
    /// ports free; 100 MHz.
    fn default() -> Self {
        let mut static_uw = BTreeMap::new();
        let mut dynamic_pj = BTreeMap::new();
        for kind in ResourceKind::ALL {
            let (s, d) = match (kind, kind.lut_inputs()) {
                (_, Some(k)) => (0.1 * k as f64, 0.5 * k as f64),
                (ResourceKind::Ff, None) => (0.2, 1.0),
                _ => (0.0, 0.0),
            };
            static_uw.insert(kind, s);
            dynamic_pj.insert(kind, d);
        }
        PowerModel {
            static_uw,
            dynamic_pj,
            frequency_hz: 100e6,
        }
    }
}

impl PowerModel {
    pub fn static_coefficient(&self, kind: ResourceKind) -> f64 {
        self.static_uw.get(&kind).copied().unwrap_or(0.0)
    }

    pub fn dynamic_coefficient(&self, kind: ResourceKind) -> f64 {
        self.dynamic_pj.get(&kind).copied().unwrap_or(0.0)
    }
}

/// Profiled rule firings plus the state dependencies between blocks.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActivityProfile {
    pub cycles: u64,
    /// Rule id to its owning block.
    pub rule_block: BTreeMap<String, BlockLabel>,
    /// Rule id to its sorted, distinct firing cycles, each below `cycles`.
    pub firings: BTreeMap<String, Vec<u64>>,
    /// `(rule, state)`: the rule writes the state when it fires.
    pub writes: BTreeSet<(String, String)>,
    /// `(block, state)`: the block depends on the state.
    pub reads: BTreeSet<(BlockLabel, String)>,
}

impl ActivityProfile {
    /// Every block named by a rule or a read.
    pub fn blocks(&self) -> BTreeSet<BlockLabel> {
        self.rule_block
            .values()
            .cloned()
            .chain(self.reads.iter().map(|(b, _)| b.clone()))
            .collect()
    }

    /// Same profile with block labels truncated to `depth` segments.
    pub fn grouped(&self, depth: usize) -> ActivityProfile {
        ActivityProfile {
            cycles: self.cycles,
            rule_block: self
                .rule_block
                .iter()
                .map(|(r, b)| (r.clone(), b.truncate(depth)))
                .collect(),
            firings: self.firings.clone(),
            writes: self.writes.clone(),
            reads: self
                .reads
                .iter()
                .map(|(b, s)| (b.truncate(depth), s.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Activity {
    pub active_cycles: u64,
    pub cycles: u64,
    /// Causes before per-cycle capping: own firings plus next-cycle wake-ups.
    pub events: u64,
    /// The block is unknown to the profile; alpha is 0.
    pub absent: bool,
}

impl Activity {
    pub fn alpha(&self) -> f64 {
        if self.cycles == 0 {
            0.0
        } else {
            self.active_cycles as f64 / self.cycles as f64
        }
    }
}

/// Sorted active cycles of `block` and the uncapped event count.
pub fn active_cycles(block: &BlockLabel, profile: &ActivityProfile) -> (Vec<u64>, u64) {
    let mut cycles: Vec<u64> = Vec::new();
    for (rule, owner) in &profile.rule_block {
        if owner == block {
            if let Some(f) = profile.firings.get(rule) {
                cycles.extend_from_slice(f);
            }
        }
    }
    let read: BTreeSet<&str> = profile
        .reads
        .iter()
        .filter(|(b, _)| b == block)
        .map(|(_, s)| s.as_str())
        .collect();
    for (rule, state) in &profile.writes {
        if !read.contains(state.as_str()) {
            continue;
        }
        if let Some(f) = profile.firings.get(rule) {
            cycles.extend(f.iter().map(|t| t + 1).filter(|&t| t < profile.cycles));
        }
    }
    let events = cycles.len() as u64;
    cycles.sort_unstable();
    cycles.dedup();
    (cycles, events)
}

pub fn switching_factor(block: &BlockLabel, profile: &ActivityProfile) -> Activity {
    let known = profile.rule_block.values().any(|b| b == block)
        || profile.reads.iter().any(|(b, _)| b == block);
    if !known {
        return Activity {
            cycles: profile.cycles,
            absent: true,
            ..Activity::default()
        };
    }
    let (active, events) = active_cycles(block, profile);
    Activity {
        active_cycles: active.len() as u64,
        cycles: profile.cycles,
        events,
        absent: false,
    }
}

fn block_resources(
    netlist: &Netlist,
    registry: &BlockRegistry,
    key: &BlockKey,
) -> Result<Vec<ResourceKind>, AnalysisError> {
    let cells = registry
        .cells_of_key(key)
        .ok_or_else(|| AnalysisError::UnknownBlock(key.name().to_owned()))?;
    Ok(resources(netlist)
        .into_iter()
        .filter(|r| cells.contains(r.cell))
        .map(|r| r.kind)
        .collect())
}

/// `P_s` of a block in microwatts; paired flip-flops count once.
pub fn static_power(
    netlist: &Netlist,
    registry: &BlockRegistry,
    key: &BlockKey,
    model: &PowerModel,
) -> Result<f64, AnalysisError> {
    Ok(block_resources(netlist, registry, key)?
        .into_iter()
        .map(|k| model.static_coefficient(k))
        .sum())
}

/// `P_D` of a block in picojoules per active cycle.
pub fn dynamic_coefficient(
    netlist: &Netlist,
    registry: &BlockRegistry,
    key: &BlockKey,
    model: &PowerModel,
) -> Result<f64, AnalysisError> {
    Ok(block_resources(netlist, registry, key)?
        .into_iter()
        .map(|k| model.dynamic_coefficient(k))
        .sum())
}

/// Dynamic part of the score in microwatts: pJ * (1/cycle) * Hz = 1e-12 W = 1e-6 uW.
pub fn dynamic_power_uw(dynamic_pj: f64, alpha: f64, frequency_hz: f64) -> f64 {
    dynamic_pj * alpha * (frequency_hz / 1e6)
}

/// `P_avg` in microwatts.
pub fn average_power_uw(static_uw: f64, dynamic_pj: f64, alpha: f64, frequency_hz: f64) -> f64 {
    static_uw + dynamic_power_uw(dynamic_pj, alpha, frequency_hz)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlockPower {
    pub static_uw: f64,
    pub dynamic_pj: f64,
    pub activity: Activity,
    pub alpha: f64,
    pub dynamic_uw: f64,
    pub avg_uw: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerScore {
    pub per_block: IndexMap<BlockKey, BlockPower>,
    /// Real blocks by descending `avg_uw`, ties by label.
    pub ranking: Vec<BlockLabel>,
    pub frequency_hz: f64,
}

impl PowerScore {
    pub fn rank_of(&self, label: &BlockLabel) -> Option<usize> {
        self.ranking.iter().position(|l| l == label)
    }
}

pub fn power_score(
    netlist: &Netlist,
    registry: &BlockRegistry,
    model: &PowerModel,
    profile: &ActivityProfile,
) -> Result<PowerScore, AnalysisError> {
    let owners = registry.owners();
    let mut per_kind: HashMap<BlockKey, Vec<ResourceKind>> = HashMap::new();
    for r in resources(netlist) {
        let owner = owners
            .get(r.cell)
            .ok_or_else(|| AnalysisError::RegistryMismatch(r.cell.to_owned()))?;
        per_kind.entry(owner.clone()).or_default().push(r.kind);
    }

    let keys = registry.keys();
    let blocks: Vec<BlockPower> = keys
        .par_iter()
        .map(|key| {
            let kinds = per_kind.get(key).map(Vec::as_slice).unwrap_or(&[]);
            let static_uw: f64 = kinds.iter().map(|k| model.static_coefficient(*k)).sum();
            let dynamic_pj: f64 = kinds.iter().map(|k| model.dynamic_coefficient(*k)).sum();
            let activity = match key {
                BlockKey::Block(label) => switching_factor(label, profile),
                BlockKey::Unannotated => Activity {
                    cycles: profile.cycles,
                    absent: true,
                    ..Activity::default()
                },
            };
            let alpha = activity.alpha();
            let dynamic_uw = dynamic_power_uw(dynamic_pj, alpha, model.frequency_hz);
            BlockPower {
                static_uw,
                dynamic_pj,
                activity,
                alpha,
                dynamic_uw,
                avg_uw: static_uw + dynamic_uw,
            }
        })
        .collect();
    let per_block: IndexMap<BlockKey, BlockPower> = keys.into_iter().zip(blocks).collect();

    let mut ranking: Vec<(&BlockLabel, f64)> = per_block
        .iter()
        .filter_map(|(k, p)| k.label().map(|l| (l, p.avg_uw)))
        .collect();
    ranking.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let ranking = ranking.into_iter().map(|(l, _)| l.clone()).collect();

    Ok(PowerScore {
        per_block,
        ranking,
        frequency_hz: model.frequency_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::build_registry;
    use crate::netlist::{Cell, CellKind, FfPair};

    fn label(s: &str) -> BlockLabel {
        BlockLabel::parse(s).unwrap()
    }

    fn gcd_profile() -> ActivityProfile {
        let mut p = ActivityProfile {
            cycles: 10,
            ..ActivityProfile::default()
        };
        p.rule_block.insert("swap".into(), label("swap"));
        p.rule_block.insert("subtract".into(), label("subtract"));
        p.firings.insert("swap".into(), vec![1, 3]);
        p.firings.insert("subtract".into(), vec![2, 4, 5]);
        for (r, s) in [("swap", "x"), ("swap", "y"), ("subtract", "y")] {
            p.writes.insert((r.into(), s.into()));
        }
        for s in ["x", "y"] {
            p.reads.insert((label("subtract"), s.into()));
        }
        p
    }

    #[test]
    fn gcd_subtract_alpha_is_one_half() {
        let p = gcd_profile();
        let (cycles, events) = active_cycles(&label("subtract"), &p);
        assert_eq!(cycles, vec![2, 3, 4, 5, 6]);
        // own {2,4,5}; swap->x,y at {1,3} read twice -> 4 wake-ups; subtract->y -> {3,5,6}
        assert_eq!(events, 3 + 4 + 3);
        let a = switching_factor(&label("subtract"), &p);
        assert_eq!(a.alpha(), 0.5);
        // swap reads nothing, so only its own firings count.
        assert_eq!(switching_factor(&label("swap"), &p).alpha(), 0.2);
    }

    #[test]
    fn unknown_block_has_zero_alpha() {
        let a = switching_factor(&label("nobody"), &gcd_profile());
        assert!(a.absent);
        assert_eq!(a.alpha(), 0.0);
    }

    #[test]
    fn last_cycle_write_does_not_wake_anyone() {
        let mut p = gcd_profile();
        p.firings.insert("swap".into(), vec![9]);
        p.firings.insert("subtract".into(), vec![]);
        let (cycles, _) = active_cycles(&label("subtract"), &p);
        assert!(cycles.is_empty());
    }

    #[test]
    fn always_firing_rule_saturates() {
        let mut p = gcd_profile();
        p.firings.insert("swap".into(), (0..10).collect());
        assert_eq!(switching_factor(&label("swap"), &p).alpha(), 1.0);
    }

    #[test]
    fn no_firings_no_activity() {
        let mut p = gcd_profile();
        p.firings.clear();
        for b in p.blocks() {
            assert_eq!(switching_factor(&b, &p).alpha(), 0.0);
        }
    }

    #[test]
    fn average_power_substitution() {
        let avg = average_power_uw(2.0, 10.0, 0.3, 100e6);
        assert_eq!(format!("{avg:.3}"), "302.000");
        assert_eq!(average_power_uw(2.0, 10.0, 0.0, 100e6), 2.0);
    }

    fn small_netlist() -> Netlist {
        let mut cells = vec![];
        for i in 0..3 {
            cells.push(Cell::new(format!("b__l{i}"), CellKind::Lut6, 1));
        }
        for i in 0..5 {
            cells.push(Cell::new(format!("c__m{i}"), CellKind::Lut4, 1));
        }
        let mut pairs = vec![];
        for i in 0..2 {
            cells.push(Cell::new(format!("b__d{i}"), CellKind::FfD, 0));
            cells.push(Cell::new(format!("b__q{i}"), CellKind::FfQ, 0));
            pairs.push(FfPair::new(format!("b__d{i}"), format!("b__q{i}")));
        }
        Netlist::new(cells, vec![], pairs)
    }

    #[test]
    fn static_and_dynamic_sums() {
        let n = small_netlist();
        let r = build_registry(&n).unwrap();
        let mut m = PowerModel::default();
        m.static_uw.insert(ResourceKind::Lut6, 0.5);
        m.static_uw.insert(ResourceKind::Ff, 0.25);
        m.dynamic_pj.insert(ResourceKind::Lut4, 2.0);
        let b = BlockKey::Block(label("b"));
        let c = BlockKey::Block(label("c"));
        assert_eq!(static_power(&n, &r, &b, &m).unwrap(), 2.0);
        assert_eq!(dynamic_coefficient(&n, &r, &c, &m).unwrap(), 10.0);
        assert_eq!(
            static_power(&n, &r, &BlockKey::Unannotated, &m).unwrap(),
            0.0
        );
        assert!(matches!(
            static_power(&n, &r, &BlockKey::Block(label("zz")), &m),
            Err(AnalysisError::UnknownBlock(_))
        ));
    }

    #[test]
    fn zero_activity_ranks_by_static_power() {
        let n = small_netlist();
        let r = build_registry(&n).unwrap();
        let m = PowerModel::default();
        let s = power_score(&n, &r, &m, &ActivityProfile::default()).unwrap();
        let mut by_static: Vec<_> = s
            .per_block
            .iter()
            .filter_map(|(k, p)| k.label().map(|l| (l.clone(), p.static_uw)))
            .collect();
        by_static.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let expected: Vec<_> = by_static.into_iter().map(|(l, _)| l).collect();
        assert_eq!(s.ranking, expected);
    }
}
