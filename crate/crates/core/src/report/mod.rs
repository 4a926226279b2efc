//! Rendering analysis results as text tables, CSV and structured JSON.
//!
//! All three renderers share the number formatting below, so a value reads
//! the same in every format: delays are integer picoseconds, power figures
//! and weighted area carry three decimals, switching factors four.

mod csv;
mod structured;
mod text;

pub use self::csv::{render_csv, CSV_HEADER};
pub use self::structured::{
    parse_structured, render_document, render_structured, StructuredError, StructuredReport, SCHEMA,
};
pub use self::text::render_text;

use std::collections::BTreeMap;

use crate::annotation::BlockKey;
use crate::area::AreaReport;
use crate::delay::DelayReport;
use crate::power::PowerScore;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Metadata {
    pub tool_version: String,
    /// Device profile applied to LUT delays, if any.
    pub device: Option<String>,
    pub group_depth: Option<usize>,
    /// Input role (`netlist`, `profile`, ...) to SHA-256 hex digest.
    pub inputs: BTreeMap<String, String>,
}

/// Everything one run produced. Absent sections were not requested.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CombinedReport {
    pub metadata: Metadata,
    pub area: Option<AreaReport>,
    pub delay: Option<DelayReport>,
    pub power: Option<PowerScore>,
}

impl CombinedReport {
    /// Row keys of the first present section; every section shares them.
    pub fn block_keys(&self) -> Vec<BlockKey> {
        if let Some(a) = &self.area {
            a.per_block.keys().cloned().collect()
        } else if let Some(d) = &self.delay {
            d.per_block.keys().cloned().collect()
        } else if let Some(p) = &self.power {
            p.per_block.keys().cloned().collect()
        } else {
            Vec::new()
        }
    }

    /// True when all present sections list the same rows in the same order.
    pub fn is_consistent(&self) -> bool {
        let keys = self.block_keys();
        let same = |other: Vec<&BlockKey>| {
            other.len() == keys.len() && other.iter().zip(&keys).all(|(a, b)| *a == b)
        };
        self.area
            .as_ref()
            .map_or(true, |a| same(a.per_block.keys().collect()))
            && self
                .delay
                .as_ref()
                .map_or(true, |d| same(d.per_block.keys().collect()))
            && self
                .power
                .as_ref()
                .map_or(true, |p| same(p.per_block.keys().collect()))
    }

    /// 1-based power rank of a row, real blocks only.
    pub(crate) fn rank(&self, key: &BlockKey) -> Option<usize> {
        let power = self.power.as_ref()?;
        key.label().and_then(|l| power.rank_of(l)).map(|r| r + 1)
    }

    pub(crate) fn is_critical(&self, key: &BlockKey) -> bool {
        match (&self.delay, key.label()) {
            (Some(d), Some(l)) => d.critical_blocks.contains(l),
            _ => false,
        }
    }
}

/// Empty float sums are `-0.0`; print them as `0`.
pub(crate) fn positive_zero(x: f64) -> f64 {
    x + 0.0
}

pub(crate) fn fmt_power(x: f64) -> String {
    format!("{:.3}", positive_zero(x))
}

pub(crate) fn fmt_area(x: f64) -> String {
    format!("{:.3}", positive_zero(x))
}

pub(crate) fn fmt_alpha(x: f64) -> String {
    format!("{:.4}", positive_zero(x))
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::annotation::build_registry;
    use crate::area::{area_report, AreaWeights};
    use crate::delay::{delay_report, BlockDelayScope};
    use crate::fixtures::gen_gcd;
    use crate::netlist::{CircuitGraph, Netlist};
    use crate::power::{power_score, PowerModel};

    pub fn combined(netlist: &Netlist, with_power: bool) -> CombinedReport {
        let registry = build_registry(netlist).unwrap();
        let graph = CircuitGraph::new(netlist).unwrap();
        let profile = crate::fixtures::gcd_profile();
        CombinedReport {
            metadata: Metadata {
                tool_version: "0.1.0".into(),
                device: Some("spartan6".into()),
                group_depth: None,
                inputs: BTreeMap::from([("netlist".into(), "00ff".into())]),
            },
            area: Some(area_report(netlist, &registry, &AreaWeights::default()).unwrap()),
            delay: Some(delay_report(&graph, &registry, BlockDelayScope::default()).unwrap()),
            power: with_power.then(|| {
                power_score(netlist, &registry, &PowerModel::default(), &profile).unwrap()
            }),
        }
    }

    pub fn gcd_report() -> CombinedReport {
        combined(&gen_gcd(2).unwrap().0, true)
    }
}
