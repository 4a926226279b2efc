//! Per-block resource accounting.
//!
//! A flip-flop listed in an `ffpair` is one resource even though it appears
//! as two graph nodes. It is charged to the block owning its D port.
//! Unpaired D or Q ports count as one flip-flop each and are flagged.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use indexmap::IndexMap;

use crate::annotation::{BlockKey, BlockRegistry};
use crate::error::AnalysisError;
use crate::netlist::{CellKind, Netlist};

/// FPGA resource categories used for area and power accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResourceKind {
    Lut1,
    Lut2,
    Lut3,
    Lut4,
    Lut5,
    Lut6,
    Ff,
    Clk,
    In,
    Out,
    MemIn,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 11] = [
        ResourceKind::Lut1,
        ResourceKind::Lut2,
        ResourceKind::Lut3,
        ResourceKind::Lut4,
        ResourceKind::Lut5,
        ResourceKind::Lut6,
        ResourceKind::Ff,
        ResourceKind::Clk,
        ResourceKind::In,
        ResourceKind::Out,
        ResourceKind::MemIn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ResourceKind::Lut1 => "LUT1",
            ResourceKind::Lut2 => "LUT2",
            ResourceKind::Lut3 => "LUT3",
            ResourceKind::Lut4 => "LUT4",
            ResourceKind::Lut5 => "LUT5",
            ResourceKind::Lut6 => "LUT6",
            ResourceKind::Ff => "FF",
            ResourceKind::Clk => "CLK",
            ResourceKind::In => "IN",
            ResourceKind::Out => "OUT",
            ResourceKind::MemIn => "MEM_IN",
        }
    }

    pub fn from_name(name: &str) -> Option<ResourceKind> {
        ResourceKind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn of_cell(kind: CellKind) -> ResourceKind {
        match kind {
            CellKind::Lut1 => ResourceKind::Lut1,
            CellKind::Lut2 => ResourceKind::Lut2,
            CellKind::Lut3 => ResourceKind::Lut3,
            CellKind::Lut4 => ResourceKind::Lut4,
            CellKind::Lut5 => ResourceKind::Lut5,
            CellKind::Lut6 => ResourceKind::Lut6,
            CellKind::FfD | CellKind::FfQ => ResourceKind::Ff,
            CellKind::Clk => ResourceKind::Clk,
            CellKind::In => ResourceKind::In,
            CellKind::Out => ResourceKind::Out,
            CellKind::MemIn => ResourceKind::MemIn,
        }
    }

    pub fn lut_inputs(self) -> Option<u8> {
        match self {
            ResourceKind::Lut1 => Some(1),
            ResourceKind::Lut2 => Some(2),
            ResourceKind::Lut3 => Some(3),
            ResourceKind::Lut4 => Some(4),
            ResourceKind::Lut5 => Some(5),
            ResourceKind::Lut6 => Some(6),
            _ => None,
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One physical resource, identified by the cell that represents it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resource<'a> {
    pub cell: &'a str,
    pub kind: ResourceKind,
    pub unpaired_ff: bool,
}

/// Flattens cells into resources: paired Q ports are folded into their D port.
pub fn resources(netlist: &Netlist) -> Vec<Resource<'_>> {
    let paired_q: HashSet<&str> = netlist.ff_pairs().iter().map(|p| p.q.as_str()).collect();
    let paired_d: HashSet<&str> = netlist.ff_pairs().iter().map(|p| p.d.as_str()).collect();
    netlist
        .cells()
        .iter()
        .filter(|c| !(c.kind == CellKind::FfQ && paired_q.contains(c.id.as_str())))
        .map(|c| Resource {
            cell: &c.id,
            kind: ResourceKind::of_cell(c.kind),
            unpaired_ff: match c.kind {
                CellKind::FfD => !paired_d.contains(c.id.as_str()),
                CellKind::FfQ => true,
                _ => false,
            },
        })
        .collect()
}

/// Non-negative weight per resource kind; missing kinds weigh 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaWeights {
    weights: BTreeMap<ResourceKind, f64>,
}

impl AreaWeights {
    /// Panics on a negative or non-finite weight.
    pub fn new(weights: BTreeMap<ResourceKind, f64>) -> Self {
        assert!(
            weights.values().all(|w| w.is_finite() && *w >= 0.0),
            "area weights must be finite and non-negative"
        );
        AreaWeights { weights }
    }

    pub fn weight(&self, kind: ResourceKind) -> f64 {
        self.weights.get(&kind).copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, factor: f64) -> AreaWeights {
        AreaWeights::new(self.weights.iter().map(|(k, w)| (*k, w * factor)).collect())
    }
}

impl Default for AreaWeights {
    /// Every LUT size and the flip-flop weigh 1; ports weigh 0.
    fn default() -> Self {
        let mut weights = BTreeMap::new();
        for kind in ResourceKind::ALL {
            let w = if kind.lut_inputs().is_some() || kind == ResourceKind::Ff {
                1.0
            } else {
                0.0
            };
            weights.insert(kind, w);
        }
        AreaWeights { weights }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlockArea {
    /// Only non-zero counts are stored.
    pub counts: BTreeMap<ResourceKind, u64>,
    pub weighted_area: f64,
    pub unpaired_ff: u64,
}

impl BlockArea {
    pub fn count(&self, kind: ResourceKind) -> u64 {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn total_count(&self) -> u64 {
        self.counts.values().sum()
    }

    fn add(&mut self, kind: ResourceKind, unpaired: bool) {
        *self.counts.entry(kind).or_insert(0) += 1;
        if unpaired {
            self.unpaired_ff += 1;
        }
    }

    fn weigh(&mut self, weights: &AreaWeights) {
        self.weighted_area = self
            .counts
            .iter()
            .map(|(k, n)| *n as f64 * weights.weight(*k))
            .sum();
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AreaReport {
    pub per_block: IndexMap<BlockKey, BlockArea>,
    pub totals: BlockArea,
}

/// Resource counts per block (in registry row order) and for the whole netlist.
pub fn area_report(
    netlist: &Netlist,
    registry: &BlockRegistry,
    weights: &AreaWeights,
) -> Result<AreaReport, AnalysisError> {
    let owners = registry.owners();
    for id in owners.keys() {
        if netlist.cell(id).is_none() {
            return Err(AnalysisError::RegistryMismatch((*id).to_owned()));
        }
    }

    let mut per_block: IndexMap<BlockKey, BlockArea> = registry
        .keys()
        .into_iter()
        .map(|k| (k, BlockArea::default()))
        .collect();
    for res in resources(netlist) {
        let owner = owners
            .get(res.cell)
            .ok_or_else(|| AnalysisError::RegistryMismatch(res.cell.to_owned()))?;
        per_block
            .get_mut(owner)
            .expect("registry keys cover every owner")
            .add(res.kind, res.unpaired_ff);
    }

    let mut totals = BlockArea::default();
    for area in per_block.values_mut() {
        area.weigh(weights);
        for (k, n) in &area.counts {
            *totals.counts.entry(*k).or_insert(0) += n;
        }
        totals.unpaired_ff += area.unpaired_ff;
    }
    totals.weigh(weights);
    Ok(AreaReport { per_block, totals })
}
