//! Recovering architectural blocks from cell-name prefixes.
//!
//! A cell named `cpu.exec__add_carry__x` belongs to block `cpu.exec`: the
//! prefix before the first `__` is the block label, and `.` separates levels
//! of the block hierarchy. Cells without `__` were not traceable through
//! synthesis and land in the unannotated pseudo-block.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;

use crate::error::AnnotationError;
use crate::netlist::Netlist;

pub const LABEL_DELIMITER: &str = "__";
pub const UNANNOTATED: &str = "(unannotated)";

/// Hierarchical block label such as `cpu.exec`. Ordered by its rendered form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockLabel(String);

impl BlockLabel {
    pub fn parse(text: &str) -> Result<BlockLabel, &'static str> {
        if text.is_empty() {
            return Err("empty label");
        }
        for segment in text.split('.') {
            if segment.is_empty() {
                return Err("empty segment");
            }
            if !segment
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || b == b'_')
            {
                return Err("illegal character");
            }
            if segment.contains(LABEL_DELIMITER) {
                return Err("segment contains `__`");
            }
        }
        Ok(BlockLabel(text.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('.')
    }

    pub fn depth(&self) -> usize {
        self.segments().count()
    }

    /// The label cut to its first `depth` segments (`depth >= 1`).
    pub fn truncate(&self, depth: usize) -> BlockLabel {
        let depth = depth.max(1);
        match self.0.match_indices('.').nth(depth - 1) {
            Some((at, _)) => BlockLabel(self.0[..at].to_owned()),
            None => self.clone(),
        }
    }
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Row key for reports: a real block or the unannotated pseudo-block.
/// The pseudo-block sorts after every label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKey {
    Block(BlockLabel),
    Unannotated,
}

impl BlockKey {
    pub fn label(&self) -> Option<&BlockLabel> {
        match self {
            BlockKey::Block(l) => Some(l),
            BlockKey::Unannotated => None,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            BlockKey::Block(l) => l.as_str(),
            BlockKey::Unannotated => UNANNOTATED,
        }
    }
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Block label carried by `cell_id`, if any.
pub fn extract_block_label(cell_id: &str) -> Result<Option<BlockLabel>, AnnotationError> {
    let Some((prefix, _)) = cell_id.split_once(LABEL_DELIMITER) else {
        return Ok(None);
    };
    BlockLabel::parse(prefix)
        .map(Some)
        .map_err(|reason| AnnotationError::MalformedLabel {
            cell: cell_id.to_owned(),
            label: prefix.to_owned(),
            reason,
        })
}

/// Partition of a netlist's cells into blocks plus the unannotated remainder.
///
/// Blocks are kept in discovery order: the order in which their labels first
/// appear when walking cell ids in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockRegistry {
    blocks: IndexMap<BlockLabel, BTreeSet<String>>,
    unannotated: BTreeSet<String>,
}

impl BlockRegistry {
    pub fn blocks(&self) -> &IndexMap<BlockLabel, BTreeSet<String>> {
        &self.blocks
    }

    pub fn unannotated(&self) -> &BTreeSet<String> {
        &self.unannotated
    }

    pub fn cells_of(&self, label: &BlockLabel) -> Option<&BTreeSet<String>> {
        self.blocks.get(label)
    }

    pub fn cells_of_key(&self, key: &BlockKey) -> Option<&BTreeSet<String>> {
        match key {
            BlockKey::Block(l) => self.blocks.get(l),
            BlockKey::Unannotated => Some(&self.unannotated),
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = &BlockLabel> {
        self.blocks.keys()
    }

    /// Report rows: every block in discovery order, then the pseudo-block
    /// unless the registry covers no cells at all.
    pub fn keys(&self) -> Vec<BlockKey> {
        let mut keys: Vec<BlockKey> = self.blocks.keys().cloned().map(BlockKey::Block).collect();
        if self.cell_count() > 0 {
            keys.push(BlockKey::Unannotated);
        }
        keys
    }

    pub fn cell_count(&self) -> usize {
        self.blocks.values().map(BTreeSet::len).sum::<usize>() + self.unannotated.len()
    }

    /// Share of cells that carry no annotation, in `[0, 1]`.
    pub fn unannotated_fraction(&self) -> f64 {
        match self.cell_count() {
            0 => 0.0,
            n => self.unannotated.len() as f64 / n as f64,
        }
    }

    /// Owner of every cell.
    pub fn owners(&self) -> std::collections::HashMap<&str, BlockKey> {
        let mut map = std::collections::HashMap::with_capacity(self.cell_count());
        for (label, cells) in &self.blocks {
            for c in cells {
                map.insert(c.as_str(), BlockKey::Block(label.clone()));
            }
        }
        for c in &self.unannotated {
            map.insert(c.as_str(), BlockKey::Unannotated);
        }
        map
    }
}

pub fn build_registry(netlist: &Netlist) -> Result<BlockRegistry, AnnotationError> {
    let mut registry = BlockRegistry::default();
    // cells() is sorted by id, which fixes discovery order.
    for cell in netlist.cells() {
        match extract_block_label(&cell.id)? {
            Some(label) => {
                registry
                    .blocks
                    .entry(label)
                    .or_default()
                    .insert(cell.id.clone());
            }
            None => {
                registry.unannotated.insert(cell.id.clone());
            }
        }
    }
    Ok(registry)
}

/// Collapses the hierarchy below `depth`, unioning the cells of labels that
/// become equal. The pseudo-block is left alone.
pub fn group_to_depth(registry: &BlockRegistry, depth: usize) -> BlockRegistry {
    let mut blocks: IndexMap<BlockLabel, BTreeSet<String>> = IndexMap::new();
    for (label, cells) in &registry.blocks {
        blocks
            .entry(label.truncate(depth))
            .or_default()
            .extend(cells.iter().cloned());
    }
    BlockRegistry {
        blocks,
        unannotated: registry.unannotated.clone(),
    }
}
