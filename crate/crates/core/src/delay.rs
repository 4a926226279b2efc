//! Block-level delay analysis.
//!
//! For each block the cells it owns seed a search for every combinational
//! path (source port to sink port) that crosses the block. The union of those
//! paths is split into weakly connected sets, and the heaviest path over all
//! sets is the block's delay. Two weightings are supported:
//!
//! * [`WeightingMode::SystemDelay`]: every cell and net carries its delay, so
//!   the result is the longest system path the block takes part in.
//! * [`WeightingMode::BlockDelay`]: only the block's own cells (and, unless
//!   [`BlockDelayScope::NodesOnly`], nets with both ends inside the block)
//!   carry weight, so the result is the largest share of any crossing path
//!   that is due to the block itself.
//!
//! Equal-weight paths are resolved to the lexicographically smallest cell-id
//! sequence. All arithmetic is integer picoseconds.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::annotation::{BlockKey, BlockLabel, BlockRegistry};
use crate::error::AnalysisError;
use crate::netlist::{CircuitGraph, Picoseconds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightingMode {
    SystemDelay,
    BlockDelay,
}

/// Which nets count toward [`WeightingMode::BlockDelay`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BlockDelayScope {
    /// Block cells plus nets whose both endpoints are block cells.
    #[default]
    WithIntraBlockNets,
    /// Block cells only.
    NodesOnly,
}

impl BlockDelayScope {
    pub fn name(self) -> &'static str {
        match self {
            BlockDelayScope::WithIntraBlockNets => "nodes+intra-nets",
            BlockDelayScope::NodesOnly => "nodes-only",
        }
    }
}

/// A weighted path and its decomposition. The empty result (no path) has
/// zero delays and an empty cell list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathResult {
    pub total_delay: Picoseconds,
    pub logic_delay: Picoseconds,
    pub network_delay: Picoseconds,
    pub path: Vec<String>,
}

impl PathResult {
    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    /// `Less` when `self` should win: heavier, then lexicographically smaller.
    pub fn preference(&self, other: &PathResult) -> Ordering {
        other.total_delay.cmp(&self.total_delay).then_with(|| {
            match (self.is_empty(), other.is_empty()) {
                (true, false) => Ordering::Greater,
                (false, true) => Ordering::Less,
                _ => self.path.cmp(&other.path),
            }
        })
    }

    /// The preferred of the two results.
    pub fn best(self, other: PathResult) -> PathResult {
        if other.preference(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

/// Cells and nets of a graph region, as sorted cell indices of a [`CircuitGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Subgraph {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Subgraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_ids(&self, graph: &CircuitGraph<'_>) -> Vec<String> {
        self.nodes.iter().map(|&v| graph.id(v).to_owned()).collect()
    }

    pub fn edge_ids(&self, graph: &CircuitGraph<'_>) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(u, v)| (graph.id(u).to_owned(), graph.id(v).to_owned()))
            .collect()
    }
}

/// The registry's cell set for `key`.
pub fn annotated_nodes<'r>(
    registry: &'r BlockRegistry,
    key: &BlockKey,
) -> Result<&'r BTreeSet<String>, AnalysisError> {
    registry
        .cells_of_key(key)
        .ok_or_else(|| AnalysisError::UnknownBlock(key.name().to_owned()))
}

fn closure(
    graph: &CircuitGraph<'_>,
    starts: impl Iterator<Item = usize>,
    forward: bool,
) -> Vec<bool> {
    let mut seen = vec![false; graph.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for s in starts {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = if forward {
            graph.successors(u)
        } else {
            graph.predecessors(u)
        };
        for &(w, _) in next {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Union of every source-to-sink path that contains at least one seed cell.
///
/// A net `u -> v` lies on such a path either before the seed (some source
/// reaches `u` and `v` reaches a seed that reaches a sink) or after it (a
/// seed reachable from a source reaches `u` and `v` reaches a sink).
pub fn expand_paths(graph: &CircuitGraph<'_>, seed: &[bool]) -> Subgraph {
    let seeds = || (0..graph.len()).filter(|&v| seed[v]);
    let upstream = closure(graph, seeds().filter(|&s| graph.reaches_sink(s)), false);
    let downstream = closure(
        graph,
        seeds().filter(|&s| graph.reachable_from_source(s)),
        true,
    );

    let mut edges = Vec::new();
    let mut in_set = vec![false; graph.len()];
    for u in 0..graph.len() {
        for &(v, _) in graph.successors(u) {
            let before = graph.reachable_from_source(u) && upstream[v];
            let after = downstream[u] && graph.reaches_sink(v);
            if before || after {
                edges.push((u, v));
                in_set[u] = true;
                in_set[v] = true;
            }
        }
    }
    Subgraph {
        nodes: (0..graph.len()).filter(|&v| in_set[v]).collect(),
        edges,
    }
}

/// Weakly connected components, ordered by their smallest cell id.
pub fn connected_sets(graph: &CircuitGraph<'_>, subgraph: &Subgraph) -> Vec<Subgraph> {
    let n = graph.len();
    let mut member = vec![false; n];
    for &v in &subgraph.nodes {
        member[v] = true;
    }
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &subgraph.edges {
        adjacent[u].push(v);
        adjacent[v].push(u);
    }

    let mut component = vec![usize::MAX; n];
    let mut sets: Vec<Subgraph> = Vec::new();
    // Nodes are ascending, so each new component starts at its smallest cell.
    for &start in &subgraph.nodes {
        if component[start] != usize::MAX {
            continue;
        }
        let c = sets.len();
        let mut nodes = vec![start];
        component[start] = c;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &adjacent[u] {
                if member[w] && component[w] == usize::MAX {
                    component[w] = c;
                    nodes.push(w);
                    stack.push(w);
                }
            }
        }
        nodes.sort_unstable();
        sets.push(Subgraph {
            nodes,
            edges: Vec::new(),
        });
    }
    for &(u, v) in &subgraph.edges {
        sets[component[u]].edges.push((u, v));
    }
    sets
}

struct Weighting<'m> {
    mode: WeightingMode,
    scope: BlockDelayScope,
    block: &'m [bool],
}

impl Weighting<'_> {
    fn node(&self, graph: &CircuitGraph<'_>, v: usize) -> Picoseconds {
        match self.mode {
            WeightingMode::SystemDelay => graph.cell(v).logic_delay,
            WeightingMode::BlockDelay if self.block[v] => graph.cell(v).logic_delay,
            WeightingMode::BlockDelay => 0,
        }
    }

    fn edge(&self, u: usize, v: usize, delay: Picoseconds) -> Picoseconds {
        match (self.mode, self.scope) {
            (WeightingMode::SystemDelay, _) => delay,
            (WeightingMode::BlockDelay, BlockDelayScope::WithIntraBlockNets)
                if self.block[u] && self.block[v] =>
            {
                delay
            }
            (WeightingMode::BlockDelay, _) => 0,
        }
    }
}

/// Best completion after a cell: weight of the rest of the path and the next cell.
type Suffix = Option<(Picoseconds, Option<usize>)>;

/// Heaviest source-to-sink path inside `set`.
///
/// With `through = Some(mask)` only paths containing a masked cell count.
/// Dynamic programming runs in reverse topological order over states
/// `(cell, seen a masked cell yet)`; choosing the smallest next cell among
/// equally heavy continuations yields the lexicographically smallest path.
fn heaviest_path(
    graph: &CircuitGraph<'_>,
    set: &Subgraph,
    through: Option<&[bool]>,
    weighting: &Weighting<'_>,
) -> PathResult {
    let n = graph.len();
    let mut member = vec![false; n];
    for &v in &set.nodes {
        member[v] = true;
    }
    let mut out: Vec<Vec<(usize, Picoseconds)>> = vec![Vec::new(); n];
    for &(u, v) in &set.edges {
        let delay = graph
            .successors(u)
            .iter()
            .find(|(w, _)| *w == v)
            .map(|&(_, d)| d)
            .expect("subgraph edges come from the graph");
        out[u].push((v, delay));
    }
    for list in &mut out {
        list.sort_unstable();
    }
    let marked = |v: usize| through.map_or(true, |m| m[v]);

    let mut best: Vec<[Suffix; 2]> = vec![[None, None]; n];
    for &v in graph.topo_order().iter().rev() {
        if !member[v] {
            continue;
        }
        for seen in [false, true] {
            best[v][seen as usize] = if graph.cell(v).kind.is_sink() {
                seen.then_some((0, None))
            } else {
                let mut pick: Suffix = None;
                for &(w, delay) in &out[v] {
                    let next_seen = seen || marked(w);
                    if let Some((rest, _)) = best[w][next_seen as usize] {
                        let weight = weighting.edge(v, w, delay) + weighting.node(graph, w) + rest;
                        if pick.map_or(true, |(cur, _)| weight > cur) {
                            pick = Some((weight, Some(w)));
                        }
                    }
                }
                pick
            };
        }
    }

    let mut start: Option<(Picoseconds, usize)> = None;
    for &v in &set.nodes {
        if !graph.cell(v).kind.is_source() {
            continue;
        }
        if let Some((rest, _)) = best[v][marked(v) as usize] {
            let weight = weighting.node(graph, v) + rest;
            if start.map_or(true, |(cur, _)| weight > cur) {
                start = Some((weight, v));
            }
        }
    }
    let Some((total, first)) = start else {
        return PathResult::default();
    };

    let mut result = PathResult {
        total_delay: total,
        logic_delay: weighting.node(graph, first),
        network_delay: 0,
        path: vec![graph.id(first).to_owned()],
    };
    let (mut cur, mut seen) = (first, marked(first));
    while let Some((_, Some(next))) = best[cur][seen as usize] {
        let delay = out[cur]
            .iter()
            .find(|(w, _)| *w == next)
            .map(|&(_, d)| d)
            .unwrap_or(0);
        result.network_delay += weighting.edge(cur, next, delay);
        result.logic_delay += weighting.node(graph, next);
        result.path.push(graph.id(next).to_owned());
        seen = seen || marked(next);
        cur = next;
    }
    debug_assert_eq!(
        result.total_delay,
        result.logic_delay + result.network_delay
    );
    result
}

/// Longest path of one connected set under `mode`, restricted to paths
/// through the `block` cells.
pub fn longest_path(
    graph: &CircuitGraph<'_>,
    set: &Subgraph,
    block: &[bool],
    mode: WeightingMode,
    scope: BlockDelayScope,
) -> PathResult {
    let weighting = Weighting { mode, scope, block };
    heaviest_path(graph, set, Some(block), &weighting)
}

/// The netlist-wide critical path under full weighting.
pub fn global_critical(graph: &CircuitGraph<'_>) -> PathResult {
    let everything = Subgraph {
        nodes: (0..graph.len()).collect(),
        edges: (0..graph.len())
            .flat_map(|u| graph.successors(u).iter().map(move |&(v, _)| (u, v)))
            .collect(),
    };
    let weighting = Weighting {
        mode: WeightingMode::SystemDelay,
        scope: BlockDelayScope::default(),
        block: &[],
    };
    heaviest_path(graph, &everything, None, &weighting)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockDelay {
    pub system: PathResult,
    pub block: PathResult,
    /// Cell counts of the connected sets, in set order.
    pub set_sizes: Vec<usize>,
}

/// System and block delay of a single block, given its cell mask.
pub fn block_delay(graph: &CircuitGraph<'_>, block: &[bool], scope: BlockDelayScope) -> BlockDelay {
    let expanded = expand_paths(graph, block);
    let sets = connected_sets(graph, &expanded);
    let mut result = BlockDelay {
        set_sizes: sets.iter().map(|s| s.nodes.len()).collect(),
        ..BlockDelay::default()
    };
    for set in &sets {
        let system = longest_path(graph, set, block, WeightingMode::SystemDelay, scope);
        let own = longest_path(graph, set, block, WeightingMode::BlockDelay, scope);
        result.system = std::mem::take(&mut result.system).best(system);
        result.block = std::mem::take(&mut result.block).best(own);
    }
    result
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DelayReport {
    pub per_block: IndexMap<BlockKey, BlockDelay>,
    pub global_critical: PathResult,
    /// Blocks owning at least one cell of the global critical path.
    pub critical_blocks: BTreeSet<BlockLabel>,
    pub scope: BlockDelayScope,
}

/// Per-block delays for every registry row plus the global critical path.
/// Blocks are analyzed in parallel on the current rayon pool.
pub fn delay_report(
    graph: &CircuitGraph<'_>,
    registry: &BlockRegistry,
    scope: BlockDelayScope,
) -> Result<DelayReport, AnalysisError> {
    let keys = registry.keys();
    let masks: Vec<Vec<bool>> = keys
        .iter()
        .map(|k| {
            let cells = annotated_nodes(registry, k)?;
            match cells.iter().find(|c| graph.index_of(c).is_none()) {
                Some(missing) => Err(AnalysisError::RegistryMismatch(missing.clone())),
                None => Ok(graph.mask(cells.iter().map(String::as_str))),
            }
        })
        .collect::<Result<_, _>>()?;

    let delays: Vec<BlockDelay> = masks
        .par_iter()
        .map(|mask| block_delay(graph, mask, scope))
        .collect();

    let global = global_critical(graph);
    let owners = registry.owners();
    let critical_blocks = global
        .path
        .iter()
        .filter_map(|c| owners.get(c.as_str()).and_then(|k| k.label().cloned()))
        .collect();

    Ok(DelayReport {
        per_block: keys.into_iter().zip(delays).collect(),
        global_critical: global,
        critical_blocks,
        scope,
    })
}
