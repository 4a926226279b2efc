//! Brute-force reference implementations.
//!
//! These work on cell ids directly and enumerate every path, so they are only
//! usable on small netlists. The test suite compares the optimized analyses
//! against them.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::annotation::BlockLabel;
use crate::delay::{BlockDelayScope, PathResult, WeightingMode};
use crate::netlist::{Netlist, Picoseconds};
use crate::power::ActivityProfile;

/// Largest netlist the path oracles accept.
pub const ORACLE_MAX_CELLS: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle limited to {limit} cells, netlist has {cells}")]
pub struct OracleTooLarge {
    pub cells: usize,
    pub limit: usize,
}

fn check_size(netlist: &Netlist, limit: usize) -> Result<(), OracleTooLarge> {
    if netlist.cells().len() > limit {
        return Err(OracleTooLarge {
            cells: netlist.cells().len(),
            limit,
        });
    }
    Ok(())
}

/// Every path from a source cell to a sink cell, as id sequences.
pub fn all_paths(netlist: &Netlist) -> Vec<Vec<String>> {
    let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for net in netlist.nets() {
        out.entry(&net.src).or_default().push(&net.dst);
    }

    fn walk<'a>(
        at: &'a str,
        netlist: &'a Netlist,
        out: &BTreeMap<&'a str, Vec<&'a str>>,
        path: &mut Vec<&'a str>,
        found: &mut Vec<Vec<String>>,
    ) {
        path.push(at);
        if netlist.cell(at).is_some_and(|c| c.kind.is_sink()) {
            found.push(path.iter().map(|s| s.to_string()).collect());
        }
        for next in out.get(at).into_iter().flatten() {
            walk(next, netlist, out, path, found);
        }
        path.pop();
    }

    let mut found = Vec::new();
    for cell in netlist.cells().iter().filter(|c| c.kind.is_source()) {
        walk(&cell.id, netlist, &out, &mut Vec::new(), &mut found);
    }
    found
}

fn net_delay(netlist: &Netlist, src: &str, dst: &str) -> Picoseconds {
    netlist
        .nets()
        .iter()
        .find(|n| n.src == src && n.dst == dst)
        .map(|n| n.net_delay)
        .expect("consecutive path cells are connected")
}

/// Weighs one path: `(logic, network)`.
fn weigh(
    netlist: &Netlist,
    path: &[String],
    block: Option<&BTreeSet<String>>,
    mode: WeightingMode,
    scope: BlockDelayScope,
) -> (Picoseconds, Picoseconds) {
    let counts = |id: &String| match mode {
        WeightingMode::SystemDelay => true,
        WeightingMode::BlockDelay => block.is_some_and(|b| b.contains(id)),
    };
    let mut logic = 0;
    for id in path {
        if counts(id) {
            logic += netlist.cell(id).expect("path cell exists").logic_delay;
        }
    }
    let mut network = 0;
    for pair in path.windows(2) {
        let included = match mode {
            WeightingMode::SystemDelay => true,
            WeightingMode::BlockDelay => {
                scope == BlockDelayScope::WithIntraBlockNets && counts(&pair[0]) && counts(&pair[1])
            }
        };
        if included {
            network += net_delay(netlist, &pair[0], &pair[1]);
        }
    }
    (logic, network)
}

fn heaviest(
    netlist: &Netlist,
    paths: impl Iterator<Item = Vec<String>>,
    block: Option<&BTreeSet<String>>,
    mode: WeightingMode,
    scope: BlockDelayScope,
) -> PathResult {
    let mut winner: Option<PathResult> = None;
    for path in paths {
        let (logic, network) = weigh(netlist, &path, block, mode, scope);
        let candidate = PathResult {
            total_delay: logic + network,
            logic_delay: logic,
            network_delay: network,
            path,
        };
        winner = match winner {
            None => Some(candidate),
            Some(w) => {
                let better = candidate.total_delay > w.total_delay
                    || (candidate.total_delay == w.total_delay && candidate.path < w.path);
                Some(if better { candidate } else { w })
            }
        };
    }
    winner.unwrap_or_default()
}

/// Heaviest source-to-sink path through at least one cell of `block`.
pub fn oracle_longest_path(
    netlist: &Netlist,
    block: &BTreeSet<String>,
    mode: WeightingMode,
    scope: BlockDelayScope,
) -> Result<PathResult, OracleTooLarge> {
    oracle_longest_path_within(netlist, block, mode, scope, ORACLE_MAX_CELLS)
}

/// [`oracle_longest_path`] with a caller-chosen size cap, for fixtures whose
/// path count stays small despite more cells.
pub fn oracle_longest_path_within(
    netlist: &Netlist,
    block: &BTreeSet<String>,
    mode: WeightingMode,
    scope: BlockDelayScope,
    max_cells: usize,
) -> Result<PathResult, OracleTooLarge> {
    check_size(netlist, max_cells)?;
    let through = all_paths(netlist)
        .into_iter()
        .filter(|p| p.iter().any(|id| block.contains(id)));
    Ok(heaviest(netlist, through, Some(block), mode, scope))
}

/// Heaviest source-to-sink path of the whole netlist.
pub fn oracle_global_critical(netlist: &Netlist) -> Result<PathResult, OracleTooLarge> {
    check_size(netlist, ORACLE_MAX_CELLS)?;
    Ok(heaviest(
        netlist,
        all_paths(netlist).into_iter(),
        None,
        WeightingMode::SystemDelay,
        BlockDelayScope::default(),
    ))
}

/// Cell ids and `(from, to)` net ids.
pub type Subgraph = (BTreeSet<String>, BTreeSet<(String, String)>);

/// Cells and nets lying on some source-to-sink path through `block`.
pub fn oracle_expand_paths(
    netlist: &Netlist,
    block: &BTreeSet<String>,
) -> Result<Subgraph, OracleTooLarge> {
    check_size(netlist, ORACLE_MAX_CELLS)?;
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for path in all_paths(netlist) {
        if !path.iter().any(|id| block.contains(id)) {
            continue;
        }
        for pair in path.windows(2) {
            edges.insert((pair[0].clone(), pair[1].clone()));
        }
        nodes.extend(path);
    }
    Ok((nodes, edges))
}

/// Weakly connected components of an edge list by union-find, each sorted,
/// ordered by smallest member.
pub fn oracle_components(
    nodes: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
) -> Vec<BTreeSet<String>> {
    let index: BTreeMap<&str, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut x = x;
        while parent[x] != root {
            let next = parent[x];
            parent[x] = root;
            x = next;
        }
        root
    }
    for (a, b) in edges {
        let (ra, rb) = (
            find(&mut parent, index[a.as_str()]),
            find(&mut parent, index[b.as_str()]),
        );
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().insert(n.clone());
    }
    let mut sets: Vec<BTreeSet<String>> = groups.into_values().collect();
    sets.sort_by(|a, b| a.first().cmp(&b.first()));
    sets
}

/// Cycle-by-cycle replay of the profile: each block's active cycles.
pub fn oracle_replay(profile: &ActivityProfile) -> BTreeMap<BlockLabel, BTreeSet<u64>> {
    let mut active: BTreeMap<BlockLabel, BTreeSet<u64>> = profile
        .blocks()
        .into_iter()
        .map(|b| (b, BTreeSet::new()))
        .collect();
    let fired = |rule: &str, t: u64| profile.firings.get(rule).is_some_and(|f| f.contains(&t));

    for t in 0..profile.cycles {
        for (block, cycles) in active.iter_mut() {
            let own = profile
                .rule_block
                .iter()
                .any(|(rule, owner)| owner == block && fired(rule, t));
            let woken = t > 0
                && profile.writes.iter().any(|(rule, state)| {
                    fired(rule, t - 1) && profile.reads.contains(&(block.clone(), state.clone()))
                });
            if own || woken {
                cycles.insert(t);
            }
        }
    }
    active
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{gcd_profile, gen_fig6};
    use crate::netlist::{Cell, CellKind, Net};

    fn ids(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_edge() {
        let n = Netlist::new(
            vec![
                Cell::new("i", CellKind::In, 0),
                Cell::new("o", CellKind::Out, 2),
            ],
            vec![Net::new("i", "o", 5)],
            vec![],
        );
        let r = oracle_longest_path(
            &n,
            &ids(&["o"]),
            WeightingMode::SystemDelay,
            BlockDelayScope::default(),
        )
        .unwrap();
        assert_eq!(r.path, ["i", "o"]);
        assert_eq!((r.total_delay, r.logic_delay, r.network_delay), (7, 2, 5));
    }

    #[test]
    fn fig6_values() {
        let n = gen_fig6();
        let blue = ids(&["blue__n1", "blue__n2", "blue__n3", "blue__n4"]);
        let scope = BlockDelayScope::default();
        let sys = oracle_longest_path(&n, &blue, WeightingMode::SystemDelay, scope).unwrap();
        let own = oracle_longest_path(&n, &blue, WeightingMode::BlockDelay, scope).unwrap();
        assert_eq!((sys.total_delay, own.total_delay), (5, 3));
        assert_eq!(oracle_global_critical(&n).unwrap().total_delay, 5);

        let (nodes, edges) = oracle_expand_paths(&n, &blue).unwrap();
        let sizes: Vec<usize> = oracle_components(&nodes, &edges)
            .iter()
            .map(BTreeSet::len)
            .collect();
        assert_eq!(sizes, [7, 5]);
    }

    #[test]
    fn size_cap() {
        let cells = (0..15)
            .map(|i| Cell::new(format!("c{i:02}"), CellKind::Lut1, 1))
            .collect();
        let n = Netlist::new(cells, vec![], vec![]);
        assert_eq!(
            oracle_global_critical(&n),
            Err(OracleTooLarge {
                cells: 15,
                limit: 14
            })
        );
    }

    #[test]
    fn three_chains() {
        let edges: BTreeSet<(String, String)> = [("a", "b"), ("c", "d"), ("e", "f"), ("b", "g")]
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        let nodes = ids(&["a", "b", "c", "d", "e", "f", "g"]);
        let sets = oracle_components(&nodes, &edges);
        assert_eq!(
            sets,
            vec![ids(&["a", "b", "g"]), ids(&["c", "d"]), ids(&["e", "f"])]
        );
    }

    #[test]
    fn replay_gcd() {
        let active = oracle_replay(&gcd_profile());
        let sub = BlockLabel::parse("subtract").unwrap();
        assert_eq!(active[&sub], BTreeSet::from([2, 3, 4, 5, 6]));
        let swap = BlockLabel::parse("swap").unwrap();
        assert_eq!(active[&swap], BTreeSet::from([1, 3]));
        // At most one rule per cycle, so own-firing fractions sum to at most 1.
        let p = gcd_profile();
        for t in 0..p.cycles {
            assert!(p.firings.values().filter(|f| f.contains(&t)).count() <= 1);
        }
    }

    #[test]
    fn replay_boundaries() {
        let mut p = gcd_profile();
        p.firings.clear();
        assert!(oracle_replay(&p).values().all(BTreeSet::is_empty));
        p.firings.insert("swap".into(), vec![9]);
        let sub = BlockLabel::parse("subtract").unwrap();
        assert!(oracle_replay(&p)[&sub].is_empty());
    }
}
