//! Immutable circuit model: cells are DAG nodes, nets are weighted edges.
//!
//! Flip-flops appear as two unconnected nodes, a data-input sink (`FF_D`) and
//! an output source (`FF_Q`), optionally tied together by an [`FfPair`]. All
//! delays are integer picoseconds.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Rule, ValidationReport, Violation};

/// Delay in integer picoseconds.
pub type Picoseconds = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    Lut1,
    Lut2,
    Lut3,
    Lut4,
    Lut5,
    Lut6,
    /// Flip-flop data input port.
    FfD,
    /// Flip-flop output port.
    FfQ,
    Clk,
    In,
    Out,
    MemIn,
}

impl CellKind {
    pub const ALL: [CellKind; 12] = [
        CellKind::Lut1,
        CellKind::Lut2,
        CellKind::Lut3,
        CellKind::Lut4,
        CellKind::Lut5,
        CellKind::Lut6,
        CellKind::FfD,
        CellKind::FfQ,
        CellKind::Clk,
        CellKind::In,
        CellKind::Out,
        CellKind::MemIn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CellKind::Lut1 => "LUT1",
            CellKind::Lut2 => "LUT2",
            CellKind::Lut3 => "LUT3",
            CellKind::Lut4 => "LUT4",
            CellKind::Lut5 => "LUT5",
            CellKind::Lut6 => "LUT6",
            CellKind::FfD => "FF_D",
            CellKind::FfQ => "FF_Q",
            CellKind::Clk => "CLK",
            CellKind::In => "IN",
            CellKind::Out => "OUT",
            CellKind::MemIn => "MEM_IN",
        }
    }

    pub fn from_name(name: &str) -> Option<CellKind> {
        CellKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// LUT with `inputs` inputs, `1..=6`.
    pub fn lut(inputs: u8) -> Option<CellKind> {
        match inputs {
            1 => Some(CellKind::Lut1),
            2 => Some(CellKind::Lut2),
            3 => Some(CellKind::Lut3),
            4 => Some(CellKind::Lut4),
            5 => Some(CellKind::Lut5),
            6 => Some(CellKind::Lut6),
            _ => None,
        }
    }

    pub fn lut_inputs(self) -> Option<u8> {
        match self {
            CellKind::Lut1 => Some(1),
            CellKind::Lut2 => Some(2),
            CellKind::Lut3 => Some(3),
            CellKind::Lut4 => Some(4),
            CellKind::Lut5 => Some(5),
            CellKind::Lut6 => Some(6),
            _ => None,
        }
    }

    /// Path start points: clock ports, primary inputs and register outputs.
    pub fn is_source(self) -> bool {
        matches!(self, CellKind::Clk | CellKind::In | CellKind::FfQ)
    }

    /// Path end points: register inputs, memory write inputs and primary outputs.
    pub fn is_sink(self) -> bool {
        matches!(self, CellKind::FfD | CellKind::MemIn | CellKind::Out)
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub kind: CellKind,
    pub logic_delay: Picoseconds,
}

impl Cell {
    pub fn new(id: impl Into<String>, kind: CellKind, logic_delay: Picoseconds) -> Self {
        Cell {
            id: id.into(),
            kind,
            logic_delay,
        }
    }
}

/// Point-to-point connection; fan-out is several nets sharing `src`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub src: String,
    pub dst: String,
    pub net_delay: Picoseconds,
}

impl Net {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, net_delay: Picoseconds) -> Self {
        Net {
            src: src.into(),
            dst: dst.into(),
            net_delay,
        }
    }

    /// Stable key used in diagnostics, `src->dst`.
    pub fn key(&self) -> String {
        format!("{}->{}", self.src, self.dst)
    }
}

/// The D and Q ports of one physical flip-flop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FfPair {
    pub d: String,
    pub q: String,
}

impl FfPair {
    pub fn new(d: impl Into<String>, q: impl Into<String>) -> Self {
        FfPair {
            d: d.into(),
            q: q.into(),
        }
    }
}

/// A synthesized circuit. Construction puts cells, nets and pairs in
/// canonical order (by id, by `(src, dst)`, by `(d, q)`), so two netlists
/// with the same content compare equal regardless of insertion order.
///
/// A `Netlist` is not necessarily valid; see [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Netlist {
    cells: Vec<Cell>,
    nets: Vec<Net>,
    ff_pairs: Vec<FfPair>,
}

impl Netlist {
    pub fn new(mut cells: Vec<Cell>, mut nets: Vec<Net>, mut ff_pairs: Vec<FfPair>) -> Self {
        cells.sort_by(|a, b| a.id.cmp(&b.id));
        nets.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));
        ff_pairs.sort_by(|a, b| (&a.d, &a.q).cmp(&(&b.d, &b.q)));
        Netlist {
            cells,
            nets,
            ff_pairs,
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn ff_pairs(&self) -> &[FfPair] {
        &self.ff_pairs
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, id: &str) -> Option<&Cell> {
        self.cells
            .binary_search_by(|c| c.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.cells[i])
    }

    /// Rebuilds the netlist with each cell passed through `f`; ids must not change.
    pub fn map_cells(&self, f: impl FnMut(&Cell) -> Cell) -> Netlist {
        Netlist::new(
            self.cells.iter().map(f).collect(),
            self.nets.clone(),
            self.ff_pairs.clone(),
        )
    }

    pub fn kind_census(&self) -> BTreeMap<CellKind, u64> {
        let mut census = BTreeMap::new();
        for c in &self.cells {
            *census.entry(c.kind).or_insert(0) += 1;
        }
        census
    }
}

/// Cell ids are restricted to `[A-Za-z0-9_.]+`.
pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.')
}

/// Checks every model invariant and reports all violations found.
pub fn validate(netlist: &Netlist) -> ValidationReport {
    let mut violations = Vec::new();
    let mut kinds: HashMap<&str, CellKind> = HashMap::with_capacity(netlist.cells.len());

    for cell in &netlist.cells {
        if !is_valid_id(&cell.id) {
            violations.push(Violation::new(
                Rule::InvalidCellId,
                vec![cell.id.clone()],
                format!("cell id {:?} is not of the form [A-Za-z0-9_.]+", cell.id),
            ));
        }
        if kinds.insert(&cell.id, cell.kind).is_some() {
            violations.push(Violation::new(
                Rule::DuplicateCellId,
                vec![cell.id.clone()],
                format!("cell {} is declared more than once", cell.id),
            ));
        }
        if cell.kind.is_source() && cell.logic_delay != 0 {
            violations.push(Violation::new(
                Rule::SourceWithLogicDelay,
                vec![cell.id.clone()],
                format!(
                    "{} cell {} must have logic delay 0, found {}",
                    cell.kind, cell.id, cell.logic_delay
                ),
            ));
        }
    }

    let mut seen_nets = BTreeSet::new();
    for net in &netlist.nets {
        let src = kinds.get(net.src.as_str()).copied();
        let dst = kinds.get(net.dst.as_str()).copied();
        for (end, kind) in [(&net.src, src), (&net.dst, dst)] {
            if kind.is_none() {
                violations.push(Violation::new(
                    Rule::DanglingNetEndpoint,
                    vec![net.key()],
                    format!("net {} references unknown cell {}", net.key(), end),
                ));
            }
        }
        if !seen_nets.insert((&net.src, &net.dst)) {
            violations.push(Violation::new(
                Rule::DuplicateNet,
                vec![net.key()],
                format!("net {} is declared more than once", net.key()),
            ));
        }
        if let Some(k) = dst.filter(|k| k.is_source()) {
            violations.push(Violation::new(
                Rule::EdgeIntoSourceKind,
                vec![net.key()],
                format!("net {} drives {} cell {}", net.key(), k, net.dst),
            ));
        }
        if let Some(k) = src.filter(|k| k.is_sink()) {
            violations.push(Violation::new(
                Rule::EdgeFromSinkKind,
                vec![net.key()],
                format!("net {} is driven by {} cell {}", net.key(), k, net.src),
            ));
        }
    }

    let mut paired = BTreeSet::new();
    for pair in &netlist.ff_pairs {
        for (port, expected) in [(&pair.d, CellKind::FfD), (&pair.q, CellKind::FfQ)] {
            match kinds.get(port.as_str()) {
                None => violations.push(Violation::new(
                    Rule::FfPairUnknownCell,
                    vec![port.clone()],
                    format!(
                        "ffpair {} {} references unknown cell {}",
                        pair.d, pair.q, port
                    ),
                )),
                Some(&k) if k != expected => violations.push(Violation::new(
                    Rule::FfPairKindMismatch,
                    vec![port.clone()],
                    format!("ffpair port {} must be {}, found {}", port, expected, k),
                )),
                Some(_) => {}
            }
            if !paired.insert(port.as_str()) {
                violations.push(Violation::new(
                    Rule::DuplicateFfPair,
                    vec![port.clone()],
                    format!("cell {} appears in more than one ffpair", port),
                ));
            }
        }
    }

    if let Some(cycle) = find_cycle(netlist) {
        violations.push(Violation::new(
            Rule::CombinationalCycle,
            cycle.clone(),
            format!("combinational cycle through {}", cycle.join(" -> ")),
        ));
    }

    ValidationReport { violations }
}

/// Index of every cell id, in canonical (sorted) order.
fn index_map(netlist: &Netlist) -> HashMap<&str, usize> {
    netlist
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect()
}

/// Adjacency over the nets whose endpoints both exist.
fn adjacency(netlist: &Netlist) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let index = index_map(netlist);
    let n = netlist.cells.len();
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for net in &netlist.nets {
        if let (Some(&u), Some(&v)) = (index.get(net.src.as_str()), index.get(net.dst.as_str())) {
            succ[u].push(v);
            pred[v].push(u);
        }
    }
    for list in succ.iter_mut().chain(pred.iter_mut()) {
        list.sort_unstable();
        list.dedup();
    }
    (succ, pred)
}

/// Kahn's algorithm in waves: wave `k` holds the cells whose longest chain of
/// predecessors has length `k`, each wave sorted by index. Returns the order
/// and the in-degree left on every cell (non-zero only on or behind a cycle).
fn layered_order(succ: &[Vec<usize>], pred: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let mut indeg: Vec<usize> = pred.iter().map(Vec::len).collect();
    let mut wave: Vec<usize> = (0..succ.len()).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(succ.len());
    while !wave.is_empty() {
        let mut next = Vec::new();
        for &u in &wave {
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    next.push(v);
                }
            }
        }
        order.extend_from_slice(&wave);
        next.sort_unstable();
        wave = next;
    }
    (order, indeg)
}

/// One cycle as a closed walk, rotated to start at its smallest id.
fn find_cycle(netlist: &Netlist) -> Option<Vec<String>> {
    let (succ, pred) = adjacency(netlist);
    let (order, indeg) = layered_order(&succ, &pred);
    if order.len() == succ.len() {
        return None;
    }
    // Every cell left over has a leftover predecessor, so walking backwards
    // must revisit a cell.
    let stuck = |v: usize| indeg[v] > 0;
    let start = (0..succ.len()).find(|&v| stuck(v))?;
    let mut walk = vec![start];
    let mut pos = HashMap::from([(start, 0usize)]);
    let mut cur = start;
    loop {
        cur = *pred[cur].iter().find(|&&p| stuck(p))?;
        if let Some(&at) = pos.get(&cur) {
            let mut cycle: Vec<usize> = walk[at..].to_vec();
            cycle.reverse();
            let min_at = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, &v)| v)
                .map(|(i, _)| i)
                .unwrap_or(0);
            cycle.rotate_left(min_at);
            return Some(
                cycle
                    .into_iter()
                    .map(|v| netlist.cells[v].id.clone())
                    .collect(),
            );
        }
        pos.insert(cur, walk.len());
        walk.push(cur);
    }
}

/// Deterministic topological order of the cell ids.
///
/// Cells are released in waves of equal combinational depth; within a wave
/// ties go to the lexicographically smaller id.
pub fn topological_order(netlist: &Netlist) -> Result<Vec<String>, ValidationReport> {
    let graph = CircuitGraph::new(netlist)?;
    Ok(graph
        .topo_order()
        .iter()
        .map(|&v| graph.id(v).to_owned())
        .collect())
}

/// Index-based view of a validated netlist used by the analyses.
///
/// Cell index order equals lexicographic id order, so comparing index
/// sequences is the same as comparing id sequences.
#[derive(Debug)]
pub struct CircuitGraph<'a> {
    netlist: &'a Netlist,
    index: HashMap<&'a str, usize>,
    succ: Vec<Vec<(usize, Picoseconds)>>,
    pred: Vec<Vec<(usize, Picoseconds)>>,
    topo: Vec<usize>,
    from_source: Vec<bool>,
    to_sink: Vec<bool>,
}

impl<'a> CircuitGraph<'a> {
    pub fn new(netlist: &'a Netlist) -> Result<Self, ValidationReport> {
        let report = validate(netlist);
        if !report.is_ok() {
            return Err(report);
        }
        let index = index_map(netlist);
        let n = netlist.cells.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for net in &netlist.nets {
            let (u, v) = (index[net.src.as_str()], index[net.dst.as_str()]);
            succ[u].push((v, net.net_delay));
            pred[v].push((u, net.net_delay));
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }
        let plain_succ: Vec<Vec<usize>> = succ
            .iter()
            .map(|l| l.iter().map(|e| e.0).collect())
            .collect();
        let plain_pred: Vec<Vec<usize>> = pred
            .iter()
            .map(|l| l.iter().map(|e| e.0).collect())
            .collect();
        let (topo, _) = layered_order(&plain_succ, &plain_pred);

        let mut from_source = vec![false; n];
        for &v in &topo {
            from_source[v] =
                netlist.cells[v].kind.is_source() || pred[v].iter().any(|&(u, _)| from_source[u]);
        }
        let mut to_sink = vec![false; n];
        for &v in topo.iter().rev() {
            to_sink[v] =
                netlist.cells[v].kind.is_sink() || succ[v].iter().any(|&(w, _)| to_sink[w]);
        }

        Ok(CircuitGraph {
            netlist,
            index,
            succ,
            pred,
            topo,
            from_source,
            to_sink,
        })
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.netlist
    }

    pub fn len(&self) -> usize {
        self.netlist.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.netlist.cells.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, v: usize) -> &'a str {
        &self.netlist.cells[v].id
    }

    pub fn cell(&self, v: usize) -> &'a Cell {
        &self.netlist.cells[v]
    }

    /// Successors with net delays, ascending by index.
    pub fn successors(&self, v: usize) -> &[(usize, Picoseconds)] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[(usize, Picoseconds)] {
        &self.pred[v]
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// Some source-kind cell reaches `v` (sources reach themselves).
    pub fn reachable_from_source(&self, v: usize) -> bool {
        self.from_source[v]
    }

    /// `v` reaches some sink-kind cell (sinks reach themselves).
    pub fn reaches_sink(&self, v: usize) -> bool {
        self.to_sink[v]
    }

    /// Membership mask over cell indices; unknown ids are ignored.
    pub fn mask<'s>(&self, ids: impl IntoIterator<Item = &'s str>) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for id in ids {
            if let Some(v) = self.index_of(id) {
                mask[v] = true;
            }
        }
        mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lut(id: &str) -> Cell {
        Cell::new(id, CellKind::Lut4, 10)
    }

    #[test]
    fn empty_netlist_is_valid() {
        assert!(validate(&Netlist::default()).is_ok());
        assert_eq!(
            topological_order(&Netlist::default()).unwrap(),
            Vec::<String>::new()
        );
    }

    #[test]
    fn two_cycle_is_reported() {
        let n = Netlist::new(
            vec![lut("A"), lut("B")],
            vec![Net::new("A", "B", 1), Net::new("B", "A", 1)],
            vec![],
        );
        let report = validate(&n);
        let v = report
            .violations
            .iter()
            .find(|v| v.rule == Rule::CombinationalCycle)
            .expect("cycle reported");
        assert_eq!(v.rule.as_str(), "combinational-cycle");
        assert_eq!(v.subjects, vec!["A".to_string(), "B".to_string()]);
        assert!(topological_order(&n).is_err());
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let n = Netlist::new(vec![lut("A")], vec![Net::new("A", "A", 0)], vec![]);
        let report = validate(&n);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].subjects, vec!["A".to_string()]);
    }

    #[test]
    fn reported_cycle_edges_exist() {
        let n = Netlist::new(
            vec![
                Cell::new("in", CellKind::In, 0),
                lut("a"),
                lut("b"),
                lut("c"),
                lut("d"),
            ],
            vec![
                Net::new("in", "a", 1),
                Net::new("a", "b", 1),
                Net::new("b", "c", 1),
                Net::new("c", "d", 1),
                Net::new("d", "b", 1),
            ],
            vec![],
        );
        let report = validate(&n);
        let cycle = &report.violations[0].subjects;
        assert_eq!(cycle, &["b", "c", "d"]);
        for i in 0..cycle.len() {
            let (s, d) = (&cycle[i], &cycle[(i + 1) % cycle.len()]);
            assert!(n.nets().iter().any(|x| &x.src == s && &x.dst == d));
        }
    }

    #[test]
    fn net_into_clock_is_rejected() {
        let n = Netlist::new(
            vec![Cell::new("clk", CellKind::Clk, 0), lut("a")],
            vec![Net::new("a", "clk", 1)],
            vec![],
        );
        let rules: Vec<_> = validate(&n).violations.iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec![Rule::EdgeIntoSourceKind]);
        assert_eq!(Rule::EdgeIntoSourceKind.as_str(), "edge-into-source-kind");
    }

    #[test]
    fn source_and_sink_discipline() {
        let n = Netlist::new(
            vec![
                Cell::new("d", CellKind::FfD, 0),
                Cell::new("q", CellKind::FfQ, 5),
                lut("x"),
            ],
            vec![Net::new("d", "x", 1), Net::new("x", "q", 1)],
            vec![FfPair::new("q", "d")],
        );
        let rules: BTreeSet<_> = validate(&n).violations.iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::SourceWithLogicDelay));
        assert!(rules.contains(&Rule::EdgeFromSinkKind));
        assert!(rules.contains(&Rule::EdgeIntoSourceKind));
        assert!(rules.contains(&Rule::FfPairKindMismatch));
    }

    #[test]
    fn dangling_and_duplicates() {
        let n = Netlist::new(
            vec![lut("a"), lut("a"), Cell::new("bad id", CellKind::In, 0)],
            vec![Net::new("a", "zz", 1), Net::new("a", "zz", 2)],
            vec![FfPair::new("nope", "a")],
        );
        let rules: BTreeSet<_> = validate(&n).violations.iter().map(|v| v.rule).collect();
        for r in [
            Rule::DuplicateCellId,
            Rule::InvalidCellId,
            Rule::DanglingNetEndpoint,
            Rule::DuplicateNet,
            Rule::FfPairUnknownCell,
            Rule::FfPairKindMismatch,
        ] {
            assert!(rules.contains(&r), "{r:?} missing from {rules:?}");
        }
    }

    #[test]
    fn chain_order() {
        let n = Netlist::new(
            vec![
                Cell::new("z_in", CellKind::In, 0),
                Cell::new("a_lut", CellKind::Lut2, 4),
                Cell::new("m_ff", CellKind::FfD, 0),
            ],
            vec![Net::new("z_in", "a_lut", 1), Net::new("a_lut", "m_ff", 1)],
            vec![],
        );
        assert_eq!(topological_order(&n).unwrap(), ["z_in", "a_lut", "m_ff"]);
    }

    #[test]
    fn diamond_order_breaks_ties_by_id() {
        // Valid orders are A,B,C,D and A,C,B,D; B < C picks the first.
        let n = Netlist::new(
            vec![lut("D"), lut("C"), lut("B"), lut("A")],
            vec![
                Net::new("A", "B", 1),
                Net::new("A", "C", 1),
                Net::new("B", "D", 1),
                Net::new("C", "D", 1),
            ],
            vec![],
        );
        assert_eq!(topological_order(&n).unwrap(), ["A", "B", "C", "D"]);
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let cells = vec![lut("b"), lut("a"), lut("c")];
        let nets = vec![Net::new("b", "c", 1), Net::new("a", "b", 2)];
        let mut rc = cells.clone();
        rc.reverse();
        let mut rn = nets.clone();
        rn.reverse();
        assert_eq!(
            Netlist::new(cells, nets, vec![]),
            Netlist::new(rc, rn, vec![])
        );
    }

    #[test]
    fn reachability_flags() {
        let n = Netlist::new(
            vec![
                Cell::new("q", CellKind::FfQ, 0),
                lut("orphan"),
                lut("mid"),
                Cell::new("d", CellKind::FfD, 0),
            ],
            vec![
                Net::new("q", "mid", 1),
                Net::new("orphan", "mid", 1),
                Net::new("mid", "d", 1),
            ],
            vec![FfPair::new("d", "q")],
        );
        let g = CircuitGraph::new(&n).unwrap();
        let o = g.index_of("orphan").unwrap();
        assert!(!g.reachable_from_source(o));
        assert!(g.reaches_sink(o));
        assert!(g.reachable_from_source(g.index_of("d").unwrap()));
    }
}
