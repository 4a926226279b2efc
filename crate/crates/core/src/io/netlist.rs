//! `blockscope-netlist v1`
//!
//! ```text
//! blockscope-netlist v1
//! cell <id> <KIND> <logic_delay_ps>
//! net <src_id> -> <dst_id> <net_delay_ps>
//! ffpair <d_id> <q_id>
//! ```
//!
//! Directives after the header may come in any order. The serialized form is
//! canonical: cells by id, nets by `(src, dst)`, pairs by `(d, q)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{decode, lex, split_header, LocatedViolation, ParseError};
use crate::error::ValidationReport;
use crate::netlist::{validate, Cell, CellKind, FfPair, Net, Netlist};

pub const NETLIST_HEADER: &str = "blockscope-netlist v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetlistDocument {
    pub version: String,
    pub netlist: Netlist,
    /// Line of every cell id and net key (`src->dst`) in the source text.
    pub lines: BTreeMap<String, usize>,
}

impl NetlistDocument {
    pub fn new(netlist: Netlist) -> Self {
        NetlistDocument {
            version: NETLIST_HEADER.to_owned(),
            netlist,
            lines: BTreeMap::new(),
        }
    }
}

pub fn parse_netlist(bytes: &[u8]) -> Result<NetlistDocument, ParseError> {
    let text = decode(bytes)?;
    let lines = lex(text);
    let body = split_header(&lines, NETLIST_HEADER)?;

    let mut cells = Vec::new();
    let mut nets = Vec::new();
    let mut pairs = Vec::new();
    let mut where_: BTreeMap<String, usize> = BTreeMap::new();

    for line in body {
        match line.text(0) {
            "cell" => {
                line.expect_len(4, "cell <id> <KIND> <logic_delay_ps>")?;
                let id = line.id(1, "cell id")?;
                let kind = CellKind::from_name(line.text(2))
                    .ok_or_else(|| line.error(2, format!("unknown cell kind {}", line.text(2))))?;
                let delay = line.unsigned(3, "logic delay")?;
                if where_.contains_key(id) {
                    return Err(line.semantic(format!("duplicate cell id {id}")));
                }
                where_.insert(id.to_owned(), line.number);
                cells.push(Cell::new(id, kind, delay));
            }
            "net" => {
                line.expect_len(5, "net <src_id> -> <dst_id> <net_delay_ps>")?;
                let src = line.id(1, "source cell id")?;
                if line.text(2) != "->" {
                    return Err(line.error(2, format!("expected `->`, found {}", line.text(2))));
                }
                let dst = line.id(3, "destination cell id")?;
                let delay = line.unsigned(4, "net delay")?;
                let net = Net::new(src, dst, delay);
                if where_.contains_key(&net.key()) {
                    return Err(line.semantic(format!("duplicate net {}", net.key())));
                }
                where_.insert(net.key(), line.number);
                nets.push(net);
            }
            "ffpair" => {
                line.expect_len(3, "ffpair <d_id> <q_id>")?;
                let d = line.id(1, "flip-flop D id")?;
                let q = line.id(2, "flip-flop Q id")?;
                where_.entry(format!("ffpair {d}")).or_insert(line.number);
                where_.entry(format!("ffpair {q}")).or_insert(line.number);
                pairs.push(FfPair::new(d, q));
            }
            other => return Err(line.error(0, format!("unknown directive {other}"))),
        }
    }

    let netlist = Netlist::new(cells, nets, pairs);
    let report = validate(&netlist);
    if !report.is_ok() {
        return Err(locate(&report, &where_));
    }
    where_.retain(|k, _| !k.starts_with("ffpair "));
    Ok(NetlistDocument {
        version: NETLIST_HEADER.to_owned(),
        netlist,
        lines: where_,
    })
}

fn locate(report: &ValidationReport, lines: &BTreeMap<String, usize>) -> ParseError {
    use crate::error::Rule;
    let mut located: Vec<LocatedViolation> = report
        .violations
        .iter()
        .map(|v| {
            let line = v.subjects.iter().find_map(|s| match v.rule {
                Rule::FfPairKindMismatch | Rule::FfPairUnknownCell | Rule::DuplicateFfPair => {
                    lines.get(&format!("ffpair {s}")).copied()
                }
                // For a cycle, point at the net that closes it.
                Rule::CombinationalCycle => {
                    let n = v.subjects.len();
                    let last = &v.subjects[n - 1];
                    lines.get(&format!("{last}->{}", v.subjects[0])).copied()
                }
                _ => lines.get(s).copied(),
            });
            LocatedViolation {
                line,
                rule: v.rule,
                message: v.message.clone(),
            }
        })
        .collect();
    located.sort_by_key(|v| (v.line.unwrap_or(usize::MAX), v.rule));
    ParseError::Invalid(located)
}

/// Canonical text of a valid netlist.
pub fn serialize_netlist(netlist: &Netlist) -> Result<String, ValidationReport> {
    let report = validate(netlist);
    if !report.is_ok() {
        return Err(report);
    }
    let mut out = String::new();
    out.push_str(NETLIST_HEADER);
    out.push('\n');
    for c in netlist.cells() {
        let _ = writeln!(out, "cell {} {} {}", c.id, c.kind, c.logic_delay);
    }
    for n in netlist.nets() {
        let _ = writeln!(out, "net {} -> {} {}", n.src, n.dst, n.net_delay);
    }
    for p in netlist.ff_pairs() {
        let _ = writeln!(out, "ffpair {} {}", p.d, p.q);
    }
    Ok(out)
}
