//! `blockscope-profile v1`
//!
//! ```text
//! blockscope-profile v1
//! cycles <N>
//! rule <rule_id> block <block_label>
//! fires <rule_id> <c1,c2,...>
//! writes <rule_id> <state_id>
//! reads <block_label> <state_id>
//! ```
//!
//! Rules must be declared before use. A state exists once some rule writes
//! it; a block exists once some rule is assigned to it. Firing lists are
//! strictly increasing, comma-separated without spaces, and every cycle is
//! below `N`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{decode, lex, split_header, ParseError};
use crate::annotation::BlockLabel;
use crate::power::ActivityProfile;

pub const PROFILE_HEADER: &str = "blockscope-profile v1";

pub fn parse_profile(bytes: &[u8]) -> Result<ActivityProfile, ParseError> {
    let text = decode(bytes)?;
    let lines = lex(text);
    let body = split_header(&lines, PROFILE_HEADER)?;

    let mut cycles: Option<(u64, usize)> = None;
    let mut profile = ActivityProfile::default();
    let mut fire_lines: BTreeMap<String, usize> = BTreeMap::new();
    let mut read_lines: Vec<(usize, BlockLabel, String)> = Vec::new();
    let mut write_lines: BTreeSet<(String, String)> = BTreeSet::new();

    for line in body {
        match line.text(0) {
            "cycles" => {
                line.expect_len(2, "cycles <N>")?;
                if cycles.is_some() {
                    return Err(line.semantic("duplicate cycles declaration"));
                }
                cycles = Some((line.unsigned(1, "cycle count")?, line.number));
            }
            "rule" => {
                line.expect_len(4, "rule <rule_id> block <block_label>")?;
                let rule = line.id(1, "rule id")?;
                if line.text(2) != "block" {
                    return Err(line.error(2, format!("expected `block`, found {}", line.text(2))));
                }
                let block = BlockLabel::parse(line.text(3)).map_err(|why| {
                    line.error(3, format!("invalid block label {} ({why})", line.text(3)))
                })?;
                if profile.rule_block.insert(rule.to_owned(), block).is_some() {
                    return Err(line.semantic(format!("duplicate rule declaration {rule}")));
                }
            }
            "fires" => {
                line.expect_len(3, "fires <rule_id> <c1,c2,...>")?;
                let rule = line.id(1, "rule id")?;
                if !profile.rule_block.contains_key(rule) {
                    return Err(line.semantic(format!("fires references undeclared rule {rule}")));
                }
                let mut list = Vec::new();
                for part in line.text(2).split(',') {
                    let valid = !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit());
                    let t: u64 =
                        part.parse().ok().filter(|_| valid).ok_or_else(|| {
                            line.error(2, format!("invalid firing cycle {part:?}"))
                        })?;
                    if list.last().is_some_and(|&prev| prev >= t) {
                        return Err(
                            line.error(2, format!("firing cycles not strictly increasing at {t}"))
                        );
                    }
                    list.push(t);
                }
                if fire_lines.insert(rule.to_owned(), line.number).is_some() {
                    return Err(line.semantic(format!("duplicate fires line for rule {rule}")));
                }
                profile.firings.insert(rule.to_owned(), list);
            }
            "writes" => {
                line.expect_len(3, "writes <rule_id> <state_id>")?;
                let rule = line.id(1, "rule id")?;
                let state = line.id(2, "state id")?;
                if !profile.rule_block.contains_key(rule) {
                    return Err(line.semantic(format!("writes references undeclared rule {rule}")));
                }
                write_lines.insert((rule.to_owned(), state.to_owned()));
            }
            "reads" => {
                line.expect_len(3, "reads <block_label> <state_id>")?;
                let block = BlockLabel::parse(line.text(1)).map_err(|why| {
                    line.error(1, format!("invalid block label {} ({why})", line.text(1)))
                })?;
                let state = line.id(2, "state id")?;
                read_lines.push((line.number, block, state.to_owned()));
            }
            other => return Err(line.error(0, format!("unknown directive {other}"))),
        }
    }

    let Some((n, _)) = cycles else {
        let line = lines.first().map_or(1, |l| l.number);
        return Err(ParseError::Semantic {
            line,
            message: "missing cycles declaration".into(),
        });
    };
    profile.cycles = n;
    for (rule, list) in &profile.firings {
        if let Some(&bad) = list.iter().find(|&&t| t >= n) {
            return Err(ParseError::Semantic {
                line: fire_lines[rule],
                message: format!("cycle {bad} out of range (cycles {n})"),
            });
        }
    }
    let states: BTreeSet<&str> = write_lines.iter().map(|(_, s)| s.as_str()).collect();
    let blocks: BTreeSet<&BlockLabel> = profile.rule_block.values().collect();
    for (line, block, state) in &read_lines {
        if !blocks.contains(block) {
            return Err(ParseError::Semantic {
                line: *line,
                message: format!("reads references undeclared block {block}"),
            });
        }
        if !states.contains(state.as_str()) {
            return Err(ParseError::Semantic {
                line: *line,
                message: format!("reads references undeclared state {state}"),
            });
        }
    }
    profile.writes = write_lines;
    profile.reads = read_lines.into_iter().map(|(_, b, s)| (b, s)).collect();
    Ok(profile)
}

/// Canonical text of a profile.
pub fn serialize_profile(profile: &ActivityProfile) -> String {
    let mut out = String::new();
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    let _ = writeln!(out, "cycles {}", profile.cycles);
    for (rule, block) in &profile.rule_block {
        let _ = writeln!(out, "rule {rule} block {block}");
    }
    for (rule, list) in &profile.firings {
        if list.is_empty() {
            continue;
        }
        let joined: Vec<String> = list.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "fires {rule} {}", joined.join(","));
    }
    for (rule, state) in &profile.writes {
        let _ = writeln!(out, "writes {rule} {state}");
    }
    for (block, state) in &profile.reads {
        let _ = writeln!(out, "reads {block} {state}");
    }
    out
}
