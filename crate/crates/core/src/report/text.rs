use std::fmt::Write as _;

use super::{fmt_alpha, fmt_area, fmt_power, CombinedReport};
use crate::area::{BlockArea, ResourceKind};
use crate::power::SCORE_NOTICE;

/// Left-aligned first column, right-aligned rest, two-space gutters.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.trim_end().to_owned() + "\n"
    };
    let mut out = line(header.to_vec());
    let rule: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn area_cells(name: String, a: &BlockArea) -> Vec<String> {
    let mut row = vec![name];
    row.extend(ResourceKind::ALL.iter().map(|k| a.count(*k).to_string()));
    row.push(a.unpaired_ff.to_string());
    row.push(fmt_area(a.weighted_area));
    row
}

/// Marker column: `*` for blocks on the global critical path.
fn mark(critical: bool) -> &'static str {
    if critical {
        "*"
    } else {
        " "
    }
}

pub fn render_text(report: &CombinedReport) -> String {
    let mut out = String::new();
    let meta = &report.metadata;
    let _ = writeln!(out, "blockscope {}", meta.tool_version);
    let _ = writeln!(out, "device: {}", meta.device.as_deref().unwrap_or("-"));
    let _ = writeln!(
        out,
        "group depth: {}",
        meta.group_depth.map_or("-".to_owned(), |d| d.to_string())
    );
    for (role, digest) in &meta.inputs {
        let _ = writeln!(out, "{role} sha256: {digest}");
    }

    if let Some(area) = &report.area {
        out.push_str("\nAREA\n");
        let mut header = vec!["block"];
        header.extend(ResourceKind::ALL.iter().map(|k| k.name()));
        header.extend(["unpaired_ff", "weighted"]);
        let mut rows: Vec<Vec<String>> = area
            .per_block
            .iter()
            .map(|(k, a)| area_cells(k.name().to_owned(), a))
            .collect();
        rows.push(area_cells("total".into(), &area.totals));
        out.push_str(&table(&header, &rows));
    }

    if let Some(delay) = &report.delay {
        let _ = writeln!(out, "\nDELAY (ps, block delay {})", delay.scope.name());
        let header = [
            "block",
            "system",
            "logic",
            "network",
            "block_delay",
            "logic",
            "network",
            "sets",
        ];
        let mut rows: Vec<Vec<String>> = delay
            .per_block
            .iter()
            .map(|(k, d)| {
                let sets: Vec<String> = d.set_sizes.iter().map(usize::to_string).collect();
                vec![
                    format!("{} {}", mark(report.is_critical(k)), k.name()),
                    d.system.total_delay.to_string(),
                    d.system.logic_delay.to_string(),
                    d.system.network_delay.to_string(),
                    d.block.total_delay.to_string(),
                    d.block.logic_delay.to_string(),
                    d.block.network_delay.to_string(),
                    if sets.is_empty() {
                        "-".into()
                    } else {
                        sets.join("/")
                    },
                ]
            })
            .collect();
        let g = &delay.global_critical;
        rows.push(vec![
            "  total".into(),
            g.total_delay.to_string(),
            g.logic_delay.to_string(),
            g.network_delay.to_string(),
            "-".into(),
            "-".into(),
            "-".into(),
            "-".into(),
        ]);
        out.push_str(&table(&header, &rows));
        if g.is_empty() {
            out.push_str("critical path: none\n");
        } else {
            let _ = writeln!(out, "critical path: {}", g.path.join(" -> "));
        }
    }

    if let Some(power) = &report.power {
        let _ = writeln!(
            out,
            "\nPOWER (uW at {} MHz)",
            fmt_power(power.frequency_hz / 1e6)
        );
        let _ = writeln!(out, "note: {SCORE_NOTICE}");
        let header = [
            "block",
            "static_uw",
            "dynamic_pj",
            "alpha",
            "active",
            "events",
            "dynamic_uw",
            "avg_uw",
            "rank",
        ];
        let mut rows: Vec<Vec<String>> = power
            .per_block
            .iter()
            .map(|(k, p)| {
                vec![
                    k.name().to_owned(),
                    fmt_power(p.static_uw),
                    fmt_power(p.dynamic_pj),
                    fmt_alpha(p.alpha),
                    format!("{}/{}", p.activity.active_cycles, p.activity.cycles),
                    p.activity.events.to_string(),
                    fmt_power(p.dynamic_uw),
                    fmt_power(p.avg_uw),
                    report.rank(k).map_or("-".into(), |r| r.to_string()),
                ]
            })
            .collect();
        let sum =
            |f: fn(&crate::power::BlockPower) -> f64| power.per_block.values().map(f).sum::<f64>();
        rows.push(vec![
            "total".into(),
            fmt_power(sum(|p| p.static_uw)),
            fmt_power(sum(|p| p.dynamic_pj)),
            "-".into(),
            "-".into(),
            "-".into(),
            fmt_power(sum(|p| p.dynamic_uw)),
            fmt_power(sum(|p| p.avg_uw)),
            "-".into(),
        ]);
        out.push_str(&table(&header, &rows));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::Netlist;
    use crate::report::testing::{combined, gcd_report};

    #[test]
    fn gcd_tables() {
        let text = render_text(&gcd_report());
        let area: Vec<&str> = text
            .split("\nAREA\n")
            .nth(1)
            .unwrap()
            .split("\n\n")
            .next()
            .unwrap()
            .lines()
            .collect();
        // header, rule, 4 blocks, pseudo-block, totals
        assert_eq!(area.len(), 8, "{text}");
        assert!(area[6].starts_with("(unannotated)"));
        assert!(area[7].starts_with("total"));
        assert!(text.contains(SCORE_NOTICE));
    }

    #[test]
    fn critical_blocks_are_starred() {
        let report = gcd_report();
        let text = render_text(&report);
        let delay = report.delay.as_ref().unwrap();
        assert!(!delay.critical_blocks.is_empty());
        for label in &delay.critical_blocks {
            assert!(text.contains(&format!("* {label} ")), "{label}\n{text}");
        }
    }

    #[test]
    fn empty_netlist_has_totals_only() {
        let text = render_text(&combined(&Netlist::default(), false));
        let area = text.split("\nAREA\n").nth(1).unwrap();
        assert_eq!(
            area.lines().nth(2).unwrap().split_whitespace().next(),
            Some("total")
        );
        assert!(text.contains("critical path: none"));
    }

    #[test]
    fn deterministic() {
        assert_eq!(render_text(&gcd_report()), render_text(&gcd_report()));
    }
}
