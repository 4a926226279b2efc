//! One row per block per metric family under a single fixed header. Columns
//! that do not belong to a row's family are left empty.

use super::{fmt_alpha, fmt_area, fmt_power, CombinedReport};

pub const CSV_HEADER: [&str; 33] = [
    "metric",
    "block",
    "critical",
    "LUT1",
    "LUT2",
    "LUT3",
    "LUT4",
    "LUT5",
    "LUT6",
    "FF",
    "CLK",
    "IN",
    "OUT",
    "MEM_IN",
    "unpaired_ff",
    "weighted_area",
    "system_total_ps",
    "system_logic_ps",
    "system_network_ps",
    "block_total_ps",
    "block_logic_ps",
    "block_network_ps",
    "static_uw",
    "dynamic_pj",
    "alpha",
    "active_cycles",
    "events",
    "dynamic_uw",
    "avg_uw",
    "rank",
    "cycles",
    "absent",
    "sets",
];

fn column(name: &str) -> usize {
    CSV_HEADER
        .iter()
        .position(|c| *c == name)
        .expect("known column")
}

pub fn render_csv(report: &CombinedReport) -> String {
    let mut w = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("write to memory");

    let blank = || vec![String::new(); CSV_HEADER.len()];
    let mut rows: Vec<Vec<String>> = Vec::new();

    if let Some(area) = &report.area {
        for (key, a) in &area.per_block {
            let mut row = blank();
            row[0] = "area".into();
            row[1] = key.name().into();
            for kind in crate::area::ResourceKind::ALL {
                row[column(kind.name())] = a.count(kind).to_string();
            }
            row[column("unpaired_ff")] = a.unpaired_ff.to_string();
            row[column("weighted_area")] = fmt_area(a.weighted_area);
            rows.push(row);
        }
    }
    if let Some(delay) = &report.delay {
        for (key, d) in &delay.per_block {
            let mut row = blank();
            row[0] = "delay".into();
            row[1] = key.name().into();
            row[2] = report.is_critical(key).to_string();
            row[column("system_total_ps")] = d.system.total_delay.to_string();
            row[column("system_logic_ps")] = d.system.logic_delay.to_string();
            row[column("system_network_ps")] = d.system.network_delay.to_string();
            row[column("block_total_ps")] = d.block.total_delay.to_string();
            row[column("block_logic_ps")] = d.block.logic_delay.to_string();
            row[column("block_network_ps")] = d.block.network_delay.to_string();
            let sets: Vec<String> = d.set_sizes.iter().map(usize::to_string).collect();
            row[column("sets")] = sets.join("/");
            rows.push(row);
        }
    }
    if let Some(power) = &report.power {
        for (key, p) in &power.per_block {
            let mut row = blank();
            row[0] = "power".into();
            row[1] = key.name().into();
            row[column("static_uw")] = fmt_power(p.static_uw);
            row[column("dynamic_pj")] = fmt_power(p.dynamic_pj);
            row[column("alpha")] = fmt_alpha(p.alpha);
            row[column("active_cycles")] = p.activity.active_cycles.to_string();
            row[column("events")] = p.activity.events.to_string();
            row[column("dynamic_uw")] = fmt_power(p.dynamic_uw);
            row[column("avg_uw")] = fmt_power(p.avg_uw);
            row[column("rank")] = report.rank(key).map_or(String::new(), |r| r.to_string());
            row[column("cycles")] = p.activity.cycles.to_string();
            row[column("absent")] = p.activity.absent.to_string();
            rows.push(row);
        }
    }
    for row in rows {
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("fields are UTF-8")
}
