//! Structured fixpoint and agreement between the three renderers.

use std::collections::BTreeMap;

use blockscope_core::fixtures::{gen_fig6, gen_gcd, gen_random, gen_random_profile};
use blockscope_core::report::{
    parse_structured, render_csv, render_document, render_structured, render_text,
};
use blockscope_core::{
    area_report, build_registry, delay_report, power_score, AreaWeights, BlockDelayScope,
    BlockLabel, CircuitGraph, CombinedReport, Metadata, Netlist, PowerModel,
};
use proptest::prelude::*;

fn report_for(netlist: &Netlist, profile_seed: Option<u64>) -> CombinedReport {
    let registry = build_registry(netlist).unwrap();
    let graph = CircuitGraph::new(netlist).unwrap();
    let labels: Vec<BlockLabel> = registry.labels().cloned().collect();
    CombinedReport {
        metadata: Metadata {
            tool_version: "test".into(),
            device: None,
            group_depth: Some(2),
            inputs: BTreeMap::new(),
        },
        area: Some(area_report(netlist, &registry, &AreaWeights::default()).unwrap()),
        delay: Some(delay_report(&graph, &registry, BlockDelayScope::default()).unwrap()),
        power: profile_seed.map(|s| {
            let profile = gen_random_profile(s, &labels);
            power_score(netlist, &registry, &PowerModel::default(), &profile).unwrap()
        }),
    }
}

fn fixpoint(report: &CombinedReport) {
    let text = render_structured(report);
    let doc = parse_structured(&text).unwrap();
    assert_eq!(render_document(&doc), text);
}

#[test]
fn fixtures_are_fixpoints() {
    fixpoint(&report_for(&gen_fig6(), None));
    fixpoint(&report_for(&gen_gcd(2).unwrap().0, Some(1)));
}

/// Every CSV cell must appear verbatim in the structured and text outputs.
fn formats_agree(report: &CombinedReport) {
    let csv = render_csv(report);
    let structured = render_structured(report);
    let text = render_text(report);
    let mut rows = csv::Reader::from_reader(csv.as_bytes());
    let header = rows.headers().unwrap().clone();
    for rec in rows.records() {
        let rec = rec.unwrap();
        for (col, value) in header.iter().zip(rec.iter()) {
            if value.is_empty() || matches!(col, "metric" | "critical" | "sets" | "absent") {
                continue;
            }
            if col != "block" && col != "rank" && col != "cycles" {
                assert!(
                    structured.contains(&format!(": {value}")),
                    "{col}={value} missing from structured output"
                );
            }
            assert!(
                text.contains(value),
                "{col}={value} missing from text output"
            );
        }
    }
}

#[test]
fn gcd_formats_agree() {
    formats_agree(&report_for(&gen_gcd(3).unwrap().0, Some(9)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_reports_are_fixpoints(seed in any::<u64>(), n in 2usize..=60) {
        let report = report_for(&gen_random(seed, n).unwrap(), Some(seed));
        let text = render_structured(&report);
        let doc = parse_structured(&text).unwrap();
        prop_assert_eq!(render_document(&doc), text);
        prop_assert!(report.is_consistent());
    }

    #[test]
    fn random_formats_agree(seed in any::<u64>(), n in 2usize..=40) {
        formats_agree(&report_for(&gen_random(seed, n).unwrap(), Some(seed)));
    }

    #[test]
    fn renderers_are_deterministic(seed in any::<u64>(), n in 2usize..=40) {
        let netlist = gen_random(seed, n).unwrap();
        let a = report_for(&netlist, Some(seed));
        let b = report_for(&netlist, Some(seed));
        prop_assert_eq!(render_text(&a), render_text(&b));
        prop_assert_eq!(render_csv(&a), render_csv(&b));
        prop_assert_eq!(render_structured(&a), render_structured(&b));
    }
}
