//! Conservation and grouping properties of the area breakdown.

use std::collections::BTreeMap;

use blockscope_core::fixtures::{gen_fig6, gen_gcd, gen_random};
use blockscope_core::{
    area_report, build_registry, group_to_depth, AreaReport, AreaWeights, BlockKey, CellKind,
    DeviceProfile, Netlist, ResourceKind,
};
use proptest::prelude::*;

/// Resource census of a netlist counted straight from its cells.
fn census(netlist: &Netlist) -> BTreeMap<ResourceKind, u64> {
    let mut out = BTreeMap::new();
    for (kind, n) in netlist.kind_census() {
        let res = ResourceKind::of_cell(kind);
        *out.entry(res).or_insert(0) += n;
    }
    // Each pair folds its Q port into the D port.
    let pairs = netlist.ff_pairs().len() as u64;
    if pairs > 0 {
        *out.get_mut(&ResourceKind::Ff).unwrap() -= pairs;
    }
    out.retain(|_, n| *n > 0);
    out
}

fn summed(report: &AreaReport) -> BTreeMap<ResourceKind, u64> {
    let mut out = BTreeMap::new();
    for area in report.per_block.values() {
        for (k, n) in &area.counts {
            *out.entry(*k).or_insert(0) += n;
        }
    }
    out
}

fn conserved(netlist: &Netlist) {
    let registry = build_registry(netlist).unwrap();
    let report = area_report(netlist, &registry, &AreaWeights::default()).unwrap();
    assert_eq!(summed(&report), census(netlist));
    assert_eq!(report.totals.counts, census(netlist));
}

#[test]
fn fixtures_conserve_area() {
    conserved(&gen_fig6());
    for width in 1..=8 {
        conserved(&gen_gcd(width).unwrap().0);
    }
}

#[test]
fn gcd_registers_hold_width_flip_flops() {
    let (n, _) = gen_gcd(2).unwrap();
    let registry = build_registry(&n).unwrap();
    let report = area_report(&n, &registry, &AreaWeights::default()).unwrap();
    for reg in ["x", "y"] {
        let key = BlockKey::Block(blockscope_core::BlockLabel::parse(reg).unwrap());
        assert_eq!(report.per_block[&key].count(ResourceKind::Ff), 2);
        assert_eq!(report.per_block[&key].unpaired_ff, 0);
    }
}

#[test]
fn device_profiles_leave_area_alone() {
    let reports: Vec<_> = DeviceProfile::builtins()
        .iter()
        .map(|d| {
            let (n, _) = blockscope_core::fixtures::gen_gcd_for(3, d).unwrap();
            let r = build_registry(&n).unwrap();
            area_report(&n, &r, &AreaWeights::default()).unwrap()
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[1], reports[2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conservation(seed in any::<u64>(), n in 2usize..=120) {
        let netlist = gen_random(seed, n).unwrap();
        let registry = build_registry(&netlist).unwrap();
        let report = area_report(&netlist, &registry, &AreaWeights::default()).unwrap();
        prop_assert_eq!(summed(&report), census(&netlist));
        let unpaired: u64 = report.per_block.values().map(|a| a.unpaired_ff).sum();
        let ports = netlist.cells().iter().filter(|c| matches!(c.kind, CellKind::FfD | CellKind::FfQ)).count() as u64;
        prop_assert_eq!(unpaired, ports - 2 * netlist.ff_pairs().len() as u64);
    }

    #[test]
    fn registry_partitions_cells(seed in any::<u64>(), n in 2usize..=120) {
        let netlist = gen_random(seed, n).unwrap();
        let registry = build_registry(&netlist).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for key in registry.keys() {
            for c in registry.cells_of_key(&key).unwrap() {
                prop_assert!(seen.insert(c.clone()), "{} owned twice", c);
            }
        }
        prop_assert_eq!(seen.len(), netlist.cells().len());
        prop_assert_eq!(build_registry(&netlist).unwrap(), registry);
    }

    #[test]
    fn grouping_commutes_with_area(seed in any::<u64>(), n in 2usize..=120, depth in 1usize..=3) {
        let netlist = gen_random(seed, n).unwrap();
        let registry = build_registry(&netlist).unwrap();
        let weights = AreaWeights::default();
        let fine = area_report(&netlist, &registry, &weights).unwrap();
        let grouped = group_to_depth(&registry, depth);
        prop_assert_eq!(group_to_depth(&grouped, depth), grouped.clone());
        let coarse = area_report(&netlist, &grouped, &weights).unwrap();

        let mut expected: BTreeMap<BlockKey, BTreeMap<ResourceKind, u64>> = BTreeMap::new();
        for (key, area) in &fine.per_block {
            let key = match key {
                BlockKey::Block(l) => BlockKey::Block(l.truncate(depth)),
                BlockKey::Unannotated => BlockKey::Unannotated,
            };
            let slot = expected.entry(key).or_default();
            for (k, c) in &area.counts {
                *slot.entry(*k).or_insert(0) += c;
            }
        }
        let got: BTreeMap<BlockKey, BTreeMap<ResourceKind, u64>> =
            coarse.per_block.iter().map(|(k, a)| (k.clone(), a.counts.clone())).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn weighted_area_scales(seed in any::<u64>(), n in 2usize..=60, factor in 0.0f64..10.0) {
        let netlist = gen_random(seed, n).unwrap();
        let registry = build_registry(&netlist).unwrap();
        let base = area_report(&netlist, &registry, &AreaWeights::default()).unwrap();
        let scaled = area_report(&netlist, &registry, &AreaWeights::default().scaled(factor)).unwrap();
        for (a, b) in base.per_block.values().zip(scaled.per_block.values()) {
            prop_assert!((a.weighted_area * factor - b.weighted_area).abs() < 1e-9);
        }
    }
}
