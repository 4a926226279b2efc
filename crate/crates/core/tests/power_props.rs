//! Switching factor against the cycle-by-cycle replay, and the score arithmetic.

use blockscope_core::fixtures::{gcd_profile, gen_gcd, gen_random, gen_random_profile};
use blockscope_core::oracle::oracle_replay;
use blockscope_core::power::{average_power_uw, switching_factor};
use blockscope_core::{build_registry, power_score, BlockLabel, PowerModel};
use proptest::prelude::*;

#[test]
fn gcd_subtract_alpha() {
    let p = gcd_profile();
    let sub = BlockLabel::parse("subtract").unwrap();
    let a = switching_factor(&sub, &p);
    assert_eq!((a.active_cycles, a.cycles), (5, 10));
    assert_eq!(a.alpha(), 0.5);
    assert_eq!(oracle_replay(&p)[&sub].len(), 5);
}

#[test]
fn average_power_substitution() {
    assert_eq!(
        format!("{:.3}", average_power_uw(2.0, 10.0, 0.3, 100e6)),
        "302.000"
    );
}

#[test]
fn gcd_score_ranks_real_blocks() {
    let (n, p) = gen_gcd(2).unwrap();
    let r = build_registry(&n).unwrap();
    let score = power_score(&n, &r, &PowerModel::default(), &p).unwrap();
    assert_eq!(score.ranking.len(), 4);
    for w in score.ranking.windows(2) {
        let avg =
            |l: &BlockLabel| score.per_block[&blockscope_core::BlockKey::Block(l.clone())].avg_uw;
        assert!(avg(&w[0]) >= avg(&w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn replay_agrees(seed in any::<u64>()) {
        let profile = gen_random_profile(seed, &[]);
        let replay = oracle_replay(&profile);
        for (block, cycles) in &replay {
            let a = switching_factor(block, &profile);
            prop_assert_eq!(a.active_cycles, cycles.len() as u64, "{}", block);
            prop_assert!((0.0..=1.0).contains(&a.alpha()));
            prop_assert!(a.events >= a.active_cycles);
        }
    }

    #[test]
    fn score_decomposes(seed in any::<u64>(), n in 2usize..=80) {
        let netlist = gen_random(seed, n).unwrap();
        let registry = build_registry(&netlist).unwrap();
        let labels: Vec<BlockLabel> = registry.labels().cloned().collect();
        let profile = gen_random_profile(seed ^ 0x5eed, &labels);
        let model = PowerModel::default();
        let score = power_score(&netlist, &registry, &model, &profile).unwrap();
        for p in score.per_block.values() {
            prop_assert!((0.0..=1.0).contains(&p.alpha));
            let dynamic = p.dynamic_pj * p.alpha * model.frequency_hz / 1e6;
            prop_assert!((p.avg_uw - p.static_uw - dynamic).abs() < 5e-4);
        }
        prop_assert_eq!(score.ranking.len(), registry.blocks().len());
    }

    #[test]
    fn grouped_profile_matches_grouped_replay(seed in any::<u64>()) {
        let labels: Vec<BlockLabel> = ["top.fetch", "top.decode", "mem.ctrl", "alu"]
            .iter()
            .map(|l| BlockLabel::parse(l).unwrap())
            .collect();
        let profile = gen_random_profile(seed, &labels).grouped(1);
        for (block, cycles) in oracle_replay(&profile) {
            prop_assert_eq!(switching_factor(&block, &profile).active_cycles, cycles.len() as u64);
        }
    }
}
