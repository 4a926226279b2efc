//! Parse/serialize round trips and error positions.

use blockscope_core::fixtures::{gcd_profile, gen_fig6, gen_gcd, gen_random, gen_random_profile};
use blockscope_core::io::{
    parse_netlist, parse_power_model, parse_profile, serialize_netlist, serialize_power_model,
    serialize_profile,
};
use blockscope_core::{build_registry, validate, Netlist, ParseError, PowerModel};
use proptest::prelude::*;

fn round_trips(netlist: &Netlist) {
    let text = serialize_netlist(netlist).unwrap();
    let doc = parse_netlist(text.as_bytes()).unwrap();
    assert_eq!(&doc.netlist, netlist);
    assert_eq!(serialize_netlist(&doc.netlist).unwrap(), text);
}

#[test]
fn fixtures_round_trip() {
    round_trips(&gen_fig6());
    for w in 1..=8 {
        round_trips(&gen_gcd(w).unwrap().0);
    }
    let p = gcd_profile();
    assert_eq!(parse_profile(serialize_profile(&p).as_bytes()).unwrap(), p);
}

#[test]
fn gcd_file_has_four_blocks() {
    let text = serialize_netlist(&gen_gcd(2).unwrap().0).unwrap();
    let doc = parse_netlist(text.as_bytes()).unwrap();
    assert!(validate(&doc.netlist).is_ok());
    assert_eq!(build_registry(&doc.netlist).unwrap().blocks().len(), 4);
}

#[test]
fn power_model_round_trip() {
    let m = PowerModel::default();
    assert_eq!(
        parse_power_model(serialize_power_model(&m).as_bytes()).unwrap(),
        m
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_netlists_round_trip(seed in any::<u64>(), n in 2usize..=150) {
        let netlist = gen_random(seed, n).unwrap();
        let text = serialize_netlist(&netlist).unwrap();
        let doc = parse_netlist(text.as_bytes()).unwrap();
        prop_assert_eq!(&doc.netlist, &netlist);
        prop_assert_eq!(serialize_netlist(&doc.netlist).unwrap(), text);
    }

    #[test]
    fn random_profiles_round_trip(seed in any::<u64>()) {
        let p = gen_random_profile(seed, &[]);
        let text = serialize_profile(&p);
        let back = parse_profile(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(serialize_profile(&back), text);
    }

    #[test]
    fn shuffled_directives_parse_to_the_same_netlist(seed in any::<u64>(), n in 2usize..=40) {
        let netlist = gen_random(seed, n).unwrap();
        let text = serialize_netlist(&netlist).unwrap();
        let mut lines: Vec<&str> = text.lines().skip(1).collect();
        lines.reverse();
        let shuffled = format!("blockscope-netlist v1\n# reversed\n{}\n", lines.join("\n"));
        prop_assert_eq!(parse_netlist(shuffled.as_bytes()).unwrap().netlist, netlist);
    }

    #[test]
    fn errors_point_at_the_offending_line(seed in any::<u64>(), n in 2usize..=30, pick in any::<prop::sample::Index>(), field in any::<prop::sample::Index>()) {
        let netlist = gen_random(seed, n).unwrap();
        let text = serialize_netlist(&netlist).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
        let at = 1 + pick.index(lines.len() - 1);
        let mut tokens: Vec<&str> = lines[at].split(' ').collect();
        let f = field.index(tokens.len());
        tokens[f] = "@@";
        lines[at] = tokens.join(" ");
        let broken = lines.join("\n");
        let err = parse_netlist(broken.as_bytes()).unwrap_err();
        prop_assert_eq!(err.line(), Some(at + 1), "{}", err);
        if let ParseError::Lexical { token, .. } = &err {
            prop_assert_eq!(token.as_str(), "@@");
        } else {
            prop_assert!(false, "lexical error expected, got {}", err);
        }
    }
}
