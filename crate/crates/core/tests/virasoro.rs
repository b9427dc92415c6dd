use gw_p1::algebra::{int, rat};
use gw_p1::stationary::{StationaryKey, StationaryOracle};
use gw_p1::virasoro::{Strategy as Order, *};
use gw_p1::Error;
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn key(g: u32, s: &str) -> CorrelatorKey {
    CorrelatorKey::new(g, parse_insertions(s).unwrap())
}

#[test]
fn string_examples() {
    let e = VirasoroEngine::new(2);
    assert_eq!(e.string_rule(&key(0, "P:0,P:0,Q:0")).unwrap(), int(1));
    let expected = StationaryOracle::new().correlator(&StationaryKey::new(0, 1, vec![0])).unwrap();
    assert_eq!(e.string_rule(&key(0, "P:0,Q:1")).unwrap(), expected);
    assert_eq!(e.string_rule(&key(1, "P:0,Q:0,Q:0")).unwrap(), int(0));
    assert!(e.string_rule(&key(0, "P:1,Q:0")).is_err());
}

#[test]
fn dilaton_examples() {
    let e = VirasoroEngine::new(2);
    let q0 = StationaryOracle::new().correlator(&StationaryKey::new(0, 1, vec![0])).unwrap();
    assert_eq!(e.dilaton_rule(&key(0, "P:1")).unwrap(), -int(2) * q0);
    // the exceptional term is cancelled by −χ⟨τ₀(Q)τ₀(P)τ₀(P)⟩
    assert_eq!(e.dilaton_rule(&key(0, "P:1,P:0,P:0")).unwrap(), int(0));
    assert_eq!(e.string_rule(&key(0, "P:1,P:0,P:0")).unwrap(), int(0));
    assert!(e.dilaton_rule(&key(0, "P:0,Q:0")).is_err());
}

#[test]
fn two_elimination_orders() {
    let k = key(0, "P:2,Q:0");
    let a = VirasoroEngine::new(2).value(&k).unwrap();
    let b = VirasoroEngine::new(2).with_strategy(Order::LowestFirst).value(&k).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, VirasoroEngine::new(2).virasoro_rule(&k, 2).unwrap());
}

#[test]
fn degree_and_passthrough() {
    let e = VirasoroEngine::new(2);
    assert_eq!(key(0, "P:0,Q:0,Q:1").degree(), Some(1));
    assert_eq!(key(0, "P:0,Q:0,Q:0").degree(), None);
    assert_eq!(key(0, "Q:1").degree(), None);
    assert_eq!(e.value(&key(0, "Q:1")).unwrap(), int(0));
    assert_eq!(e.value(&key(1, "Q:2")).unwrap(), rat(1, 24));
    assert_eq!(e.value(&key(0, "P:0,Q:0,Q:1")).unwrap(), e.string_rule(&key(0, "P:0,Q:0,Q:1")).unwrap());
}

#[test]
fn other_targets_have_no_oracle() {
    let e = VirasoroEngine::new(0);
    assert!(matches!(e.value(&key(1, "Q:2")), Err(Error::NoStationaryOracle(0))));
}

#[test]
fn small_confluence_suite() {
    let e = VirasoroEngine::new(2);
    let keys = random_keys(7, 40, 4, 5, 2, 4);
    let c = confluence_check(&e, &keys, &[Order::LowestFirst, Order::Seeded(3)]).unwrap();
    assert!(c.passed(), "{:?}", c.mismatches);
    assert!(dilaton_string_check(&e, &keys).unwrap().mismatches.is_empty());
    assert!(stationary_consistency_check(&e, 2, 3, 4).unwrap().passed());
}

#[test]
fn records_carry_provenance() {
    let e = VirasoroEngine::new(2);
    let r = e.reduce(&key(1, "P:3,Q:0")).unwrap();
    assert!(!r.trace.is_empty());
    assert!(matches!(r.provenance, Rule::Virasoro(3)));
}

fn insertion() -> impl proptest::strategy::Strategy<Value = Insertion> {
    (any::<bool>(), 0u32..5).prop_map(|(p, l)| if p { Insertion::p(l) } else { Insertion::q(l) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orders_agree(g in 0u32..2, ins in prop::collection::vec(insertion(), 1..4), seed in any::<u64>()) {
        let k = CorrelatorKey::new(g, ins);
        prop_assume!(k.is_stable() && k.degree().is_some_and(|d| d <= 3));
        let a = VirasoroEngine::new(2).value(&k).unwrap();
        let b = VirasoroEngine::new(2).with_strategy(Order::Seeded(seed)).value(&k).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn insertion_grammar_round_trips(ins in prop::collection::vec(insertion(), 1..6)) {
        let text = ins.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_insertions(&text).unwrap(), ins);
    }
}
