use gw_p1::closed_forms::*;
use gw_p1::stationary::{connected_f, Partition, StationaryKey, StationaryOracle};
use proptest::prelude::*;

#[test]
fn one_point_closed_forms_match_defining_sums() {
    for g in 0..=3 {
        let c = one_point_genus_check(g, 12).unwrap();
        assert!(c.passed(), "{}: {:?}", c.summary(), c.mismatches);
    }
}

#[test]
fn one_point_agrees_with_op_recursion() {
    let oracle = StationaryOracle::new();
    for g in 0..4u32 {
        for d in 0..5u32 {
            if g == 0 && d == 0 {
                continue;
            }
            let key = StationaryKey::new(g, d, vec![2 * g + 2 * d - 2]);
            assert_eq!(oracle.correlator(&key).unwrap(), one_point_series(g, d).unwrap(), "g={g} d={d}");
        }
    }
}

#[test]
fn bernoulli_and_a089627() {
    assert!(bernoulli_check(16).unwrap().passed());
    let c = a089627_gf(11, 6).unwrap();
    assert!(c.passed(), "{:?}", c.mismatches);
    for g in 1..5 {
        assert!(a089627_resummation_check(g, 10).unwrap().passed());
    }
}

#[test]
fn two_point_closed_form_matches_op() {
    let oracle = StationaryOracle::new();
    for m in 1..=3u32 {
        let f = two_point_closed(m, [8, 8]).unwrap();
        let g = connected_f(&Partition::ones(m), &Partition::ones(m), 2, &[8, 8]).unwrap();
        assert_eq!(f, g, "m={m}");
        // coefficient of z1^{k1+1} z2^{k2+1} is the invariant in the unique genus allowed
        for (e, c) in f.terms() {
            let key = StationaryKey::from_levels(0, vec![e[0] as u32 - 1, e[1] as u32 - 1]);
            let genus = (e[0] + e[1] - 2 * m as i64) / 2;
            let key = StationaryKey::new(genus as u32, m, key.unwrap().levels().to_vec());
            assert_eq!(*c, oracle.correlator(&key).unwrap(), "m={m} e={e:?}");
        }
    }
}

#[test]
fn genus_zero_two_point() {
    let oracle = StationaryOracle::new();
    for n1 in 0..4u32 {
        for n2 in 0..4u32 {
            let key = StationaryKey::new(0, n1 + n2 + 1, vec![2 * n1, 2 * n2]);
            assert_eq!(oracle.correlator(&key).unwrap(), genus0_two_point(n1, n2, Parity::Even).unwrap());
            if n1 >= 1 && n2 >= 1 {
                let key = StationaryKey::new(0, n1 + n2, vec![2 * n1 - 1, 2 * n2 - 1]);
                assert_eq!(oracle.correlator(&key).unwrap(), genus0_two_point(n1, n2, Parity::Odd).unwrap());
            }
        }
    }
}

#[test]
fn w02_and_curve() {
    let oracle = StationaryOracle::new();
    let c = w02_check(&oracle, 7).unwrap();
    assert!(c.passed(), "{:?}", c.mismatches);
    let c = spectral_curve_check(12).unwrap();
    assert!(c.passed(), "{:?}", c.mismatches);
    let c = bergman_check(12).unwrap();
    assert!(c.passed(), "{:?}", c.mismatches);
}

proptest! {
    #[test]
    fn binomial_identities(n1 in 0u32..8, n2 in 0u32..8) {
        let id = combinatorial_identities(n1, n2);
        prop_assert_eq!(&id.even_lhs, &id.even_rhs);
        if let Some(odd) = id.odd {
            prop_assert_eq!(&odd.lhs, &odd.rhs);
        }
    }

    #[test]
    fn double_sum_matches_series(g in 0u32..6, d in 1u32..7) {
        prop_assert_eq!(one_point_series(g, d).unwrap(), one_point_double_sum(g, d).unwrap());
    }
}
