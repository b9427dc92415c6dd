use gw_p1::dy::*;
use gw_p1::stationary::{StationaryKey, StationaryOracle};

#[test]
fn single_correlators_match_op() {
    let oracle = StationaryOracle::new();
    for (g, levels) in [(0, vec![0, 0]), (1, vec![1, 1]), (0, vec![0, 0, 0]), (1, vec![0, 1, 1]), (0, vec![2, 2])] {
        let key = StationaryKey::from_levels(g, levels.clone()).unwrap();
        assert_eq!(dy_correlator(&key).unwrap(), oracle.correlator(&key).unwrap(), "g={g} {levels:?}");
    }
}

#[test]
fn two_and_three_point_reports() {
    let oracle = StationaryOracle::new();
    let (c, fit) = dy_vs_op_report(&oracle, 2, 8).unwrap();
    assert!(c.passed(), "{:?}", c.mismatches);
    assert_eq!(fit.offset, 0);
    let (c, fit) = dy_vs_op_report(&oracle, 3, 7).unwrap();
    assert!(c.passed(), "{:?}", c.mismatches);
    assert_eq!(fit.offset, 1);
}
