use gw_p1::algebra::{int, rat};
use gw_p1::eo::*;
use gw_p1::stationary::StationaryOracle;

#[test]
fn named_values() {
    let e = EoEngine::calibrated(int(1)).unwrap();
    assert_eq!(e.correlators(0, 3, 0).unwrap()[&vec![0, 0, 0]], int(1));
    assert_eq!(e.correlators(1, 1, 2).unwrap()[&vec![2]], rat(1, 24));
}

#[test]
fn low_cases_match_op() {
    let e = EoEngine::calibrated(int(1)).unwrap();
    let oracle = StationaryOracle::new();
    for (g, n, l) in [(0, 3, 4), (1, 1, 6), (0, 4, 3), (1, 2, 3)] {
        let c = eo_check(&e, &oracle, g, n, l).unwrap();
        assert!(c.passed(), "{}: {:?}", c.summary(), c.mismatches);
    }
}

#[test]
fn symmetry_and_unstable_keys() {
    let e = EoEngine::calibrated(int(1)).unwrap();
    assert!(e.omega(0, 4).unwrap().is_symmetric());
    assert!(e.omega(0, 2).is_err());
    assert!(e.omega(1, 0).is_err());
}

#[test]
fn other_sign_fails_calibration_target() {
    let e = EoEngine::with_sign(int(1), 1).unwrap();
    assert_eq!(e.correlators(0, 3, 0).unwrap()[&vec![0, 0, 0]], int(-1));
}
