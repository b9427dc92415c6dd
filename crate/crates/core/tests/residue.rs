use gw_p1::algebra::int;
use gw_p1::residue::*;
use gw_p1::virasoro::{Class, CorrelatorKey, Insertion, VirasoroEngine};

fn small() -> ResidueOrders {
    ResidueOrders { depth: 8, q_max: 3, max_genus: 1 }
}

#[test]
fn identity_holds_with_the_operator_sum_kernel() {
    let e = VirasoroEngine::new(2);
    for (n, m) in [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2)] {
        let c = verify_theorem_main(&e, n, m, small(), DKernel::OperatorSum).unwrap();
        assert!(c.passed(), "{}: {:?}", c.summary(), c.mismatches.iter().take(3).collect::<Vec<_>>());
    }
}

#[test]
fn printed_kernel_is_reported_failing() {
    let e = VirasoroEngine::new(2);
    let c = verify_theorem_main(&e, 1, 0, small(), DKernel::Printed).unwrap();
    assert!(!c.passed());
}

#[test]
fn genus_zero_one_point_function() {
    let e = VirasoroEngine::new(2);
    let w = assemble_w(&e, &[Slot::new("x", Class::Q, 10)], 0, 4).unwrap();
    // Σ_d (2d−1)!/d!²·q^d·x^{−2d}
    for (d, c) in [(1, int(1)), (2, int(3) / int(2)), (3, int(10) / int(3))] {
        assert_eq!(w.series.coeff(&[("x", -2 * d), ("q", d)]).unwrap(), c);
    }
    assert!(assemble_w(&e, &[], 0, 4).is_err());
}

#[test]
fn w01_report() {
    let r = w01_u0_series(&VirasoroEngine::new(2), 5, 10).unwrap();
    assert!(r.explained.passed(), "{:?}", r.explained.mismatches);
    assert!(!r.versus_2d.passed());
    // d = 1 harmonic term of the display
    let dilaton = VirasoroEngine::new(2).dilaton_rule(&CorrelatorKey::new(0, vec![Insertion::p(1)])).unwrap();
    assert_eq!(r.displayed.coeff(&[("q", 1), ("u0", -2)]).unwrap(), int(-2));
    assert_eq!(r.engine_sigma.coeff(&[("q", 1), ("u0", -2)]).unwrap(), dilaton);
}
