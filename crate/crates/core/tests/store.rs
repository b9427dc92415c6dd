use gw_p1::algebra::rat;
use gw_p1::store::*;
use gw_p1::virasoro::{parse_insertions, CorrelatorKey, CorrelatorRecord, Rule, VirasoroEngine};
use gw_p1::Error;
use proptest::prelude::*;

#[test]
fn file_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.json");
    let e = VirasoroEngine::new(2);
    for s in ["P:2,Q:0", "P:1,P:1,Q:2", "Q:0,Q:0"] {
        e.value(&CorrelatorKey::new(0, parse_insertions(s).unwrap())).unwrap();
    }
    let t = CacheTable::from_engine(&e);
    t.save(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let loaded = CacheTable::load(&path).unwrap();
    assert_eq!(loaded, t);
    loaded.save(&path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
}

#[test]
fn malformed_records_name_the_record() {
    let e = VirasoroEngine::new(2);
    e.value(&CorrelatorKey::new(0, parse_insertions("Q:0,Q:0").unwrap())).unwrap();
    let text = CacheTable::from_engine(&e).to_json();
    let bad = text.replacen("\"1/1\"", "\"one\"", 1);
    match CacheTable::from_json(&bad) {
        Err(Error::Parse(m)) => assert!(m.contains("record 0"), "{m}"),
        other => panic!("{other:?}"),
    }
    let bad = text.replacen("\"Q:0,Q:0\"", "\"X:0\"", 1);
    assert!(matches!(CacheTable::from_json(&bad), Err(Error::Parse(_))));
    let newer = text.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
    assert!(matches!(CacheTable::from_json(&newer), Err(Error::MigrationRequired { found: 2, .. })));
}

#[test]
fn separate_runs_write_identical_files() {
    let run = || {
        let e = VirasoroEngine::new(2);
        for k in gw_p1::virasoro::random_keys(11, 20, 3, 4, 1, 3) {
            e.value(&k).unwrap();
        }
        CacheTable::from_engine(&e).to_json()
    };
    assert_eq!(run(), run());
}

proptest! {
    #[test]
    fn arbitrary_tables_round_trip(
        entries in prop::collection::vec((0u32..4, "[PQ]:[0-9]{1,2}(,[PQ]:[0-9]{1,2}){0,3}", -50i64..50, 1i64..40), 0..12)
    ) {
        let mut t = CacheTable::new(EngineParams { chi: 2, q_convention: "q^d".into(), max_points: 8 });
        for (g, ins, n, d) in entries {
            let key = CorrelatorKey::new(g, parse_insertions(&ins).unwrap());
            t.insert(&CorrelatorRecord { key, value: rat(n, d), provenance: Rule::Stationary, trace: vec![ins.clone()] });
        }
        let text = t.to_json();
        let back = CacheTable::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back, t);
    }
}
