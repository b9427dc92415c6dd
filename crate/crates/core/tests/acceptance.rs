//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use gw_p1::store::CacheTable;
use gw_p1::suites::{run_suite, SuiteOptions, SuiteReport};
use gw_p1::virasoro::VirasoroEngine;

const CRITERIA: &[(u32, &str, &[&str])] = &[
    (1, "one-point law", &["one-point"]),
    (2, "two-point closed form", &["two-point"]),
    (3, "genus-0 two-point and combinatorial identities", &["genus0-two-point"]),
    (4, "one-point genus expansion, Bernoulli, A089627", &["one-point-genus"]),
    (5, "Dubrovin-Yang C2, C3 vs OP", &["op-vs-dy"]),
    (6, "Virasoro confluence and all-Q passthrough", &["virasoro-confluence"]),
    (7, "residue identity, n + m <= 3, g <= 2", &["theorem-main"]),
    (8, "W(0,1)(u0) report", &["w01-u0", "virasoro-confluence", "theorem-main"]),
    (9, "EO correlators vs OP", &["op-vs-eo"]),
    (10, "spectral curve and Bergman kernel", &["spectral"]),
];

const ALL: &[&str] = &[
    "one-point",
    "two-point",
    "genus0-two-point",
    "one-point-genus",
    "op-vs-dy",
    "virasoro-confluence",
    "theorem-main",
    "w01-u0",
    "op-vs-eo",
    "spectral",
];

struct Run {
    reports: Vec<SuiteReport>,
    report_bytes: Vec<u8>,
    cache_bytes: Vec<u8>,
}

fn full_run(dir: &std::path::Path, tag: &str) -> Run {
    let engine = VirasoroEngine::new(2);
    let opts = SuiteOptions::default();
    let mut reports = Vec::new();
    for name in ALL {
        let t = Instant::now();
        let r = run_suite(name, &engine, &opts).unwrap_or_else(|e| panic!("suite {name}: {e}"));
        eprintln!("  [{tag}] {name}: {:.1?}", t.elapsed());
        reports.push(r);
    }
    let mut report_bytes = Vec::new();
    for r in &reports {
        report_bytes.extend(r.render().into_bytes());
        report_bytes.extend(serde_json::to_vec(r).unwrap());
        report_bytes.push(b'\n');
    }
    let path = dir.join(format!("cache-{tag}.json"));
    CacheTable::from_engine(&engine).save(&path).unwrap();
    let cache_bytes = std::fs::read(&path).unwrap();
    Run { reports, report_bytes, cache_bytes }
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let first = full_run(dir.path(), "run 1");
    let passed = |name: &str| first.reports.iter().find(|r| r.suite == name).is_some_and(|r| r.passed);

    let mut all_ok = true;
    for (n, label, suites) in CRITERIA {
        let ok = suites.iter().all(|s| passed(s));
        all_ok &= ok;
        println!("criterion {n:>2} {}: {label}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            for r in first.reports.iter().filter(|r| suites.contains(&r.suite.as_str()) && !r.passed) {
                print!("{}", r.render());
            }
        }
    }

    let second = full_run(dir.path(), "run 2");
    // a third engine preloaded from the first cache must write it back unchanged
    let reloaded = {
        let table = CacheTable::load(&dir.path().join("cache-run 1.json")).unwrap();
        let engine = VirasoroEngine::new(2);
        table.seed(&engine).unwrap();
        let path = dir.path().join("cache-reloaded.json");
        CacheTable::from_engine(&engine).save(&path).unwrap();
        std::fs::read(path).unwrap()
    };
    eprintln!(
        "  reports equal {}, caches equal {}, reload equal {}",
        first.report_bytes == second.report_bytes,
        first.cache_bytes == second.cache_bytes,
        first.cache_bytes == reloaded
    );
    let ok = first.report_bytes == second.report_bytes
        && first.cache_bytes == second.cache_bytes
        && first.cache_bytes == reloaded
        && !first.cache_bytes.is_empty();
    all_ok &= ok;
    println!(
        "criterion 11 {}: determinism and persistence (reports {} bytes, cache {} bytes, {} records)",
        if ok { "PASS" } else { "FAIL" },
        first.report_bytes.len(),
        first.cache_bytes.len(),
        CacheTable::from_json(std::str::from_utf8(&first.cache_bytes).unwrap()).map(|t| t.records.len()).unwrap_or(0)
    );

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
