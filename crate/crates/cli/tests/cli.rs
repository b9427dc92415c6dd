use std::process::{Command, Output};

fn gwp1(cache: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwp1")).env("GWP1_CACHE", cache).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn stationary_two_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = gwp1(&dir.path().join("c.json"), &["correlator", "--genus", "0", "--insertions", "Q:0,Q:0", "--method", "stationary"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1/1 genus 0 degree 1 [stationary]");

    let o = gwp1(&dir.path().join("c.json"), &["--json", "correlator", "--genus", "0", "--insertions", "Q:0,Q:0", "--method", "stationary"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["value"], "1/1");
    assert_eq!(v["degree"], 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.json");
    assert_eq!(gwp1(&c, &["correlator", "--genus", "0", "--insertions", ""]).status.code(), Some(1));
    assert_eq!(gwp1(&c, &["correlator", "--genus", "0", "--insertions", "R:0"]).status.code(), Some(1));
    assert_eq!(gwp1(&c, &["correlator", "--insertions", "Q:0"]).status.code(), Some(1));
    assert_eq!(
        gwp1(&c, &["correlator", "--genus", "0", "--insertions", "P:2,Q:0", "--method", "dy"]).status.code(),
        Some(4)
    );
    assert_eq!(gwp1(&c, &["series", "nonsense"]).status.code(), Some(4));
    assert_eq!(gwp1(&c, &["crosscheck", "nonsense"]).status.code(), Some(4));
    assert_eq!(gwp1(&c, &["eo", "--genus", "0", "--n", "2"]).status.code(), Some(4));
}

#[test]
fn all_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let o = gwp1(&dir.path().join("c.json"), &["correlator", "--genus", "0", "--insertions", "Q:0,Q:0,Q:0", "--method", "all-compare"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for m in ["virasoro", "stationary", "dy", "eo"] {
        assert!(out.contains(&format!("1/1 genus 0 degree 1 [{m}]")), "{out}");
    }
    assert!(out.contains("AGREE across 4 methods"));
}

#[test]
fn theorem_main_single_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = gwp1(&dir.path().join("c.json"), &["crosscheck", "theorem-main", "--nm", "1,1", "--orders", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS theorem-main"));
    let o = gwp1(&dir.path().join("c.json"), &["crosscheck", "theorem-main", "--nm", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cache_is_written_reused_and_cleared() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.json");
    let args = ["correlator", "--genus", "1", "--insertions", "P:2,Q:1"];
    let first = gwp1(&c, &args);
    assert_eq!(first.status.code(), Some(0));
    let bytes = std::fs::read(&c).unwrap();
    let second = gwp1(&c, &args);
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(std::fs::read(&c).unwrap(), bytes);

    let show = gwp1(&c, &["--json", "cache", "show"]);
    assert_eq!(show.stdout, bytes);
    assert_eq!(stdout(&gwp1(&c, &["cache", "path"])).trim(), c.display().to_string());
    assert_eq!(gwp1(&c, &["cache", "clear"]).status.code(), Some(0));
    assert!(!c.exists());

    std::fs::write(&c, String::from_utf8(bytes).unwrap().replacen("\"schema_version\": 1", "\"schema_version\": 9", 1)).unwrap();
    let o = gwp1(&c, &args);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("migration required"));
}

#[test]
fn tables_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.json");
    let o = gwp1(&c, &["stationary-table", "--max-weight", "4"]);
    let out = stdout(&o);
    assert!(out.contains("g=1 d=1 Q:2 = 1/24"), "{out}");
    assert!(out.contains("g=0 d=1 Q:0,Q:0 = 1/1"), "{out}");

    let o = gwp1(&c, &["--json", "series", "w01", "--q-order", "2"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let terms = v["terms"].as_array().unwrap();
    assert!(terms.iter().any(|t| t["coeff"] == "3/2" && t["exponents"]["q"] == 2 && t["exponents"]["x"] == -4));

    let o = gwp1(&c, &["eo", "--genus", "1", "--n", "1", "--max-level", "2"]);
    assert!(stdout(&o).contains("Q:2 = 1/24"));
}
