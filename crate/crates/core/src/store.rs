//! Versioned JSON cache of reduced correlators.
//!
//! Layout (pretty-printed, fields in this order):
//!
//! ```text
//! { "schema_version": 1,
//!   "engine": { "chi": 2, "q_convention": "q^d", "max_points": 8 },
//!   "records": [ { "genus": 0, "insertions": "P:0,Q:1", "degree": 1,
//!                  "value": "1/1", "provenance": "String", "trace_hash": "…" } ] }
//! ```
//!
//! Records are sorted by (genus, sorted insertions). Saving a loaded file
//! reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{format_fraction, parse_fraction, Rational};
use crate::error::{Error, Result};
use crate::virasoro::{parse_insertions, CorrelatorKey, CorrelatorRecord, Rule, VirasoroEngine};

pub const SCHEMA_VERSION: u32 = 1;

/// Parameters a record depends on; records are only served to a matching engine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineParams {
    pub chi: i64,
    pub q_convention: String,
    pub max_points: usize,
}

impl EngineParams {
    pub fn of(engine: &VirasoroEngine) -> Self {
        Self { chi: engine.chi(), q_convention: "q^d".into(), max_points: engine.oracle().max_points() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoredRecord {
    pub value: Rational,
    pub provenance: Rule,
    pub trace_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheTable {
    pub params: EngineParams,
    pub records: BTreeMap<CorrelatorKey, StoredRecord>,
}

#[derive(Serialize, Deserialize)]
struct FileRecord {
    genus: u32,
    insertions: String,
    degree: Option<u32>,
    value: String,
    provenance: Rule,
    trace_hash: String,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema_version: u32,
    engine: EngineParams,
    records: Vec<FileRecord>,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

/// sha256 of the trace lines. A record preloaded from a cache carries the single
/// line "cached <hash>" and keeps its original hash.
pub fn trace_hash(trace: &[String]) -> String {
    if let [line] = trace {
        if let Some(h) = line.strip_prefix("cached ") {
            return h.to_string();
        }
    }
    let mut h = Sha256::new();
    for line in trace {
        h.update(line.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl CacheTable {
    pub fn new(params: EngineParams) -> Self {
        Self { params, records: BTreeMap::new() }
    }

    /// Snapshot of everything the engine has memoized.
    pub fn from_engine(engine: &VirasoroEngine) -> Self {
        let mut t = Self::new(EngineParams::of(engine));
        for r in engine.records() {
            t.insert(&r);
        }
        t
    }

    pub fn insert(&mut self, r: &CorrelatorRecord) {
        self.records.insert(
            r.key.clone(),
            StoredRecord { value: r.value.clone(), provenance: r.provenance, trace_hash: trace_hash(&r.trace) },
        );
    }

    pub fn get(&self, params: &EngineParams, key: &CorrelatorKey) -> Option<&StoredRecord> {
        (&self.params == params).then(|| self.records.get(key)).flatten()
    }

    /// Preloads the engine's memo; refuses a table written under other parameters.
    pub fn seed(&self, engine: &VirasoroEngine) -> Result<usize> {
        if self.params != EngineParams::of(engine) {
            return Err(Error::InvalidArgument(format!(
                "cache was written for {:?}, engine has {:?}",
                self.params,
                EngineParams::of(engine)
            )));
        }
        for (key, r) in &self.records {
            engine.insert_record(CorrelatorRecord {
                key: key.clone(),
                value: r.value.clone(),
                provenance: r.provenance,
                trace: vec![format!("cached {}", r.trace_hash)],
            });
        }
        Ok(self.records.len())
    }

    pub fn to_json(&self) -> String {
        let file = CacheFile {
            schema_version: SCHEMA_VERSION,
            engine: self.params.clone(),
            records: self
                .records
                .iter()
                .map(|(k, r)| FileRecord {
                    genus: k.genus,
                    insertions: k.insertions().iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                    degree: k.degree(),
                    value: format_fraction(&r.value),
                    provenance: r.provenance,
                    trace_hash: r.trace_hash.clone(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("cache serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let probe: VersionProbe = serde_json::from_str(text).map_err(|e| Error::Parse(format!("cache file: {e}")))?;
        if probe.schema_version != SCHEMA_VERSION {
            return Err(Error::MigrationRequired { found: probe.schema_version, expected: SCHEMA_VERSION });
        }
        let file: CacheFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("cache file: {e}")))?;
        let mut records = BTreeMap::new();
        for (i, r) in file.records.into_iter().enumerate() {
            let ctx = |e: Error| Error::Parse(format!("record {i}: {e}"));
            let key = CorrelatorKey::new(r.genus, parse_insertions(&r.insertions).map_err(ctx)?);
            if key.degree() != r.degree {
                return Err(Error::Parse(format!("record {i}: degree {:?} does not match {key}", r.degree)));
            }
            let value = parse_fraction(&r.value).map_err(ctx)?;
            records.insert(key, StoredRecord { value, provenance: r.provenance, trace_hash: r.trace_hash });
        }
        Ok(Self { params: file.engine, records })
    }

    /// Writes under an exclusive advisory lock.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = File::options().create(true).write(true).truncate(false).open(path)?;
        f.lock()?;
        f.set_len(0)?;
        f.write_all(self.to_json().as_bytes())?;
        f.sync_all()?;
        f.unlock()?;
        Ok(())
    }

    /// Reads under a shared advisory lock.
    pub fn load(path: &Path) -> Result<Self> {
        let mut f = File::open(path)?;
        f.lock_shared()?;
        let mut text = String::new();
        f.read_to_string(&mut text)?;
        f.unlock()?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use crate::virasoro::Insertion;

    #[test]
    fn round_trip_and_versioning() {
        let e = VirasoroEngine::new(2);
        let empty = CacheTable::from_engine(&e);
        assert_eq!(CacheTable::from_json(&empty.to_json()).unwrap(), empty);

        let k = CorrelatorKey::new(0, vec![Insertion::q(0), Insertion::q(0)]);
        assert_eq!(e.value(&k).unwrap(), int(1));
        let t = CacheTable::from_engine(&e);
        let text = t.to_json();
        assert!(text.contains("\"value\": \"1/1\""));
        assert_eq!(CacheTable::from_json(&text).unwrap().to_json(), text);

        let old = text.replacen("\"schema_version\": 1", "\"schema_version\": 0", 1);
        assert!(matches!(CacheTable::from_json(&old), Err(Error::MigrationRequired { found: 0, expected: 1 })));
        assert!(matches!(CacheTable::from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn parameters_guard_records() {
        let e = VirasoroEngine::new(2);
        e.value(&CorrelatorKey::new(1, vec![Insertion::p(1)])).unwrap();
        let t = CacheTable::from_engine(&e);
        let other = VirasoroEngine::new(0);
        assert!(t.seed(&other).is_err());
        let k = CorrelatorKey::new(1, vec![Insertion::p(1)]);
        assert!(t.get(&EngineParams::of(&other), &k).is_none());
        assert!(t.get(&EngineParams::of(&e), &k).is_some());
    }

    #[test]
    fn reseeding_keeps_hashes() {
        let e = VirasoroEngine::new(2);
        e.value(&CorrelatorKey::new(1, vec![Insertion::p(1), Insertion::q(2)])).unwrap();
        let t = CacheTable::from_engine(&e);
        let fresh = VirasoroEngine::new(2);
        assert_eq!(t.seed(&fresh).unwrap(), t.records.len());
        assert_eq!(CacheTable::from_engine(&fresh).to_json(), t.to_json());
    }
}
