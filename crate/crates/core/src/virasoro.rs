//! Correlator-form Virasoro reduction of descendant invariants ⟨∏τ_a(P)∏τ_b(Q)⟩
//! to the stationary sector.
//!
//! A τ₀(P) head is removed by the string equation (L₋₁), a τ₁(P) head by the
//! dilaton-type L₀ constraint, and τ_k(P) with k ≥ 2 by L_{k−1}, which trades it
//! for fusions, a conversion and fissions. Every rule removes one P-insertion,
//! so reduction terminates in stationary keys.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{factorial, harmonic, int, Rational};
use crate::error::{Error, Result};
use crate::report::Check;
use crate::stationary::{StationaryKey, StationaryOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    P,
    Q,
}

impl Class {
    /// Complex degree of the class.
    pub fn degree(self) -> i64 {
        match self {
            Class::P => 0,
            Class::Q => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Insertion {
    pub class: Class,
    pub level: u32,
}

impl Insertion {
    pub fn p(level: u32) -> Self {
        Self { class: Class::P, level }
    }

    pub fn q(level: u32) -> Self {
        Self { class: Class::Q, level }
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}", self.class, self.level)
    }
}

impl FromStr for Insertion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (class, level) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("insertion `{s}` is not of the form P:k or Q:k")))?;
        let class = match class.trim() {
            "P" | "p" => Class::P,
            "Q" | "q" => Class::Q,
            other => return Err(Error::Parse(format!("unknown class `{other}`"))),
        };
        let level = level.trim().parse().map_err(|_| Error::Parse(format!("bad level in `{s}`")))?;
        Ok(Self { class, level })
    }
}

/// Parses "P:3,Q:0,Q:1". The empty string is an empty list.
pub fn parse_insertions(s: &str) -> Result<Vec<Insertion>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

/// A connected correlator: genus plus a multiset of insertions (kept sorted).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CorrelatorKey {
    pub genus: u32,
    insertions: Vec<Insertion>,
}

impl CorrelatorKey {
    pub fn new(genus: u32, mut insertions: Vec<Insertion>) -> Self {
        insertions.sort_unstable();
        Self { genus, insertions }
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }

    pub fn len(&self) -> usize {
        self.insertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty()
    }

    /// d from Σ(k_i + deg γ_i) = 2g − 2 + 2d + n, if it is a nonnegative integer.
    pub fn degree(&self) -> Option<u32> {
        let n = self.insertions.len() as i64;
        let total: i64 = self.insertions.iter().map(|i| i.level as i64 + i.class.degree()).sum();
        let twice = total - n + 2 - 2 * self.genus as i64;
        (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as u32)
    }

    /// False for degree-0 keys with (g, n) ∈ {(0,0), (0,1), (0,2), (1,0)}.
    pub fn is_stable(&self) -> bool {
        let n = self.insertions.len();
        !(self.degree() == Some(0) && matches!((self.genus, n), (0, 0) | (0, 1) | (0, 2) | (1, 0)))
    }

    pub fn p_count(&self) -> usize {
        self.insertions.iter().filter(|i| i.class == Class::P).count()
    }

    pub fn stationary(&self) -> Option<StationaryKey> {
        if self.p_count() > 0 {
            return None;
        }
        let d = self.degree()?;
        Some(StationaryKey::new(self.genus, d, self.insertions.iter().map(|i| i.level).collect()))
    }

    fn without(&self, index: usize) -> Vec<Insertion> {
        let mut rest = self.insertions.clone();
        rest.remove(index);
        rest
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for i in &self.insertions {
            write!(f, "t{}({:?})", i.level, i.class)?;
        }
        match self.degree() {
            Some(d) => write!(f, ">_(g={},d={d})", self.genus),
            None => write!(f, ">_(g={},d=-)", self.genus),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// no integer degree, or an unstable degree-0 key
    Vanishing,
    Stationary,
    String,
    Dilaton,
    /// L_{k−1} applied to a τ_k(P) head, k ≥ 2
    Virasoro(u32),
}

/// c·∏ factors; an empty product is a classical constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub factors: Vec<CorrelatorKey>,
}

/// One rule application: value(key) = Σ_terms coeff·∏ value(factor).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub rule: Rule,
    pub head: Insertion,
    pub terms: Vec<Term>,
}

/// Order in which P-insertions are eliminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// highest level first (the canonical order)
    HighestFirst,
    LowestFirst,
    /// a P-insertion picked by hashing the key with the seed
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorRecord {
    pub key: CorrelatorKey,
    pub value: Rational,
    pub provenance: Rule,
    /// the eliminated head and the sub-keys the rule referenced
    pub trace: Vec<String>,
}

fn fact(n: i64) -> Rational {
    int(factorial(n as u64))
}

struct TermBuilder {
    terms: BTreeMap<Vec<CorrelatorKey>, Rational>,
}

impl TermBuilder {
    fn new() -> Self {
        Self { terms: BTreeMap::new() }
    }

    fn push(&mut self, coeff: Rational, mut factors: Vec<CorrelatorKey>) {
        if coeff.is_zero() {
            return;
        }
        // vanishing factors kill the product
        if factors.iter().any(|k| k.degree().is_none() || !k.is_stable()) {
            return;
        }
        factors.sort();
        let slot = self.terms.entry(factors).or_insert_with(Rational::zero);
        *slot += coeff;
    }

    fn finish(self) -> Vec<Term> {
        self.terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(factors, coeff)| Term { coeff, factors })
            .collect()
    }
}

fn bookkeeping(ok: bool, what: &str, key: &CorrelatorKey) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("degree bookkeeping violated by {what} term of {key}")))
    }
}

/// The rule for eliminating insertion `head` (a P-insertion) of `key`.
pub fn expand_rule(key: &CorrelatorKey, head: usize, chi: i64) -> Result<Expansion> {
    let ins = *key
        .insertions
        .get(head)
        .ok_or_else(|| Error::InvalidArgument(format!("no insertion {head} in {key}")))?;
    if ins.class != Class::P {
        return Err(Error::InvalidArgument(format!("head insertion {ins} of {key} is not a P-insertion")));
    }
    let d = key
        .degree()
        .ok_or_else(|| Error::InvalidArgument(format!("{key} has no integer degree; it vanishes")))?;
    let g = key.genus;
    let rest = key.without(head);
    let chi_r = int(chi);
    let mut b = TermBuilder::new();
    let same = |ins: Vec<Insertion>| CorrelatorKey::new(g, ins);
    let replaced = |i: usize, new: Insertion| {
        let mut v = rest.clone();
        v[i] = new;
        CorrelatorKey::new(g, v)
    };
    let rule = match ins.level {
        0 => {
            for (i, x) in rest.iter().enumerate() {
                if x.level >= 1 {
                    let k = replaced(i, Insertion { class: x.class, level: x.level - 1 });
                    bookkeeping(k.degree() == Some(d), "string", key)?;
                    b.push(Rational::one(), vec![k]);
                }
            }
            // t^P_0 t^Q_0: ∫ P·P·Q = 1
            if g == 0 && d == 0 && CorrelatorKey::new(0, rest.clone()).insertions == [Insertion::p(0), Insertion::q(0)] {
                b.push(Rational::one(), vec![]);
            }
            Rule::String
        }
        1 => {
            let mut with_q0 = rest.clone();
            with_q0.push(Insertion::q(0));
            let k = same(with_q0);
            bookkeeping(k.degree() == Some(d), "dilaton", key)?;
            b.push(-chi_r.clone(), vec![k]);
            let weight: i64 = rest
                .iter()
                .map(|x| match x.class {
                    Class::P => x.level as i64,
                    Class::Q => x.level as i64 + 1,
                })
                .sum();
            if weight != 0 {
                let k = same(rest.clone());
                bookkeeping(k.degree() == Some(d), "dilaton", key)?;
                b.push(int(weight), vec![k]);
            }
            for (i, x) in rest.iter().enumerate() {
                if x.class == Class::P && x.level >= 1 {
                    let k = replaced(i, Insertion::q(x.level - 1));
                    bookkeeping(k.degree() == Some(d), "dilaton", key)?;
                    b.push(chi_r.clone(), vec![k]);
                }
            }
            // (χ/2)(t^P_0)²
            if g == 0 && d == 0 && CorrelatorKey::new(0, rest.clone()).insertions == [Insertion::p(0), Insertion::p(0)] {
                b.push(chi_r.clone(), vec![]);
            }
            Rule::Dilaton
        }
        k => {
            let ki = k as i64;
            let norm = Rational::one() / fact(ki);
            for (i, x) in rest.iter().enumerate() {
                let a = x.level as i64;
                match x.class {
                    Class::P if a >= 1 => {
                        let c = fact(ki + a - 1) / fact(a - 1);
                        let fused = replaced(i, Insertion::p((ki + a - 1) as u32));
                        bookkeeping(fused.degree() == Some(d), "P+P→P", key)?;
                        b.push(&c * &norm, vec![fused]);
                        let conv = replaced(i, Insertion::q((ki + a - 2) as u32));
                        bookkeeping(conv.degree() == Some(d), "P+P→Q", key)?;
                        let h = harmonic((ki + a - 1) as usize) - harmonic((a - 1) as usize);
                        b.push(&chi_r * h * &c * &norm, vec![conv]);
                    }
                    Class::P => {
                        // a = 0: a·Σ_{r=a}^{k+a−1} 1/r → 1, i.e. (k−1)! before normalization
                        let conv = replaced(i, Insertion::q(k - 2));
                        bookkeeping(conv.degree() == Some(d), "P+P→Q", key)?;
                        b.push(&chi_r * fact(ki - 1) * &norm, vec![conv]);
                    }
                    Class::Q => {
                        let c = fact(ki + a) / fact(a);
                        let fused = replaced(i, Insertion::q((ki + a - 1) as u32));
                        bookkeeping(fused.degree() == Some(d), "P+Q→Q", key)?;
                        b.push(c * &norm, vec![fused]);
                    }
                }
            }
            let mut conv = rest.clone();
            conv.push(Insertion::q(k - 1));
            let conv = same(conv);
            bookkeeping(conv.degree() == Some(d), "conversion", key)?;
            b.push(-&chi_r * harmonic(k as usize), vec![conv]);
            let half_chi = &chi_r / int(2);
            for m in 0..=(ki - 3) {
                let c = &half_chi * fact(m + 1) * fact(ki - m - 2) * &norm;
                let (q1, q2) = (Insertion::q(m as u32), Insertion::q((ki - m - 3) as u32));
                if g >= 1 {
                    let mut v = rest.clone();
                    v.push(q1);
                    v.push(q2);
                    let diag = CorrelatorKey::new(g - 1, v);
                    bookkeeping(diag.degree() == Some(d), "fission", key)?;
                    b.push(c.clone(), vec![diag]);
                }
                let n = rest.len();
                for mask in 0..(1usize << n) {
                    let (mut left, mut right) = (vec![q1], vec![q2]);
                    for (i, x) in rest.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            left.push(*x);
                        } else {
                            right.push(*x);
                        }
                    }
                    for g1 in 0..=g {
                        let l = CorrelatorKey::new(g1, left.clone());
                        let r = CorrelatorKey::new(g - g1, right.clone());
                        if let (Some(d1), Some(d2)) = (l.degree(), r.degree()) {
                            bookkeeping(d1 + d2 == d, "split", key)?;
                            b.push(c.clone(), vec![l, r]);
                        }
                    }
                }
            }
            Rule::Virasoro(k)
        }
    };
    Ok(Expansion { rule, head: ins, terms: b.finish() })
}

/// Memoized reduction to the stationary sector.
pub struct VirasoroEngine {
    chi: i64,
    strategy: Strategy,
    oracle: Arc<StationaryOracle>,
    memo: RwLock<HashMap<CorrelatorKey, CorrelatorRecord>>,
}

/// Fission adds one point per genus step, so reductions of keys with at most
/// five insertions and genus ≤ 3 stay within eight points.
pub const ENGINE_MAX_POINTS: usize = 8;

impl VirasoroEngine {
    pub fn new(chi: i64) -> Self {
        Self::with_oracle(chi, Strategy::HighestFirst, Arc::new(StationaryOracle::with_max_points(ENGINE_MAX_POINTS)))
    }

    pub fn with_oracle(chi: i64, strategy: Strategy, oracle: Arc<StationaryOracle>) -> Self {
        Self { chi, strategy, oracle, memo: RwLock::new(HashMap::new()) }
    }

    /// A fresh engine with another strategy sharing the stationary oracle.
    pub fn with_strategy(&self, strategy: Strategy) -> Self {
        Self::with_oracle(self.chi, strategy, self.oracle.clone())
    }

    pub fn chi(&self) -> i64 {
        self.chi
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn oracle(&self) -> &Arc<StationaryOracle> {
        &self.oracle
    }

    /// Index of the P-insertion to eliminate next.
    pub fn choose_head(&self, key: &CorrelatorKey) -> Option<usize> {
        let ps: Vec<usize> =
            key.insertions.iter().enumerate().filter(|(_, i)| i.class == Class::P).map(|(i, _)| i).collect();
        if ps.is_empty() {
            return None;
        }
        // insertions are sorted, so P-insertions come first in increasing level
        Some(match self.strategy {
            Strategy::HighestFirst => *ps.last().unwrap(),
            Strategy::LowestFirst => ps[0],
            Strategy::Seeded(seed) => {
                use std::hash::{Hash, Hasher};
                let mut h = std::collections::hash_map::DefaultHasher::new();
                key.hash(&mut h);
                seed.hash(&mut h);
                ps[(h.finish() % ps.len() as u64) as usize]
            }
        })
    }

    pub fn value(&self, key: &CorrelatorKey) -> Result<Rational> {
        Ok(self.reduce(key)?.value)
    }

    pub fn reduce(&self, key: &CorrelatorKey) -> Result<CorrelatorRecord> {
        if let Some(r) = self.memo.read().unwrap().get(key) {
            return Ok(r.clone());
        }
        let record = self.compute(key)?;
        self.memo.write().unwrap().insert(key.clone(), record.clone());
        Ok(record)
    }

    fn compute(&self, key: &CorrelatorKey) -> Result<CorrelatorRecord> {
        let vanishing = |why: &str| CorrelatorRecord {
            key: key.clone(),
            value: Rational::zero(),
            provenance: Rule::Vanishing,
            trace: vec![why.to_string()],
        };
        if key.degree().is_none() {
            return Ok(vanishing("no integer degree"));
        }
        if !key.is_stable() {
            return Ok(vanishing("unstable"));
        }
        let Some(head) = self.choose_head(key) else {
            if self.chi != 2 {
                return Err(Error::NoStationaryOracle(self.chi));
            }
            if key.is_empty() {
                return Err(Error::InvalidArgument(format!("{key} has no insertions")));
            }
            let value = self.oracle.correlator(&key.stationary().unwrap())?;
            return Ok(CorrelatorRecord { key: key.clone(), value, provenance: Rule::Stationary, trace: vec![] });
        };
        let exp = expand_rule(key, head, self.chi)?;
        let mut value = Rational::zero();
        let mut trace = vec![format!("eliminate {}", exp.head)];
        for t in &exp.terms {
            let mut v = t.coeff.clone();
            for f in &t.factors {
                if v.is_zero() {
                    break;
                }
                v *= self.value(f)?;
            }
            value += v;
            let names: Vec<String> = t.factors.iter().map(ToString::to_string).collect();
            trace.push(format!("{} * {}", t.coeff, if names.is_empty() { "1".into() } else { names.join(" ") }));
        }
        Ok(CorrelatorRecord { key: key.clone(), value, provenance: exp.rule, trace })
    }

    /// Evaluates the string rule on a τ₀(P) of the key regardless of strategy.
    pub fn string_rule(&self, key: &CorrelatorKey) -> Result<Rational> {
        self.rule_at_level(key, 0)
    }

    pub fn dilaton_rule(&self, key: &CorrelatorKey) -> Result<Rational> {
        self.rule_at_level(key, 1)
    }

    pub fn virasoro_rule(&self, key: &CorrelatorKey, k: u32) -> Result<Rational> {
        if k < 2 {
            return Err(Error::InvalidArgument("levels 0 and 1 use the string and dilaton rules".into()));
        }
        self.rule_at_level(key, k)
    }

    fn rule_at_level(&self, key: &CorrelatorKey, level: u32) -> Result<Rational> {
        let head = key
            .insertions
            .iter()
            .position(|i| *i == Insertion::p(level))
            .ok_or_else(|| Error::InvalidArgument(format!("{key} has no τ{level}(P) insertion")))?;
        if key.degree().is_none() || !key.is_stable() {
            return Ok(Rational::zero());
        }
        let exp = expand_rule(key, head, self.chi)?;
        let mut value = Rational::zero();
        for t in &exp.terms {
            let mut v = t.coeff.clone();
            for f in &t.factors {
                v *= self.value(f)?;
            }
            value += v;
        }
        Ok(value)
    }

    /// All memoized records in canonical key order.
    pub fn records(&self) -> Vec<CorrelatorRecord> {
        let mut v: Vec<_> = self.memo.read().unwrap().values().cloned().collect();
        v.sort_by(|a, b| a.key.cmp(&b.key));
        v
    }

    pub fn insert_record(&self, record: CorrelatorRecord) {
        self.memo.write().unwrap().insert(record.key.clone(), record);
    }
}

/// Deterministic pseudo-random keys with at least one P-insertion, n ≤ max_points,
/// levels ≤ max_level, g ≤ max_genus, and derived degree ≤ max_degree.
pub fn random_keys(
    seed: u64,
    count: usize,
    max_points: usize,
    max_level: u32,
    max_genus: u32,
    max_degree: u32,
) -> Vec<CorrelatorKey> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    while out.len() < count {
        let g = rng.random_range(0..=max_genus);
        let n = rng.random_range(1..=max_points);
        let ins: Vec<Insertion> = (0..n)
            .map(|_| {
                let class = if rng.random_bool(0.5) { Class::P } else { Class::Q };
                Insertion { class, level: rng.random_range(0..=max_level) }
            })
            .collect();
        let key = CorrelatorKey::new(g, ins);
        if key.p_count() == 0 || !key.is_stable() || key.degree().is_none_or(|d| d > max_degree) {
            continue;
        }
        if seen.insert(key.clone()) {
            out.push(key);
        }
    }
    out
}

/// Reduces every key under the canonical order and each alternative and compares.
pub fn confluence_check(engine: &VirasoroEngine, keys: &[CorrelatorKey], others: &[Strategy]) -> Result<Check> {
    let mut check = Check::new("Virasoro confluence");
    let alternatives: Vec<VirasoroEngine> = others.iter().map(|s| engine.with_strategy(*s)).collect();
    for key in keys {
        let canonical = engine.value(key)?;
        for alt in &alternatives {
            let v = alt.value(key)?;
            check.compare(|| format!("{key} under {:?}", alt.strategy()), &canonical, &v);
        }
    }
    check.note(format!("{} keys, strategies {:?} vs {:?}", keys.len(), engine.strategy(), others));
    Ok(check)
}

/// reduce on all-Q keys against the oracle called directly.
pub fn stationary_consistency_check(engine: &VirasoroEngine, max_genus: u32, max_points: usize, max_level: u32) -> Result<Check> {
    let mut check = Check::new("all-Q passthrough");
    let fresh = StationaryOracle::with_max_points(engine.oracle().max_points());
    for g in 0..=max_genus {
        for n in 1..=max_points {
            let mut levels = vec![0u32; n];
            loop {
                let key = CorrelatorKey::new(g, levels.iter().map(|&l| Insertion::q(l)).collect());
                if let Some(sk) = key.stationary() {
                    if key.is_stable() {
                        let expected = fresh.correlator(&sk)?;
                        let found = engine.value(&key)?;
                        check.compare(|| key.to_string(), &expected, &found);
                    }
                }
                // next nondecreasing level tuple
                let Some(i) = (0..n).rev().find(|&i| levels[i] < max_level) else { break };
                let v = levels[i] + 1;
                levels[i..].iter_mut().for_each(|l| *l = v);
            }
        }
    }
    Ok(check)
}

/// Keys containing both τ₀(P) and τ₁(P): the string and dilaton rules must agree.
pub fn dilaton_string_check(engine: &VirasoroEngine, keys: &[CorrelatorKey]) -> Result<Check> {
    let mut check = Check::new("dilaton vs string");
    for key in keys {
        let ins = key.insertions();
        if ins.contains(&Insertion::p(0)) && ins.contains(&Insertion::p(1)) {
            let a = engine.string_rule(key)?;
            let b = engine.dilaton_rule(key)?;
            check.compare(|| key.to_string(), &a, &b);
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn key(g: u32, s: &str) -> CorrelatorKey {
        CorrelatorKey::new(g, parse_insertions(s).unwrap())
    }

    #[test]
    fn parsing_and_degree() {
        let k = key(0, "P:3,Q:0");
        assert_eq!(k.insertions(), &[Insertion::p(3), Insertion::q(0)]);
        assert_eq!(k.degree(), Some(2));
        assert_eq!(key(0, "P:2").degree(), None);
        assert!(parse_insertions("R:1").is_err());
        assert!(parse_insertions("P3").is_err());
    }

    #[test]
    fn classical_values() {
        let e = VirasoroEngine::new(2);
        assert_eq!(e.value(&key(0, "P:0,P:0,Q:0")).unwrap(), int(1));
        assert_eq!(e.value(&key(0, "P:0,Q:1")).unwrap(), int(1));
        assert_eq!(e.value(&key(0, "P:1")).unwrap(), int(-2));
        // dilaton on the classical triple: +χ from (t^P_0)² and −χ from ⟨τ₀(Q)τ₀(P)τ₀(P)⟩
        assert_eq!(e.value(&key(0, "P:1,P:0,P:0")).unwrap(), int(0));
        assert_eq!(e.value(&key(1, "P:1")).unwrap(), rat(1, 12));
    }

    #[test]
    fn dilaton_exceptional_term_alone_is_chi() {
        let exp = expand_rule(&key(0, "P:1,P:0,P:0"), 2, 2).unwrap();
        let constant: Vec<_> = exp.terms.iter().filter(|t| t.factors.is_empty()).collect();
        assert_eq!(constant.len(), 1);
        assert_eq!(constant[0].coeff, int(2));
    }

    #[test]
    fn strategies_agree_on_small_keys() {
        let e = VirasoroEngine::new(2);
        let lo = e.with_strategy(Strategy::LowestFirst);
        for s in ["P:2,Q:0", "P:0,P:2,Q:1", "P:3,P:1,Q:0", "P:1,P:0,Q:2,Q:0"] {
            for g in 0..=1 {
                let k = key(g, s);
                assert_eq!(e.value(&k).unwrap(), lo.value(&k).unwrap(), "{k}");
            }
        }
    }

    #[test]
    fn no_oracle_for_other_targets() {
        let e = VirasoroEngine::new(0);
        assert!(matches!(e.value(&key(1, "Q:0")), Err(Error::NoStationaryOracle(0))));
        assert!(expand_rule(&key(1, "P:3,Q:0"), 0, 0).is_ok());
    }
}
