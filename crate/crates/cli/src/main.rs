//! gwp1: exact correlators, generating series and cross-checks for P¹.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gw_p1::algebra::{format_fraction, int, MultiSeries, Rational};
use gw_p1::closed_forms::{genus0_one_point_generating, one_point_genus_defining, one_point_genus_expansion, w02_closed_form};
use gw_p1::dy::{c2, dy_correlator};
use gw_p1::eo::EoEngine;
use gw_p1::residue::{w01_u0_series, ResidueOrders};
use gw_p1::stationary::{s_series, StationaryKey, StationaryOracle};
use gw_p1::store::{CacheTable, EngineParams};
use gw_p1::suites::{run_suite, SuiteOptions, SUITE_NAMES};
use gw_p1::virasoro::{parse_insertions, CorrelatorKey, VirasoroEngine};
use gw_p1::Error;

const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "gwp1", version, about = "Exact Gromov-Witten invariants of P^1")]
struct Cli {
    /// One JSON object per result instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Correlator cache file
    #[arg(long, global = true, env = "GWP1_CACHE")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve one correlator; the degree is derived from the insertions
    Correlator {
        #[arg(long)]
        genus: u32,
        /// Comma-separated CLASS:LEVEL with CLASS in {P, Q}, e.g. "P:1,Q:0"
        #[arg(long)]
        insertions: String,
        #[arg(long, value_enum, default_value_t = Method::Virasoro)]
        method: Method,
    },
    /// All stationary correlators with sum of (k_i + 2) at most the bound
    StationaryTable {
        #[arg(long)]
        max_weight: u32,
    },
    /// A named generating series: w01, w02, w01-u0, one-point-genus, dy-c2, s
    Series {
        name: String,
        /// q-degree bound (inclusive)
        #[arg(long, default_value_t = 5)]
        q_order: u32,
        /// Laurent depth per variable
        #[arg(long, default_value_t = 10)]
        depth: i64,
        #[arg(long, default_value_t = 1)]
        genus: u32,
    },
    /// Run a cross-validation suite
    Crosscheck {
        suite: String,
        /// Restrict theorem-main to one (n, m), e.g. "1,1"
        #[arg(long)]
        nm: Option<String>,
        /// Laurent depth for theorem-main
        #[arg(long)]
        orders: Option<i64>,
        #[arg(long)]
        q_max: Option<u32>,
        #[arg(long)]
        max_genus: Option<u32>,
    },
    /// Compute omega_{g,n} by topological recursion
    Eo {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        n: usize,
        /// Also print the stationary correlators read off up to this level
        #[arg(long)]
        max_level: Option<u32>,
    },
    /// Inspect or clear the correlator cache
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Virasoro,
    Stationary,
    Dy,
    Eo,
    AllCompare,
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheAction {
    Show,
    Clear,
    Path,
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Computation(String),
    Unsupported(String),
    Truncation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Computation(_) => 2,
            Failure::Unsupported(_) => 4,
            Failure::Truncation(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Computation(m) | Failure::Unsupported(m) | Failure::Truncation(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Parse(_) | Error::InvalidArgument(_) => Failure::Usage(m),
            Error::UnsupportedProfile(_) | Error::NoStationaryOracle(_) => Failure::Unsupported(m),
            Error::BeyondTruncation { .. } => Failure::Truncation(m),
            _ => Failure::Computation(m),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, text: impl AsRef<str>, value: Value) {
        if self.json {
            say(&format!("{value}\n"));
        } else {
            say(&format!("{}\n", text.as_ref()));
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out = Out { json: cli.json };
    let result = match cli.command {
        Command::Correlator { genus, insertions, method } => correlator(&out, cli.cache, genus, &insertions, method),
        Command::StationaryTable { max_weight } => stationary_table(&out, max_weight),
        Command::Series { name, q_order, depth, genus } => series(&out, &name, q_order, depth, genus),
        Command::Crosscheck { suite, nm, orders, q_max, max_genus } => {
            crosscheck(&out, cli.cache, &suite, nm.as_deref(), orders, q_max, max_genus)
        }
        Command::Eo { genus, n, max_level } => eo(&out, genus, n, max_level),
        Command::Cache { action } => cache(&out, cli.cache, action),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_MISMATCH),
        Err(f) => {
            if out.json {
                say(&format!("{}\n", json!({ "error": f.message(), "exit_code": f.code() })));
            }
            eprintln!("gwp1: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) ends the process quietly.
fn say(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn fraction(v: &Rational) -> String {
    format_fraction(v)
}

/// Engine preloaded from the cache, if one is configured and compatible.
fn engine_with_cache(cache: &Option<PathBuf>) -> Result<VirasoroEngine, Failure> {
    let engine = VirasoroEngine::new(2);
    if let Some(path) = cache {
        if path.exists() {
            let table = CacheTable::load(path)?;
            if table.params == EngineParams::of(&engine) {
                table.seed(&engine)?;
            }
        }
    }
    Ok(engine)
}

fn save_cache(cache: &Option<PathBuf>, engine: &VirasoroEngine) -> Result<(), Failure> {
    if let Some(path) = cache {
        CacheTable::from_engine(engine).save(path)?;
    }
    Ok(())
}

fn stationary_key(key: &CorrelatorKey, method: &str) -> Result<StationaryKey, Failure> {
    key.stationary()
        .ok_or_else(|| Failure::Unsupported(format!("method {method} needs Q insertions only and a valid degree, got {key}")))
}

fn correlator(out: &Out, cache: Option<PathBuf>, genus: u32, insertions: &str, method: Method) -> Outcome {
    if insertions.trim().is_empty() {
        return Err(Failure::Usage("--insertions must name at least one CLASS:LEVEL".into()));
    }
    let key = CorrelatorKey::new(genus, parse_insertions(insertions)?);
    let ins_text = key.insertions().iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let methods: Vec<Method> = match method {
        Method::AllCompare => {
            let mut m = vec![Method::Virasoro];
            if key.stationary().is_some() {
                m.push(Method::Stationary);
                if key.len() >= 2 {
                    m.push(Method::Dy);
                }
                if key.is_stable() {
                    m.push(Method::Eo);
                }
            }
            m
        }
        m => vec![m],
    };
    let mut values: Vec<(&str, Rational)> = Vec::new();
    for m in methods {
        let (name, v) = match m {
            Method::Virasoro => {
                let engine = engine_with_cache(&cache)?;
                let v = engine.value(&key)?;
                save_cache(&cache, &engine)?;
                ("virasoro", v)
            }
            Method::Stationary => {
                let sk = stationary_key(&key, "stationary")?;
                ("stationary", StationaryOracle::with_max_points(key.len().max(6)).correlator(&sk)?)
            }
            Method::Dy => {
                let sk = stationary_key(&key, "dy")?;
                if key.len() < 2 {
                    return Err(Failure::Unsupported("method dy needs at least two insertions".into()));
                }
                ("dy", dy_correlator(&sk)?)
            }
            Method::Eo => {
                let sk = stationary_key(&key, "eo")?;
                if !key.is_stable() {
                    return Err(Failure::Unsupported(format!("method eo needs a stable (g, n), got {key}")));
                }
                let max_level = sk.levels().iter().copied().max().unwrap_or(0);
                let table = EoEngine::calibrated(int(1))?.correlators(genus, key.len(), max_level)?;
                ("eo", table.get(sk.levels()).cloned().unwrap_or_else(|| int(0)))
            }
            Method::AllCompare => unreachable!(),
        };
        let degree = key.degree();
        let degree_text = degree.map_or("none".to_string(), |d| d.to_string());
        out.emit(
            format!("{} genus {genus} degree {degree_text} [{name}]", fraction(&v)),
            json!({ "genus": genus, "insertions": ins_text, "degree": degree, "method": name, "value": fraction(&v) }),
        );
        values.push((name, v));
    }
    let agree = values.windows(2).all(|w| w[0].1 == w[1].1);
    if method == Method::AllCompare {
        out.emit(
            format!("{} across {} methods", if agree { "AGREE" } else { "DISAGREE" }, values.len()),
            json!({ "agree": agree, "methods": values.iter().map(|(n, _)| *n).collect::<Vec<_>>() }),
        );
    }
    Ok(agree)
}

fn stationary_table(out: &Out, max_weight: u32) -> Outcome {
    let max_points = (max_weight / 2) as usize;
    let oracle = StationaryOracle::with_max_points(max_points.max(1));
    for n in 1..=max_points {
        let mut levels = vec![0u32; n];
        loop {
            let weight: u32 = levels.iter().map(|k| k + 2).sum();
            if weight <= max_weight {
                let sum: u32 = levels.iter().sum();
                for g in 0..=(sum + 2) / 2 {
                    if let Some(d) = (sum + 2).checked_sub(2 * g).filter(|r| r % 2 == 0).map(|r| r / 2) {
                        let key = StationaryKey::new(g, d, levels.clone());
                        if !key.is_stable() {
                            continue;
                        }
                        let v = oracle.correlator(&key)?;
                        let ins = levels.iter().map(|k| format!("Q:{k}")).collect::<Vec<_>>().join(",");
                        out.emit(
                            format!("g={g} d={d} {ins} = {}", fraction(&v)),
                            json!({ "genus": g, "degree": d, "insertions": ins, "value": fraction(&v) }),
                        );
                    }
                }
            }
            // next nondecreasing tuple whose weight can still fit
            let Some(i) = (0..n).rev().find(|&i| {
                let mut next = levels.clone();
                let v = next[i] + 1;
                next[i..].iter_mut().for_each(|l| *l = v);
                next.iter().map(|k| k + 2).sum::<u32>() <= max_weight
            }) else {
                break;
            };
            let v = levels[i] + 1;
            levels[i..].iter_mut().for_each(|l| *l = v);
        }
    }
    Ok(true)
}

fn print_series(out: &Out, name: &str, s: &MultiSeries) {
    let vars = s.vars().to_vec();
    let terms: Vec<Value> = s
        .terms()
        .map(|(e, c)| {
            let exps: BTreeMap<&str, i64> = vars.iter().map(String::as_str).zip(e.iter().copied()).collect();
            json!({ "exponents": exps, "coeff": fraction(c) })
        })
        .collect();
    out.emit(format!("{name} = {s}"), json!({ "series": name, "vars": vars, "terms": terms }));
}

fn series(out: &Out, name: &str, q_order: u32, depth: i64, genus: u32) -> Outcome {
    let q = q_order as i64 + 1;
    match name {
        "w01" => print_series(out, name, &genus0_one_point_generating(q)?),
        "w02" => print_series(out, name, &w02_closed_form(q)?),
        "w01-u0" => {
            let r = w01_u0_series(&VirasoroEngine::new(2), q_order, depth)?;
            print_series(out, "w01-u0 engine", &r.engine_sigma);
            print_series(out, "w01-u0 displayed", &r.displayed);
        }
        "one-point-genus" => {
            let s = if genus <= 3 { one_point_genus_expansion(genus, q)? } else { one_point_genus_defining(genus, q)? };
            print_series(out, &format!("one-point genus {genus}"), &MultiSeries::from_uni(&s));
        }
        "dy-c2" => print_series(out, name, &c2(depth)?),
        "s" => print_series(out, name, &MultiSeries::from_uni(&s_series(depth))),
        _ => {
            return Err(Failure::Unsupported(format!(
                "unknown series {name:?}; known: w01, w02, w01-u0, one-point-genus, dy-c2, s"
            )))
        }
    }
    Ok(true)
}

fn crosscheck(
    out: &Out,
    cache: Option<PathBuf>,
    suite: &str,
    nm: Option<&str>,
    depth: Option<i64>,
    q_max: Option<u32>,
    max_genus: Option<u32>,
) -> Outcome {
    if !SUITE_NAMES.contains(&suite) {
        return Err(Failure::Unsupported(format!("unknown suite {suite:?}; known: {}", SUITE_NAMES.join(", "))));
    }
    let nm = nm
        .map(|s| {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            match parts[..] {
                [n, m] => n.parse().ok().zip(m.parse().ok()),
                _ => None,
            }
            .ok_or_else(|| Failure::Usage(format!("--nm expects \"n,m\", got {s:?}")))
        })
        .transpose()?;
    let mut orders = ResidueOrders::default();
    orders.depth = depth.unwrap_or(orders.depth);
    orders.q_max = q_max.unwrap_or(orders.q_max);
    orders.max_genus = max_genus.unwrap_or(orders.max_genus);
    let engine = engine_with_cache(&cache)?;
    let report = run_suite(suite, &engine, &SuiteOptions { orders: Some(orders), nm })?;
    save_cache(&cache, &engine)?;
    if out.json {
        say(&format!("{}\n", serde_json::to_string(&report).expect("report serialization")));
    } else {
        say(&report.render());
    }
    Ok(report.passed)
}

fn eo(out: &Out, genus: u32, n: usize, max_level: Option<u32>) -> Outcome {
    if 2 * genus as i64 - 2 + n as i64 <= 0 {
        return Err(Failure::Unsupported(format!("omega_{genus},{n} is unstable; the recursion starts at 2g - 2 + n > 0")));
    }
    let engine = EoEngine::calibrated(int(1))?;
    let w = engine.omega(genus, n)?;
    let terms: Vec<Value> = w
        .terms
        .iter()
        .map(|(mono, c)| json!({ "coeff": fraction(c), "poles": mono.iter().map(|&(i, e, m)| json!([i + 1, e, m])).collect::<Vec<_>>() }))
        .collect();
    let text = w
        .terms
        .iter()
        .map(|(mono, c)| {
            let factors: String = mono
                .iter()
                .map(|&(i, e, m)| format!("(z{} {} s)^-{m}", i + 1, if e > 0 { "-" } else { "+" }))
                .collect();
            format!("  {} {factors}", fraction(c))
        })
        .collect::<Vec<_>>()
        .join("\n");
    out.emit(
        format!("omega_{genus},{n} ({} terms, q = s^2, s = 1), times dz_1...dz_n:\n{text}", w.terms.len()),
        json!({ "genus": genus, "n": n, "s": "1/1", "terms": terms }),
    );
    if let Some(l) = max_level {
        for (levels, v) in engine.correlators(genus, n, l)? {
            let ins = levels.iter().map(|k| format!("Q:{k}")).collect::<Vec<_>>().join(",");
            out.emit(
                format!("{ins} = {}", fraction(&v)),
                json!({ "genus": genus, "insertions": ins, "value": fraction(&v), "method": "eo" }),
            );
        }
    }
    Ok(true)
}

fn cache(out: &Out, cache: Option<PathBuf>, action: CacheAction) -> Outcome {
    let path = cache.ok_or_else(|| Failure::Usage("no cache configured; pass --cache or set GWP1_CACHE".into()))?;
    match action {
        CacheAction::Path => out.emit(path.display().to_string(), json!({ "path": path.display().to_string() })),
        CacheAction::Clear => {
            let existed = path.exists();
            if existed {
                std::fs::remove_file(&path).map_err(|e| Failure::Computation(e.to_string()))?;
            }
            out.emit(
                format!("{} {}", if existed { "removed" } else { "nothing at" }, path.display()),
                json!({ "path": path.display().to_string(), "removed": existed }),
            );
        }
        CacheAction::Show => {
            if !path.exists() {
                out.emit(format!("{}: empty", path.display()), json!({ "path": path.display().to_string(), "records": 0 }));
                return Ok(true);
            }
            let table = CacheTable::load(&path)?;
            if out.json {
                say(&table.to_json());
            } else {
                say(&format!(
                    "{}: {} records, chi = {}, {}, max points {}\n",
                    path.display(),
                    table.records.len(),
                    table.params.chi,
                    table.params.q_convention,
                    table.params.max_points
                ));
                for (k, r) in &table.records {
                    say(&format!("  {k} = {} [{:?}]\n", fraction(&r.value), r.provenance));
                }
            }
        }
    }
    Ok(true)
}
