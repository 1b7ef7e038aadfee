//! Benchmark harness comparing the determinization pipelines on seeded
//! random automata or on the CNF blow-up family.
//!
//! Configuration is a plain `key = value` file (`#` starts a comment):
//!
//! ```text
//! instances = 50
//! seed = 1
//! family = random          # random | blowup
//! states = 4
//! aps = 1
//! marks = 8
//! acc = random-el          # random-el | dnf
//! methods = product,product-nolc,gba:cnf,gba:remfin_split
//! baseline = product
//! max_states = 20000
//! time_budget_ms = 10000
//! hard_ms = 500
//! threads = 0              # 0 = rayon default
//! validate = true
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;

use super::{nondeterminism_amount, random_tela, AccKind, RandomParams};
use crate::analysis::prune_useless;
use crate::automaton::Tela;
use crate::determinize::{degeneralize, determinize_product_with, equivalent, safra_determinize_bounded, ProductOptions};
use crate::error::{Error, Result};
use crate::families::cnf_blowup;
use crate::transforms::{to_gba, GbaMethod};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// `to_gba` with the given method, degeneralization, Safra.
    Gba(GbaMethod),
    /// Per-disjunct determinization and disjunctive product.
    Product { langcover: bool },
}

impl Method {
    pub fn all() -> Vec<Method> {
        let mut v = vec![Method::Product { langcover: true }, Method::Product { langcover: false }];
        v.extend(GbaMethod::ALL.into_iter().map(Method::Gba));
        v
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Gba(m) => write!(f, "gba:{m}"),
            Method::Product { langcover: true } => f.write_str("product"),
            Method::Product { langcover: false } => f.write_str("product-nolc"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(Method::Product { langcover: true }),
            "product-nolc" => Ok(Method::Product { langcover: false }),
            _ => match s.strip_prefix("gba:") {
                Some(m) => Ok(Method::Gba(m.parse()?)),
                None => Err(Error::Invalid(format!("unknown method `{s}`"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Random,
    /// Instance `i` is the blow-up automaton with `n = 1 + i mod max_n`.
    Blowup { max_n: u32 },
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub instances: usize,
    pub seed: u64,
    pub family: Family,
    pub random: RandomParams,
    pub methods: Vec<Method>,
    pub baseline: Method,
    pub max_states: usize,
    pub time_budget: Duration,
    /// Instances whose baseline needs longer than this count as hard.
    pub hard_threshold: Duration,
    pub threads: usize,
    pub validate: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            instances: 50,
            seed: 0,
            family: Family::Random,
            random: RandomParams::default(),
            methods: Method::all(),
            baseline: Method::Product { langcover: true },
            max_states: 20_000,
            time_budget: Duration::from_secs(10),
            hard_threshold: Duration::from_millis(500),
            threads: 0,
            validate: true,
        }
    }
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = BenchConfig::default();
        let mut max_n = 8;
        let mut blowup = false;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse {
                line: no + 1,
                col: 1,
                msg: m.to_string(),
            };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<u64>().map_err(|_| err(&format!("`{key}` expects an integer")));
            let float = |v: &str| v.parse::<f64>().map_err(|_| err(&format!("`{key}` expects a number")));
            match key {
                "instances" => c.instances = num(value)? as usize,
                "seed" => c.seed = num(value)?,
                "family" => match value {
                    "random" => blowup = false,
                    "blowup" => blowup = true,
                    _ => return Err(err("family must be `random` or `blowup`")),
                },
                "max_n" => max_n = num(value)? as u32,
                "states" => c.random.n_states = num(value)? as u32,
                "aps" => c.random.n_aps = num(value)? as usize,
                "marks" => c.random.n_marks = num(value)? as u32,
                "edge_density" => c.random.edge_density = Some(float(value)?),
                "mark_prob" => c.random.mark_prob = float(value)?,
                "acc" => {
                    c.random.acc = match value {
                        "random-el" => AccKind::RandomEl,
                        "dnf" => AccKind::Dnf,
                        _ => return Err(err("acc must be `random-el` or `dnf`")),
                    }
                }
                "methods" => {
                    c.methods = value
                        .split(',')
                        .map(|m| m.trim().parse())
                        .collect::<Result<_>>()
                        .map_err(|e| err(&e.to_string()))?
                }
                "baseline" => c.baseline = value.parse().map_err(|e: Error| err(&e.to_string()))?,
                "max_states" => c.max_states = num(value)? as usize,
                "time_budget_ms" => c.time_budget = Duration::from_millis(num(value)?),
                "hard_ms" => c.hard_threshold = Duration::from_millis(num(value)?),
                "threads" => c.threads = num(value)? as usize,
                "validate" => {
                    c.validate = value.parse().map_err(|_| err("validate expects true or false"))?
                }
                _ => return Err(err(&format!("unknown key `{key}`"))),
            }
        }
        if blowup {
            if max_n == 0 {
                return Err(Error::Invalid("max_n must be positive".into()));
            }
            c.family = Family::Blowup { max_n };
        }
        if c.methods.is_empty() {
            return Err(Error::Invalid("no methods".into()));
        }
        if !c.methods.contains(&c.baseline) {
            c.methods.insert(0, c.baseline);
        }
        Ok(c)
    }

    fn instance(&self, i: usize) -> Result<(u64, Tela)> {
        match self.family {
            Family::Random => {
                let seed = self.seed.wrapping_add(i as u64);
                let p = RandomParams {
                    seed,
                    ..self.random.clone()
                };
                Ok((seed, random_tela(&p)?))
            }
            Family::Blowup { max_n } => {
                let n = 1 + i as u32 % max_n;
                Ok((n as u64, cnf_blowup(n)))
            }
        }
    }
}

/// Result of one method on one instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Done {
        states: u32,
        /// Output acceptance marks.
        marks: u32,
        /// Acceptance sets of the intermediate GBA, for GBA methods.
        gba_marks: Option<u32>,
        time: Duration,
    },
    /// State or time budget exhausted.
    Timeout,
}

#[derive(Clone, Debug)]
pub struct InstanceResult {
    pub index: usize,
    /// Generator seed, or `n` for the blow-up family.
    pub seed: u64,
    pub input_states: u32,
    pub dnf_length: usize,
    pub nondeterminism: Ratio<u64>,
    pub outcomes: Vec<Outcome>,
    /// Pairs of method indices whose outputs differ in language.
    pub mismatches: Vec<(usize, usize)>,
}

fn run_method(a: &Tela, m: Method, max_states: usize) -> Result<(Tela, Option<u32>)> {
    match m {
        Method::Gba(g) => {
            let gba = prune_useless(&to_gba(a, g));
            let sets = gba.acceptance().gba_sets().map_or(0, |s| s.len() as u32);
            let det = safra_determinize_bounded(&degeneralize(&gba)?, max_states)?;
            Ok((det, Some(sets)))
        }
        Method::Product { langcover } => {
            let r = determinize_product_with(
                a,
                ProductOptions {
                    langcover,
                    parallel: false,
                    max_states,
                },
            )?;
            Ok((r.automaton, None))
        }
    }
}

fn run_instance(cfg: &BenchConfig, index: usize) -> Result<InstanceResult> {
    let (seed, a) = cfg.instance(index)?;
    let mut outputs: Vec<Option<Tela>> = Vec::new();
    let mut outcomes = Vec::new();
    for &m in &cfg.methods {
        let start = Instant::now();
        let r = run_method(&a, m, cfg.max_states);
        let time = start.elapsed();
        match r {
            Ok((det, gba_marks)) if time <= cfg.time_budget => {
                outcomes.push(Outcome::Done {
                    states: det.num_states(),
                    marks: det.num_marks(),
                    gba_marks,
                    time,
                });
                outputs.push(Some(det));
            }
            Ok(_) | Err(Error::Limit(_)) => {
                outcomes.push(Outcome::Timeout);
                outputs.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    let mut mismatches = Vec::new();
    if cfg.validate {
        // comparing every output with the first finished one suffices for
        // an equivalence relation
        let done: Vec<usize> = (0..outputs.len()).filter(|&i| outputs[i].is_some()).collect();
        if let Some((&first, rest)) = done.split_first() {
            let x = outputs[first].as_ref().expect("done");
            for &j in rest {
                if !equivalent(x, outputs[j].as_ref().expect("done"))? {
                    mismatches.push((first, j));
                }
            }
        }
    }
    Ok(InstanceResult {
        index,
        seed,
        input_states: a.num_states(),
        dnf_length: a.acceptance().to_dnf().length(),
        nondeterminism: nondeterminism_amount(&a),
        outcomes,
        mismatches,
    })
}

/// Runs every instance on a rayon pool; results are ordered by index.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let instances = pool.install(|| {
        (0..cfg.instances)
            .into_par_iter()
            .map(|i| run_instance(cfg, i))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Report {
        methods: cfg.methods.clone(),
        baseline: cfg.methods.iter().position(|&m| m == cfg.baseline).unwrap_or(0),
        hard_threshold: cfg.hard_threshold,
        instances,
    })
}

/// A statistic where timeouts are larger than every finite value.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Value {
    Finite(f64),
    Infinite,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(x) if x.fract() == 0.0 => write!(f, "{x}"),
            Value::Finite(x) => write!(f, "{x:.3}"),
            Value::Infinite => f.write_str("inf"),
        }
    }
}

/// Median of `values`, averaging the two middle elements for even counts.
/// `None` for no values.
pub fn median(values: &[Value]) -> Option<Value> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = v.len();
    if n % 2 == 1 {
        return Some(v[n / 2]);
    }
    Some(match (v[n / 2 - 1], v[n / 2]) {
        (Value::Finite(a), Value::Finite(b)) => Value::Finite((a + b) / 2.0),
        _ => Value::Infinite,
    })
}

/// `x / base`, with 0 if only the baseline timed out and ∞ if only the
/// method did. `None` when both timed out.
pub fn ratio(x: Value, base: Value) -> Option<Value> {
    match (x, base) {
        (Value::Infinite, Value::Infinite) => None,
        (Value::Infinite, _) => Some(Value::Infinite),
        (_, Value::Infinite) => Some(Value::Finite(0.0)),
        (Value::Finite(a), Value::Finite(b)) => Some(if b == 0.0 {
            if a == 0.0 {
                Value::Finite(1.0)
            } else {
                Value::Infinite
            }
        } else {
            Value::Finite(a / b)
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    States,
    TimeMs,
    Marks,
    GbaMarks,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::States, Metric::TimeMs, Metric::Marks, Metric::GbaMarks];

    pub fn name(self) -> &'static str {
        match self {
            Metric::States => "states",
            Metric::TimeMs => "time_ms",
            Metric::Marks => "marks",
            Metric::GbaMarks => "gba_marks",
        }
    }

    /// `None` if the metric does not apply (GBA marks of a product run).
    pub fn of(self, o: &Outcome) -> Option<Value> {
        match o {
            Outcome::Timeout => Some(Value::Infinite),
            Outcome::Done {
                states,
                marks,
                gba_marks,
                time,
            } => match self {
                Metric::States => Some(Value::Finite(*states as f64)),
                Metric::TimeMs => Some(Value::Finite(time.as_secs_f64() * 1e3)),
                Metric::Marks => Some(Value::Finite(*marks as f64)),
                Metric::GbaMarks => gba_marks.map(|g| Value::Finite(g as f64)),
            },
        }
    }
}

/// Grouping of instances by DNF length and amount of nondeterminism.
pub fn group_of(r: &InstanceResult) -> String {
    let dnf = match r.dnf_length {
        0..=5 => "dnf<=5",
        6..=10 => "dnf6-10",
        _ => "dnf>10",
    };
    let nd = r.nondeterminism;
    let nd = if nd < Ratio::from_integer(1) {
        "nd<1"
    } else if nd < Ratio::from_integer(2) {
        "nd1-2"
    } else {
        "nd>=2"
    };
    format!("{dnf}/{nd}")
}

#[derive(Clone, Debug)]
pub struct Report {
    pub methods: Vec<Method>,
    /// Index into `methods`.
    pub baseline: usize,
    pub hard_threshold: Duration,
    pub instances: Vec<InstanceResult>,
}

impl Report {
    pub fn median(&self, method: usize, metric: Metric) -> Option<Value> {
        let v: Vec<Value> = self
            .instances
            .iter()
            .filter_map(|r| metric.of(&r.outcomes[method]))
            .collect();
        median(&v)
    }

    pub fn timeouts(&self, method: usize) -> usize {
        self.instances
            .iter()
            .filter(|r| r.outcomes[method] == Outcome::Timeout)
            .count()
    }

    pub fn mismatch_count(&self) -> usize {
        self.instances.iter().map(|r| r.mismatches.len()).sum()
    }

    /// Instances whose baseline timed out or exceeded the hard threshold.
    pub fn is_hard(&self, r: &InstanceResult) -> bool {
        match &r.outcomes[self.baseline] {
            Outcome::Timeout => true,
            Outcome::Done { time, .. } => *time > self.hard_threshold,
        }
    }

    /// Per group, per method: median of the per-instance output-state
    /// ratios against the baseline, and the number of instances.
    pub fn ratio_table(&self, hard_only: bool) -> BTreeMap<String, (usize, Vec<Option<Value>>)> {
        let mut groups: BTreeMap<String, Vec<&InstanceResult>> = BTreeMap::new();
        for r in &self.instances {
            if !hard_only || self.is_hard(r) {
                groups.entry(group_of(r)).or_default().push(r);
            }
        }
        groups
            .into_iter()
            .map(|(g, rs)| {
                let cols = (0..self.methods.len())
                    .map(|m| {
                        let v: Vec<Value> = rs
                            .iter()
                            .filter_map(|r| {
                                let x = Metric::States.of(&r.outcomes[m])?;
                                let b = Metric::States.of(&r.outcomes[self.baseline])?;
                                ratio(x, b)
                            })
                            .collect();
                        median(&v)
                    })
                    .collect();
                (g, (rs.len(), cols))
            })
            .collect()
    }

    /// Line-oriented `key value` report with a version header.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let names: Vec<String> = self.methods.iter().map(|m| m.to_string()).collect();
        let opt = |v: Option<Value>| v.map_or("-".to_string(), |v| v.to_string());
        writeln!(s, "tela-bench-report {REPORT_VERSION}").unwrap();
        writeln!(s, "instances {}", self.instances.len()).unwrap();
        writeln!(s, "methods {}", names.join(",")).unwrap();
        writeln!(s, "baseline {}", names[self.baseline]).unwrap();
        writeln!(s, "mismatches {}", self.mismatch_count()).unwrap();
        for (m, name) in names.iter().enumerate() {
            for metric in Metric::ALL {
                writeln!(s, "median.{name}.{} {}", metric.name(), opt(self.median(m, metric))).unwrap();
            }
            writeln!(s, "timeouts.{name} {}", self.timeouts(m)).unwrap();
        }
        for r in &self.instances {
            let p = format!("instance.{}", r.index);
            writeln!(s, "{p}.seed {}", r.seed).unwrap();
            writeln!(s, "{p}.input_states {}", r.input_states).unwrap();
            writeln!(s, "{p}.dnf_length {}", r.dnf_length).unwrap();
            writeln!(s, "{p}.nondeterminism {}", r.nondeterminism).unwrap();
            for (m, name) in names.iter().enumerate() {
                for metric in Metric::ALL {
                    writeln!(s, "{p}.{name}.{} {}", metric.name(), opt(metric.of(&r.outcomes[m]))).unwrap();
                }
            }
            for (x, y) in &r.mismatches {
                writeln!(s, "{p}.mismatch {} {}", names[*x], names[*y]).unwrap();
            }
        }
        for (label, hard) in [("all", false), ("hard", true)] {
            for (g, (n, cols)) in self.ratio_table(hard) {
                writeln!(s, "ratio.{label}.{g}.count {n}").unwrap();
                for (name, v) in names.iter().zip(cols) {
                    writeln!(s, "ratio.{label}.{g}.{name} {}", opt(v)).unwrap();
                }
            }
        }
        s
    }

    /// Human-readable median table and ratio tables. Ratios are printed as
    /// `0 (inf)` style values when one side timed out.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let names: Vec<String> = self.methods.iter().map(|m| m.to_string()).collect();
        let w = names.iter().map(|n| n.len()).max().unwrap_or(6).max(6);
        let opt = |v: Option<Value>| v.map_or("-".to_string(), |v| v.to_string());
        writeln!(
            s,
            "{} instances, {} language mismatches",
            self.instances.len(),
            self.mismatch_count()
        )
        .unwrap();
        writeln!(s, "{:w$}  {:>10} {:>10} {:>8} {:>10} {:>8}", "method", "states", "time_ms", "marks", "gba_marks", "timeouts").unwrap();
        for (m, name) in names.iter().enumerate() {
            writeln!(
                s,
                "{name:w$}  {:>10} {:>10} {:>8} {:>10} {:>8}",
                opt(self.median(m, Metric::States)),
                opt(self.median(m, Metric::TimeMs)),
                opt(self.median(m, Metric::Marks)),
                opt(self.median(m, Metric::GbaMarks)),
                self.timeouts(m)
            )
            .unwrap();
        }
        for (label, hard) in [("all", false), ("hard", true)] {
            let t = self.ratio_table(hard);
            if t.is_empty() {
                continue;
            }
            writeln!(s, "\nstate ratios vs {} ({label} instances)", names[self.baseline]).unwrap();
            write!(s, "{:16} {:>5}", "group", "n").unwrap();
            for name in &names {
                write!(s, " {name:>w$}").unwrap();
            }
            writeln!(s).unwrap();
            for (g, (n, cols)) in t {
                write!(s, "{g:16} {n:>5}").unwrap();
                for v in cols {
                    write!(s, " {:>w$}", opt(v)).unwrap();
                }
                writeln!(s).unwrap();
            }
        }
        s
    }
}
