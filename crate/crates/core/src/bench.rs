//! Suite runs over many instances and methods, best-known tables, mean
//! relative error and the CSV files they are exchanged through.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heuristic::{run_p1, HeuristicStatus};
use crate::policy_space::brute_force_optimum_forced;
use crate::queue::{evaluate_closed_form, Instance, Method, Policy};
use crate::solver::{solve, SolverConfig, Strategy};

/// Brute force replaces the best-known value up to this many policies.
pub const BRUTE_FORCE_TABLE_LIMIT: u128 = 100_000;

pub const DEFAULT_CHECKPOINTS: [f64; 6] = [1.0, 5.0, 10.0, 50.0, 150.0, 500.0];

/// A named way of attacking an instance.
///
/// Names: `p1`, `brute`, a solver strategy optionally followed by `+dom`
/// and/or `+hybrid` (e.g. `alt-search-shave+dom`), and `hybrid` as shorthand
/// for `alt-search-shave+hybrid`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MethodSpec {
    Heuristic,
    BruteForce,
    Solver { strategy: Strategy, dominance: bool, hybrid: bool },
}

impl MethodSpec {
    pub fn solver_config(&self, time_limit: f64) -> Option<SolverConfig> {
        match *self {
            MethodSpec::Solver { strategy, dominance, hybrid } => Some(SolverConfig {
                strategy,
                dominance,
                hybrid,
                time_limit,
                ..SolverConfig::default()
            }),
            _ => None,
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Heuristic => f.write_str("p1"),
            MethodSpec::BruteForce => f.write_str("brute"),
            MethodSpec::Solver { strategy: Strategy::AltSearchShave, dominance: false, hybrid: true } => {
                f.write_str("hybrid")
            }
            MethodSpec::Solver { strategy, dominance, hybrid } => {
                write!(f, "{strategy}")?;
                if *dominance {
                    f.write_str("+dom")?;
                }
                if *hybrid {
                    f.write_str("+hybrid")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for MethodSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p1" => return Ok(MethodSpec::Heuristic),
            "brute" => return Ok(MethodSpec::BruteForce),
            "hybrid" => {
                return Ok(MethodSpec::Solver {
                    strategy: Strategy::AltSearchShave,
                    dominance: false,
                    hybrid: true,
                })
            }
            _ => {}
        }
        let mut parts = s.split('+');
        let strategy: Strategy = parts.next().unwrap_or_default().parse()?;
        let (mut dominance, mut hybrid) = (false, false);
        for flag in parts {
            match flag {
                "dom" if !dominance => dominance = true,
                "hybrid" if !hybrid => hybrid = true,
                other => return Err(format!("unknown or repeated method flag {other:?} in {s:?}")),
            }
        }
        Ok(MethodSpec::Solver { strategy, dominance, hybrid })
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<MethodSpec>, String> {
    list.split(',').map(|m| m.trim().parse()).collect()
}

/// Outcome of one (instance, method) run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRecord {
    pub instance_id: usize,
    pub method: String,
    pub status: String,
    pub wait: Option<f64>,
    pub proof: bool,
    pub elapsed: f64,
    pub nodes: u64,
    pub evaluations: u64,
    /// `(elapsed seconds, Wq)` at each improvement.
    pub trace: Vec<(f64, f64)>,
}

impl SuiteRecord {
    /// Best `Wq` known to the method at time `t`.
    pub fn wait_at(&self, t: f64) -> Option<f64> {
        self.trace.iter().take_while(|&&(ts, _)| ts <= t).last().map(|&(_, w)| w)
    }
}

/// Runs one method on one instance.
pub fn run_method(instance_id: usize, inst: &Instance, method: &MethodSpec, time_limit: f64) -> SuiteRecord {
    let started = Instant::now();
    let name = method.to_string();
    match method {
        MethodSpec::Heuristic => {
            let res = run_p1(inst);
            let elapsed = started.elapsed().as_secs_f64();
            let (status, wait, proof) = match res.status {
                HeuristicStatus::Infeasible => ("infeasible", None, true),
                HeuristicStatus::Solved => {
                    let extreme = res.policy == Policy::eager(inst) || res.policy == Policy::lazy(inst);
                    let status = if extreme { "optimal" } else { "feasible" };
                    (status, Some(res.wait), extreme)
                }
            };
            SuiteRecord {
                instance_id,
                method: name,
                status: status.into(),
                wait,
                proof,
                elapsed,
                nodes: 0,
                evaluations: res.evaluations as u64,
                trace: wait.map(|w| vec![(elapsed, w)]).unwrap_or_default(),
            }
        }
        MethodSpec::BruteForce => {
            let best = brute_force_optimum_forced(inst, Method::ClosedForm);
            let elapsed = started.elapsed().as_secs_f64();
            let wait = best.map(|b| b.wait);
            SuiteRecord {
                instance_id,
                method: name,
                status: if wait.is_some() { "optimal" } else { "infeasible" }.into(),
                wait,
                proof: true,
                elapsed,
                nodes: 0,
                evaluations: u64::try_from(inst.policy_count()).unwrap_or(u64::MAX),
                trace: wait.map(|w| vec![(elapsed, w)]).unwrap_or_default(),
            }
        }
        MethodSpec::Solver { .. } => {
            let cfg = method.solver_config(time_limit).expect("solver method");
            let res = solve(inst, &cfg).expect("suite time limit is validated by the caller");
            SuiteRecord {
                instance_id,
                method: name,
                status: res.status.to_string(),
                wait: res.wait,
                proof: res.proof,
                elapsed: res.elapsed,
                nodes: res.stats.nodes,
                evaluations: res.stats.evaluations,
                trace: res.incumbent_trace,
            }
        }
    }
}

/// Best-known `Wq` per instance id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BestKnownTable(BTreeMap<usize, f64>);

impl BestKnownTable {
    /// Minimum recorded `Wq` per instance.
    pub fn from_records(records: &[SuiteRecord]) -> Self {
        let mut table = Self::default();
        for r in records {
            if let Some(w) = r.wait {
                table.observe(r.instance_id, w);
            }
        }
        table
    }

    pub fn observe(&mut self, instance_id: usize, wait: f64) {
        self.0.entry(instance_id).and_modify(|v| *v = v.min(wait)).or_insert(wait);
    }

    /// Replaces entries by the exact optimum where brute force is cheap.
    pub fn substitute_brute_force(&mut self, instances: &[Instance]) {
        for (id, inst) in instances.iter().enumerate() {
            if inst.policy_count() <= BRUTE_FORCE_TABLE_LIMIT {
                if let Some(best) = brute_force_optimum_forced(inst, Method::ClosedForm) {
                    self.0.insert(id, best.wait);
                }
            }
        }
    }

    pub fn get(&self, instance_id: usize) -> Option<f64> {
        self.0.get(&instance_id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `Wq` of the lazy policy per instance, used when a method has nothing.
pub fn fallback_waits(instances: &[Instance]) -> BTreeMap<usize, f64> {
    instances
        .iter()
        .enumerate()
        .map(|(id, inst)| (id, evaluate_closed_form(inst, &Policy::lazy(inst)).wait))
        .collect()
}

/// Mean relative error of `value(record)` against the table, over the
/// instances in the table. Instances without a value fall back to
/// `fallback`.
fn mean_relative_error<'a>(
    records: impl IntoIterator<Item = &'a SuiteRecord>,
    table: &BestKnownTable,
    fallback: &BTreeMap<usize, f64>,
    value: impl Fn(&SuiteRecord) -> Option<f64>,
) -> f64 {
    let by_id: BTreeMap<usize, &SuiteRecord> = records.into_iter().map(|r| (r.instance_id, r)).collect();
    let mut total = 0.0;
    let mut count = 0usize;
    for (id, best) in table.iter() {
        let c = by_id
            .get(&id)
            .and_then(|r| value(r))
            .or_else(|| fallback.get(&id).copied())
            .unwrap_or(best);
        total += (c - best) / best;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// Final MRE of one method's records.
pub fn mre<'a>(
    records: impl IntoIterator<Item = &'a SuiteRecord>,
    table: &BestKnownTable,
    fallback: &BTreeMap<usize, f64>,
) -> f64 {
    mean_relative_error(records, table, fallback, |r| r.wait)
}

/// MRE using each method's incumbent at time `t`.
pub fn mre_at<'a>(
    records: impl IntoIterator<Item = &'a SuiteRecord>,
    table: &BestKnownTable,
    fallback: &BTreeMap<usize, f64>,
    t: f64,
) -> f64 {
    mean_relative_error(records, table, fallback, |r| r.wait_at(t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub records: Vec<SuiteRecord>,
    pub table: BestKnownTable,
    pub fallback: BTreeMap<usize, f64>,
}

impl SuiteOutcome {
    pub fn records_for<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a SuiteRecord> + 'a {
        self.records.iter().filter(move |r| r.method == method)
    }

    /// `(method, checkpoint, MRE)` rows for the given checkpoints.
    pub fn mre_curve(&self, methods: &[MethodSpec], checkpoints: &[f64]) -> Vec<(String, f64, f64)> {
        let mut rows = Vec::new();
        for m in methods {
            let name = m.to_string();
            for &t in checkpoints {
                rows.push((name.clone(), t, mre_at(self.records_for(&name), &self.table, &self.fallback, t)));
            }
        }
        rows
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("time limit must be positive, got {0}")]
    TimeLimit(f64),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Runs every (instance, method) pair on `workers` threads (0 picks the
/// number of CPUs). Records come back ordered by instance, then method.
pub fn run_suite(
    instances: &[Instance],
    methods: &[MethodSpec],
    time_limit: f64,
    workers: usize,
) -> Result<SuiteOutcome, SuiteError> {
    if time_limit.is_nan() || time_limit <= 0.0 {
        return Err(SuiteError::TimeLimit(time_limit));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let pairs: Vec<(usize, &MethodSpec)> = (0..instances.len())
        .flat_map(|id| methods.iter().map(move |m| (id, m)))
        .collect();
    let records: Vec<SuiteRecord> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(id, m)| run_method(id, &instances[id], m, time_limit))
            .collect()
    });
    let mut table = BestKnownTable::from_records(&records);
    table.substitute_brute_force(instances);
    Ok(SuiteOutcome { records, table, fallback: fallback_waits(instances) })
}

#[derive(Debug, Serialize, Deserialize)]
struct ResultRow {
    instance_id: usize,
    method: String,
    status: String,
    wq: Option<f64>,
    proof: bool,
    elapsed_s: f64,
    nodes: u64,
    evals: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    instance_id: usize,
    method: String,
    t_s: f64,
    wq: f64,
}

/// `results.csv` -> `results_trace.csv`.
pub fn trace_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv_path.with_file_name(format!("{stem}_trace.csv"))
}

/// Writes the results file and its sibling trace file.
pub fn write_records(records: &[SuiteRecord], csv_path: &Path) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_path(csv_path)?;
    for r in records {
        out.serialize(ResultRow {
            instance_id: r.instance_id,
            method: r.method.clone(),
            status: r.status.clone(),
            wq: r.wait,
            proof: r.proof,
            elapsed_s: r.elapsed,
            nodes: r.nodes,
            evals: r.evaluations,
        })?;
    }
    out.flush()?;

    let mut trace = csv::Writer::from_path(trace_path(csv_path))?;
    for r in records {
        for &(t_s, wq) in &r.trace {
            trace.serialize(TraceRow { instance_id: r.instance_id, method: r.method.clone(), t_s, wq })?;
        }
    }
    trace.flush()?;
    Ok(())
}

/// Reads a results file and, if present, its trace file.
pub fn read_records(csv_path: &Path) -> Result<Vec<SuiteRecord>, csv::Error> {
    let mut records = Vec::new();
    let mut index = BTreeMap::new();
    for row in csv::Reader::from_path(csv_path)?.deserialize() {
        let row: ResultRow = row?;
        index.insert((row.instance_id, row.method.clone()), records.len());
        records.push(SuiteRecord {
            instance_id: row.instance_id,
            method: row.method,
            status: row.status,
            wait: row.wq,
            proof: row.proof,
            elapsed: row.elapsed_s,
            nodes: row.nodes,
            evaluations: row.evals,
            trace: Vec::new(),
        });
    }
    let trace_file = trace_path(csv_path);
    if trace_file.exists() {
        for row in csv::Reader::from_reader(File::open(trace_file)?).deserialize() {
            let row: TraceRow = row?;
            if let Some(&i) = index.get(&(row.instance_id, row.method)) {
                records[i].trace.push((row.t_s, row.wq));
            }
        }
    }
    Ok(records)
}
