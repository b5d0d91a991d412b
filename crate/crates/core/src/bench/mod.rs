//! Benchmark family, random models for differential testing, and sweeps.

mod family;
mod random;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

pub use family::{generate_benchmark, Benchmark, BenchmarkParams};
pub use random::{random_statechart, RandomShape};

use crate::checkers::{CheckOptions, Engine};
use crate::run::{verify, Abstraction};

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub base: BenchmarkParams,
    pub counter_max: Vec<u32>,
    pub engines: Vec<Engine>,
    pub abstractions: Vec<Abstraction>,
    /// Check the reachable spec instead of the unreachable one.
    pub reachable: bool,
    pub options: CheckOptions,
    /// Worker threads; each cell owns its solver sessions.
    pub jobs: usize,
}

/// One cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub engine: Engine,
    pub abstraction: Abstraction,
    pub counter_max: u32,
    pub verdict: String,
    pub time_ms: f64,
    pub iterations: usize,
    pub confs_max: Option<usize>,
    pub confs_eve: Option<usize>,
    pub solver_queries: usize,
}

/// Runs every (engine, abstraction, counter maximum) cell. Once a cell of an
/// (engine, abstraction) pair runs out of resources, its larger parameters
/// are skipped and do not appear in the output.
pub fn sweep(cfg: &SweepConfig) -> Vec<SweepRow> {
    let mut pairs = Vec::new();
    for e in &cfg.engines {
        for a in &cfg.abstractions {
            pairs.push((*e, *a));
        }
    }
    let mut params = cfg.counter_max.clone();
    params.sort_unstable();
    params.dedup();
    let run_pair = |(engine, abstraction): (Engine, Abstraction)| -> Vec<SweepRow> {
        let mut rows = Vec::new();
        for &n in &params {
            let row = run_cell(cfg, engine, abstraction, n);
            let stop = row.verdict == "resource-exhausted" || row.verdict.starts_with("error");
            rows.push(row);
            if stop {
                break;
            }
        }
        rows
    };
    let jobs = cfg.jobs.max(1).min(pairs.len().max(1));
    let mut rows: Vec<SweepRow> = if jobs == 1 {
        pairs.into_iter().flat_map(run_pair).collect()
    } else {
        let chunks: Vec<Vec<(Engine, Abstraction)>> = (0..jobs)
            .map(|j| pairs.iter().copied().skip(j).step_by(jobs).collect())
            .collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|c| s.spawn(|| c.into_iter().flat_map(run_pair).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("sweep worker"))
                .collect()
        })
    };
    let key = |r: &SweepRow| (r.engine.name(), r.abstraction.name(), r.counter_max);
    rows.sort_by(|a, b| key(a).cmp(&key(b)));
    rows
}

fn run_cell(cfg: &SweepConfig, engine: Engine, abstraction: Abstraction, n: u32) -> SweepRow {
    let bench = generate_benchmark(cfg.base.with_counter_max(n)).expect("valid sweep parameters");
    let sc = bench.statechart();
    let (reach, unreach) = bench.specs(&sc);
    let spec = if cfg.reachable { reach } else { unreach };
    let start = Instant::now();
    let result = verify(&sc, &spec, engine, abstraction, &cfg.options, &mut |_| {});
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(out) => {
            let s = out.verdict.stats;
            SweepRow {
                engine,
                abstraction,
                counter_max: n,
                verdict: out.verdict.outcome.label().into(),
                time_ms,
                iterations: s.iterations,
                confs_max: s.confs_max,
                confs_eve: s.confs_eve,
                solver_queries: s.solver_queries,
            }
        }
        Err(e) => SweepRow {
            engine,
            abstraction,
            counter_max: n,
            verdict: format!("error: {e}"),
            time_ms,
            iterations: 0,
            confs_max: None,
            confs_eve: None,
            solver_queries: 0,
        },
    }
}

pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], w: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Pairs (engine, abstraction) whose time decreases somewhere as the counter
/// maximum grows. Timing noise makes this a warning, not an error.
pub fn time_trend_violations(rows: &[SweepRow]) -> Vec<String> {
    let mut by_pair: BTreeMap<(&str, &str), Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        by_pair
            .entry((r.engine.name(), r.abstraction.name()))
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for ((e, a), mut rs) in by_pair {
        rs.sort_by_key(|r| r.counter_max);
        for w in rs.windows(2) {
            if w[1].time_ms < w[0].time_ms {
                out.push(format!(
                    "{e}/{a}: {:.1} ms at {} but {:.1} ms at {}",
                    w[0].time_ms, w[0].counter_max, w[1].time_ms, w[1].counter_max
                ));
            }
        }
    }
    out
}

/// Whether every row for the same parameter reports the same verdict.
pub fn verdicts_agree(rows: &[SweepRow]) -> bool {
    let mut seen: BTreeMap<u32, &str> = BTreeMap::new();
    rows.iter().all(|r| {
        let v = match r.verdict.as_str() {
            "bound-exhausted" => "safe",
            v => v,
        };
        *seen.entry(r.counter_max).or_insert(v) == v
    })
}

#[cfg(test)]
mod tests;
