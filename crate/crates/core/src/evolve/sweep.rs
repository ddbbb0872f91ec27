//! Parameter sweeps over benchmarks, λ, node budget, mutation rate and seeds.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use super::{evolve, EvolveConfig, EvolveError};
use crate::cgp::{CgpError, CgpParams};
use crate::fsm::TruthTable;

pub const DETAIL_HEADER: [&str; 10] = [
    "benchmark",
    "lambda",
    "m",
    "mu_r",
    "seed",
    "solved",
    "generations",
    "evaluations",
    "active_nodes",
    "wall_time_s",
];

pub const AGGREGATE_HEADER: [&str; 11] = [
    "benchmark",
    "lambda",
    "m",
    "mu_r",
    "runs",
    "solved",
    "solve_rate",
    "median_generations",
    "median_evaluations",
    "min_nodes",
    "median_nodes",
];

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("empty grid")]
    EmptyGrid,
    #[error("grid entry {0} has no seeds")]
    NoSeeds(usize),
    #[error("unknown benchmark {0:?}")]
    UnknownBenchmark(String),
    #[error("grid entry {index}: {source}")]
    Params { index: usize, source: CgpError },
    #[error("run {benchmark} seed {seed}: {source}")]
    Run {
        benchmark: String,
        seed: u64,
        source: EvolveError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One configuration, run once per seed.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub benchmark: String,
    pub lambda: usize,
    pub m: usize,
    pub mu_r: f64,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub benchmark: String,
    pub lambda: usize,
    pub m: usize,
    pub mu_r: f64,
    pub seed: u64,
    pub solved: bool,
    pub generations: u64,
    pub evaluations: u64,
    pub active_nodes: usize,
    pub wall_time_s: f64,
}

/// Statistics over one grid entry. Medians and node counts cover solved
/// runs only and are `None` when nothing solved.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAggregate {
    pub benchmark: String,
    pub lambda: usize,
    pub m: usize,
    pub mu_r: f64,
    pub runs: usize,
    pub solved: usize,
    pub median_generations: Option<f64>,
    pub median_evaluations: Option<f64>,
    pub min_nodes: Option<usize>,
    pub median_nodes: Option<f64>,
}

impl SweepAggregate {
    pub fn solve_rate(&self) -> f64 {
        self.solved as f64 / self.runs as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<SweepAggregate>,
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    })
}

/// Run every (entry, seed) cell on the current rayon pool. Rows come back
/// in grid order regardless of scheduling. Unsolved runs are ordinary rows.
pub fn run_sweep(
    tables: &BTreeMap<String, TruthTable>,
    grid: &[GridEntry],
    max_generations: u64,
) -> Result<SweepResult, SweepError> {
    if grid.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    let mut cells = Vec::new();
    for (index, e) in grid.iter().enumerate() {
        if e.seeds.is_empty() {
            return Err(SweepError::NoSeeds(index));
        }
        let tt = tables
            .get(&e.benchmark)
            .ok_or_else(|| SweepError::UnknownBenchmark(e.benchmark.clone()))?;
        let params = CgpParams::new(tt.num_vars(), tt.num_outs(), e.m, e.mu_r)
            .map_err(|source| SweepError::Params { index, source })?;
        if e.lambda == 0 {
            return Err(SweepError::Run {
                benchmark: e.benchmark.clone(),
                seed: e.seeds[0],
                source: EvolveError::Lambda,
            });
        }
        for &seed in &e.seeds {
            cells.push((e, tt, params, seed));
        }
    }

    let rows = cells
        .into_par_iter()
        .map(|(e, tt, params, seed)| {
            let cfg = EvolveConfig::new(e.lambda, max_generations, seed);
            let report = evolve(tt, params, cfg).map_err(|source| SweepError::Run {
                benchmark: e.benchmark.clone(),
                seed,
                source,
            })?;
            log::info!(
                "{} lambda={} m={} mu={} seed={}: solved={} generations={} nodes={}",
                e.benchmark,
                e.lambda,
                e.m,
                e.mu_r,
                seed,
                report.solved,
                report.generations_used,
                report.active_nodes
            );
            Ok(SweepRow {
                benchmark: e.benchmark.clone(),
                lambda: e.lambda,
                m: e.m,
                mu_r: e.mu_r,
                seed,
                solved: report.solved,
                generations: report.generations_used,
                evaluations: report.evaluations,
                active_nodes: report.active_nodes,
                wall_time_s: report.wall_time.as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>, SweepError>>()?;

    let mut aggregates = Vec::with_capacity(grid.len());
    let mut offset = 0;
    for e in grid {
        let runs = &rows[offset..offset + e.seeds.len()];
        offset += e.seeds.len();
        let solved: Vec<&SweepRow> = runs.iter().filter(|r| r.solved).collect();
        aggregates.push(SweepAggregate {
            benchmark: e.benchmark.clone(),
            lambda: e.lambda,
            m: e.m,
            mu_r: e.mu_r,
            runs: runs.len(),
            solved: solved.len(),
            median_generations: median(solved.iter().map(|r| r.generations as f64).collect()),
            median_evaluations: median(solved.iter().map(|r| r.evaluations as f64).collect()),
            min_nodes: solved.iter().map(|r| r.active_nodes).min(),
            median_nodes: median(solved.iter().map(|r| r.active_nodes as f64).collect()),
        });
    }
    Ok(SweepResult { rows, aggregates })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn detail_csv(rows: &[SweepRow]) -> Result<String, SweepError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DETAIL_HEADER)?;
    for r in rows {
        w.write_record([
            r.benchmark.clone(),
            r.lambda.to_string(),
            r.m.to_string(),
            r.mu_r.to_string(),
            r.seed.to_string(),
            r.solved.to_string(),
            r.generations.to_string(),
            r.evaluations.to_string(),
            r.active_nodes.to_string(),
            format!("{:.6}", r.wall_time_s),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf8"))
}

pub fn aggregate_csv(aggs: &[SweepAggregate]) -> Result<String, SweepError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(AGGREGATE_HEADER)?;
    for a in aggs {
        w.write_record([
            a.benchmark.clone(),
            a.lambda.to_string(),
            a.m.to_string(),
            a.mu_r.to_string(),
            a.runs.to_string(),
            a.solved.to_string(),
            format!("{:.4}", a.solve_rate()),
            opt(a.median_generations),
            opt(a.median_evaluations),
            opt(a.min_nodes),
            opt(a.median_nodes),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf8"))
}
