//! (1+λ) evolution strategy.
//!
//! Generation 0 is a uniformly random parent. Each generation mutates λ
//! independent copies of the parent (offspring `0..λ` in order, all drawing
//! from the run's single generator), evaluates them, and picks the next
//! parent with [`select_parent`]. The run stops at zero mismatches or when
//! the generation budget is spent.

mod sweep;

use std::fmt::Write;
use std::time::{Duration, Instant};

use rand_core::RngCore;
use thiserror::Error;

use crate::cgp::{CgpParams, Genotype};
use crate::eval::{pack_table, EvalError, Fitness, Scratch};
use crate::fsm::TruthTable;
use crate::rng::{below, seeded};

pub use sweep::{
    aggregate_csv, detail_csv, run_sweep, GridEntry, SweepAggregate, SweepError, SweepResult,
    SweepRow, AGGREGATE_HEADER, DETAIL_HEADER,
};

pub const DEFAULT_MAX_GENERATIONS: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("lambda must be at least 1")]
    Lambda,
    #[error("generation budget must be at least 1")]
    Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolveConfig {
    pub lambda: usize,
    pub max_generations: u64,
    pub seed: u64,
    /// Also record the parent every `snapshot_stride` generations; 0 records
    /// improvements only.
    pub snapshot_stride: u64,
}

impl EvolveConfig {
    pub fn new(lambda: usize, max_generations: u64, seed: u64) -> Self {
        EvolveConfig {
            lambda,
            max_generations,
            seed,
            snapshot_stride: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub generation: u64,
    pub mismatches: u64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionReport {
    pub solved: bool,
    pub generations_used: u64,
    pub evaluations: u64,
    pub best_trace: Vec<TracePoint>,
    pub final_genotype: Genotype,
    pub final_fitness: Fitness,
    pub active_nodes: usize,
    pub config: EvolveConfig,
    pub wall_time: Duration,
}

impl EvolutionReport {
    /// Line-oriented summary. Everything except the `wall_time_s` line is a
    /// pure function of the inputs to [`evolve`].
    pub fn to_text(&self, include_wall_time: bool) -> String {
        let p = self.final_genotype.params();
        let mut s = String::new();
        writeln!(s, "solved {}", self.solved).unwrap();
        writeln!(s, "seed {}", self.config.seed).unwrap();
        writeln!(s, "lambda {}", self.config.lambda).unwrap();
        writeln!(s, "m {}", p.columns).unwrap();
        writeln!(s, "mu_r {}", p.mutation_rate).unwrap();
        writeln!(s, "max_generations {}", self.config.max_generations).unwrap();
        writeln!(s, "generations {}", self.generations_used).unwrap();
        writeln!(s, "evaluations {}", self.evaluations).unwrap();
        writeln!(s, "mismatches {}", self.final_fitness.mismatches).unwrap();
        writeln!(s, "rmse {:.6}", self.final_fitness.rmse()).unwrap();
        writeln!(s, "active_nodes {}", self.active_nodes).unwrap();
        for t in &self.best_trace {
            writeln!(s, "trace {} {} {:.6}", t.generation, t.mismatches, t.rmse).unwrap();
        }
        if include_wall_time {
            writeln!(s, "wall_time_s {:.6}", self.wall_time.as_secs_f64()).unwrap();
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Parent,
    Offspring(usize),
}

/// Pick the next parent by least error.
///
/// An offspring that ties the parent beats it. When several offspring share
/// the least error one of them is chosen uniformly, consuming exactly one
/// bounded draw; no draw happens otherwise.
pub fn select_parent<R: RngCore + ?Sized>(
    parent: u64,
    offspring: &[u64],
    rng: &mut R,
) -> Selection {
    let best = offspring
        .iter()
        .copied()
        .min()
        .expect("at least one offspring");
    if best > parent {
        return Selection::Parent;
    }
    let tied = offspring.iter().filter(|&&e| e == best).count();
    let pick = if tied > 1 {
        below(rng, tied as u32) as usize
    } else {
        0
    };
    let idx = offspring
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == best)
        .nth(pick)
        .map(|(i, _)| i)
        .unwrap();
    Selection::Offspring(idx)
}

pub fn evolve(
    tt: &TruthTable,
    params: CgpParams,
    cfg: EvolveConfig,
) -> Result<EvolutionReport, EvolveError> {
    evolve_with(tt, params, cfg, |_, _| {})
}

/// [`evolve`] with a callback seeing every selection as
/// `(generation, selection)`.
pub fn evolve_with(
    tt: &TruthTable,
    params: CgpParams,
    cfg: EvolveConfig,
    mut on_select: impl FnMut(u64, Selection),
) -> Result<EvolutionReport, EvolveError> {
    if cfg.lambda == 0 {
        return Err(EvolveError::Lambda);
    }
    if cfg.max_generations == 0 {
        return Err(EvolveError::Budget);
    }
    let start = Instant::now();
    let pt = pack_table(tt)?;
    let total_care = pt.total_care();
    let mut rng = seeded(cfg.seed);
    let mut scratch = Scratch::default();

    let mut parent = Genotype::random(params, &mut rng);
    crate::eval::evaluate(&parent, &pt)?;
    let mut parent_err = pt.mismatches(&parent, &mut scratch);
    let point = |generation, m| TracePoint {
        generation,
        mismatches: m,
        rmse: Fitness::new(m, total_care).rmse(),
    };
    let mut trace = vec![point(0, parent_err)];

    let mut children: Vec<Genotype> = vec![parent.clone(); cfg.lambda];
    let mut errors = vec![0u64; cfg.lambda];
    let mut generation = 0u64;
    while parent_err > 0 && generation < cfg.max_generations {
        generation += 1;
        for (child, err) in children.iter_mut().zip(errors.iter_mut()) {
            child.clone_from(&parent);
            child.mutate_in_place(&mut rng);
            *err = pt.mismatches(child, &mut scratch);
        }
        let sel = select_parent(parent_err, &errors, &mut rng);
        on_select(generation, sel);
        let before = parent_err;
        if let Selection::Offspring(i) = sel {
            std::mem::swap(&mut parent, &mut children[i]);
            parent_err = errors[i];
        }
        let stride_hit = cfg.snapshot_stride > 0 && generation.is_multiple_of(cfg.snapshot_stride);
        if parent_err < before || stride_hit {
            trace.push(point(generation, parent_err));
        }
    }

    let active_nodes = parent.decode().gate_count();
    Ok(EvolutionReport {
        solved: parent_err == 0,
        generations_used: generation,
        evaluations: generation * cfg.lambda as u64,
        best_trace: trace,
        final_fitness: Fitness::new(parent_err, total_care),
        final_genotype: parent,
        active_nodes,
        config: cfg,
        wall_time: start.elapsed(),
    })
}
