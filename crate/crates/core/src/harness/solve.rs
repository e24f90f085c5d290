//! Repeated seeded runs of the solver on one instance file, with exact
//! post-hoc evaluation.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::instance_file::InstanceFile;
use crate::baselines::{brute_force_optimum_capped, coverage, DEFAULT_SUBSET_CAP};
use crate::error::Result;
use crate::greedy::{approximate_maximum_cover, GreedyParams};
use crate::oracle::{BackendKind, CostCounters, Element, SeedSequence};

/// Instances with more members than this are not materialized.
pub const DEFAULT_MATERIALIZE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub params: GreedyParams,
    pub backend: BackendKind,
    pub seed: u64,
    pub trials: usize,
    /// Worker threads across trials; 0 runs them one after another.
    pub threads: usize,
    pub subset_cap: u128,
    pub materialize_limit: u64,
}

impl SolveConfig {
    pub fn new(params: GreedyParams, backend: BackendKind, seed: u64, trials: usize) -> Self {
        SolveConfig {
            params,
            backend,
            seed,
            trials,
            threads: 0,
            subset_cap: DEFAULT_SUBSET_CAP,
            materialize_limit: DEFAULT_MATERIALIZE_LIMIT,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub trial: usize,
    pub selected: Vec<usize>,
    pub z: f64,
    /// Exact `|∪ H|`, when the sets could be materialized.
    pub coverage: Option<u64>,
    /// `C*(L, k)`, when brute force fits under the cap.
    pub optimum: Option<u64>,
    pub counters: CostCounters,
    pub samples_per_set: u64,
    pub wall: Duration,
}

impl TrialReport {
    pub fn ratio(&self) -> Option<f64> {
        match (self.coverage, self.optimum) {
            (Some(c), Some(o)) if o > 0 => Some(c as f64 / o as f64),
            _ => None,
        }
    }
}

/// Runs `config.trials` independent solves. Trial `t` uses the seed
/// sequence derived from `(config.seed, t)`, so reports do not depend on
/// the number of worker threads.
pub fn solve(file: &InstanceFile, config: &SolveConfig) -> Result<Vec<TrialReport>> {
    let probe = file.build(config.backend)?;
    let sets: Option<Vec<Vec<Element>>> =
        (file.total_cardinality() <= config.materialize_limit).then(|| probe.materialize());
    let optimum = match &sets {
        Some(s) => brute_force_optimum_capped(s, file.k, config.subset_cap)
            .ok()
            .map(|e| e.coverage),
        None => None,
    };
    drop(probe);
    let root = SeedSequence::new(config.seed);
    let run = |trial: usize| -> Result<TrialReport> {
        let mut instance = file.build(config.backend)?;
        let started = Instant::now();
        let r = approximate_maximum_cover(&mut instance, &config.params, root.derive(trial as u64))?;
        let wall = started.elapsed();
        Ok(TrialReport {
            trial,
            coverage: sets.as_ref().map(|s| coverage(s, &r.selected)),
            optimum,
            selected: r.selected,
            z: r.z,
            counters: r.counters,
            samples_per_set: r.samples_per_set,
            wall,
        })
    };
    if config.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| crate::error::invalid("threads", e.to_string()))?;
        pool.install(|| (0..config.trials).into_par_iter().map(run).collect())
    } else {
        (0..config.trials).map(run).collect()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

/// Writes the per-trial cost table. Every column is deterministic for a
/// fixed seed; wall-clock times go to [`write_timings`].
pub fn write_reports<W: Write>(reports: &[TrialReport], config: &SolveConfig, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "strategy",
        "backend",
        "selected",
        "z",
        "z_rounded",
        "coverage",
        "optimum",
        "ratio",
        "steps",
        "random_draws",
        "membership_queries",
        "samples_per_set",
    ])?;
    for r in reports {
        let selected = r.selected.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        w.write_record([
            r.trial.to_string(),
            config.params.strategy.name().to_string(),
            config.backend.name().to_string(),
            selected,
            format!("{:.6}", r.z),
            (r.z.round().max(0.0) as u64).to_string(),
            opt(r.coverage),
            opt(r.optimum),
            opt(r.ratio().map(|x| format!("{x:.6}"))),
            r.counters.steps.to_string(),
            r.counters.random_draws.to_string(),
            r.counters.membership_queries.to_string(),
            r.samples_per_set.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timings<W: Write>(reports: &[TrialReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "wall_ms"])?;
    for r in reports {
        w.write_record([r.trial.to_string(), format!("{:.3}", r.wall.as_secs_f64() * 1e3)])?;
    }
    w.flush()?;
    Ok(())
}
