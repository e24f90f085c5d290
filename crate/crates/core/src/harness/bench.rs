//! Cost counters across set sizes.

use std::time::{Duration, Instant};

use super::generate::disjoint_instance;
use crate::error::Result;
use crate::greedy::{approximate_maximum_cover, GreedyParams};
use crate::oracle::{BackendKind, CostCounters, SeedSequence};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub m: u64,
    pub counters: CostCounters,
    pub wall: Duration,
}

/// Solves a disjoint instance of `n` sets of size `m` for each `m` in
/// `sizes`. On disjoint sets no sample is ever covered by another set, so
/// the draw and query counts are fixed by `(n, k, xi, gamma)` alone.
pub fn bench(n: usize, params: &GreedyParams, sizes: &[u64], backend: BackendKind, seed: u64) -> Result<Vec<BenchRow>> {
    sizes
        .iter()
        .map(|&m| {
            let file = disjoint_instance(n, m, params.k, seed)?;
            let mut instance = file.build(backend)?;
            let started = Instant::now();
            let r = approximate_maximum_cover(&mut instance, params, SeedSequence::new(seed))?;
            Ok(BenchRow {
                m,
                counters: r.counters,
                wall: started.elapsed(),
            })
        })
        .collect()
}

/// Whether draws, queries and steps agree across all rows.
pub fn counters_independent_of_m(rows: &[BenchRow]) -> bool {
    rows.windows(2).all(|p| p[0].counters == p[1].counters)
}

pub fn write_bench<W: std::io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "steps", "random_draws", "membership_queries", "wall_ms"])?;
    for r in rows {
        w.write_record([
            r.m.to_string(),
            r.counters.steps.to_string(),
            r.counters.random_draws.to_string(),
            r.counters.membership_queries.to_string(),
            format!("{:.3}", r.wall.as_secs_f64() * 1e3),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::Strategy;

    #[test]
    fn counters_do_not_move_with_m() {
        for strategy in [Strategy::SingleRound, Strategy::MultiRound] {
            let p = GreedyParams::with_xi(0.8, 0.3, 2, strategy).unwrap();
            let rows = bench(4, &p, &[10, 1000, 100_000], BackendKind::Sorted, 1).unwrap();
            assert!(counters_independent_of_m(&rows), "{rows:?}");
        }
    }
}
