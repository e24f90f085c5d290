//! Randomized greedy maximum coverage with pluggable gain estimators.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{invalid, CoverError, Result};
use crate::estimation::{approximate_difference_with, sample_count, shared_sample_budget_g};
use crate::oracle::{BackendKind, CostCounters, CoverageInstance, Element, SeedSequence, SetHandle};

/// `eta = e^(-1/4)`.
pub fn eta() -> f64 {
    (-0.25f64).exp()
}

/// `xi = min(epsilon * eta * beta / (4 e^beta k), epsilon)`, the accuracy
/// needed for a `1 - 1/e^beta - epsilon` guarantee after `k` rounds.
pub fn derive_xi(epsilon: f64, beta: f64, k: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("{epsilon} is outside (0, 1)")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid("beta", format!("{beta} is outside (0, 1]")));
    }
    if k == 0 {
        return Err(invalid("k", "the budget must be positive"));
    }
    Ok((epsilon * eta() * beta / (4.0 * beta.exp() * k as f64)).min(epsilon))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Fresh samples for every (round, set) estimate.
    MultiRound,
    /// One sample list per set, drawn up front and marked as sets are chosen.
    SingleRound,
    /// [`Strategy::SingleRound`] over unsorted arrays, sorting each chosen
    /// set so later marking passes can binary search it.
    SingleRoundSortOnSelect,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::MultiRound => "multi",
            Strategy::SingleRound => "single",
            Strategy::SingleRoundSortOnSelect => "single-sort",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = CoverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multi" => Ok(Strategy::MultiRound),
            "single" => Ok(Strategy::SingleRound),
            "single-sort" => Ok(Strategy::SingleRoundSortOnSelect),
            other => Err(invalid("strategy", format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreedyParams {
    pub xi: f64,
    pub gamma: f64,
    /// Always `xi / (4 k)`.
    pub epsilon_prime: f64,
    pub k: usize,
    pub strategy: Strategy,
    /// Worker threads for gain evaluation and marking; 0 runs inline.
    pub threads: usize,
}

impl GreedyParams {
    /// Parameters for a `1 - 1/e^beta - epsilon` target, with `xi` derived
    /// from `epsilon`.
    pub fn from_epsilon(epsilon: f64, gamma: f64, beta: f64, k: usize, strategy: Strategy) -> Result<Self> {
        GreedyParams::with_xi(derive_xi(epsilon, beta, k)?, gamma, k, strategy)
    }

    /// Parameters with `xi` given directly.
    pub fn with_xi(xi: f64, gamma: f64, k: usize, strategy: Strategy) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(invalid("xi", format!("{xi} is outside (0, 1)")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(invalid("gamma", format!("{gamma} is outside (0, 1)")));
        }
        if k == 0 {
            return Err(invalid("k", "the budget must be positive"));
        }
        Ok(GreedyParams {
            xi,
            gamma,
            epsilon_prime: xi / (4.0 * k as f64),
            k,
            strategy,
            threads: 0,
        })
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    /// Samples per estimate in the multi-round strategy:
    /// `sample_count(epsilon', gamma / (4 k n))`.
    pub fn multi_round_w(&self, n: usize) -> Result<u64> {
        sample_count(self.epsilon_prime, self.gamma / (4.0 * self.k as f64 * n as f64))
    }

    /// Samples per set in the single-round strategies: `g(epsilon', gamma, k, n)`.
    pub fn single_round_g(&self, n: usize) -> Result<u64> {
        shared_sample_budget_g(self.epsilon_prime, self.gamma, self.k as u64, n as u64)
    }

    /// Samples per estimate (multi-round) or per set (single-round).
    pub fn samples_per_set(&self, n: usize) -> Result<u64> {
        match self.strategy {
            Strategy::MultiRound => self.multi_round_w(n),
            _ => self.single_round_g(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageResult {
    /// Chosen set indices in selection order.
    pub selected: Vec<usize>,
    pub z: f64,
    /// Estimated gain of each chosen set in the round it was chosen.
    pub gains: Vec<f64>,
    /// Cost of this run alone.
    pub counters: CostCounters,
    /// `w` per estimate (multi-round) or `g` per set (single-round).
    pub samples_per_set: u64,
}

impl CoverageResult {
    pub fn z_rounded(&self) -> u64 {
        self.z.round().max(0.0) as u64
    }
}

/// Per-set sample lists with white/black marks.
///
/// The samples of set `i` are kept partitioned: the first `white_count(i)`
/// are white, the rest black. Marking swaps a newly black sample behind the
/// white prefix, so the multiset of white samples is exactly the one the
/// mark-in-place description yields.
#[derive(Clone, Debug)]
pub struct SampleCache {
    samples: Vec<Vec<Element>>,
    white: Vec<usize>,
    w: u64,
}

impl SampleCache {
    /// Draws `w` samples for every nonempty set, set `i` from stream `i`.
    pub fn init(instance: &CoverageInstance, w: u64, seeds: SeedSequence, threads: usize) -> Result<Self> {
        let draw = |h: &SetHandle| -> Result<Vec<Element>> {
            let mut out = Vec::new();
            if !h.is_empty() {
                let mut rng = seeds.stream(h.set_id() as u64);
                h.sample_into(&mut rng, w, &mut out)?;
            }
            Ok(out)
        };
        let samples: Vec<Vec<Element>> = if threads > 0 {
            with_pool(threads, || {
                instance.handles().par_iter().map(draw).collect::<Result<_>>()
            })?
        } else {
            instance.handles().iter().map(draw).collect::<Result<_>>()?
        };
        let white = samples.iter().map(Vec::len).collect();
        Ok(SampleCache { samples, white, w })
    }

    pub fn w(&self) -> u64 {
        self.w
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self, i: usize) -> &[Element] {
        &self.samples[i]
    }

    pub fn whites(&self, i: usize) -> &[Element] {
        &self.samples[i][..self.white[i]]
    }

    pub fn white_count(&self, i: usize) -> usize {
        self.white[i]
    }

    /// Blackens the white samples of set `i` that lie in `chosen`, charging
    /// one query per white sample tested. Returns the number of flips.
    pub fn mark(&mut self, i: usize, chosen: &SetHandle) -> usize {
        mark_list(&mut self.samples[i], &mut self.white[i], chosen)
    }

    /// Marks the caches of `sets` against `chosen`.
    pub fn mark_all(&mut self, sets: &[usize], chosen: &SetHandle, threads: usize) -> usize {
        let wanted: HashSet<usize> = sets.iter().copied().collect();
        let mut jobs: Vec<(&mut Vec<Element>, &mut usize)> = self
            .samples
            .iter_mut()
            .zip(self.white.iter_mut())
            .enumerate()
            .filter(|(i, _)| wanted.contains(i))
            .map(|(_, pair)| pair)
            .collect();
        if threads > 0 {
            with_pool(threads, || {
                jobs.par_iter_mut().map(|(s, w)| mark_list(s, w, chosen)).sum::<usize>()
            })
        } else {
            jobs.iter_mut().map(|(s, w)| mark_list(s, w, chosen)).sum()
        }
    }

    /// Uncharged recount of the samples of set `i` lying outside every set
    /// in `chosen`, straight from the backends.
    pub fn recount(&self, instance: &CoverageInstance, i: usize, chosen: &[usize]) -> usize {
        self.samples[i]
            .iter()
            .filter(|&&x| !chosen.iter().any(|&c| instance.handle(c).backend().contains(x)))
            .count()
    }
}

fn mark_list(samples: &mut [Element], white: &mut usize, chosen: &SetHandle) -> usize {
    let tested = *white;
    *white = chosen.backend().retain_non_members(&mut samples[..tested]);
    chosen.meter().record(0, tested as u64);
    let flips = tested - *white;
    chosen.meter().add_steps(flips as u64);
    flips
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// The greedy skeleton shared by every estimator: `k` rounds, each scoring
/// the remaining sets in index order and keeping the first strict maximum
/// over a start value of -1.
fn greedy_rounds(
    n: usize,
    k: usize,
    mut score: impl FnMut(usize, &[usize], &[usize]) -> Result<Vec<f64>>,
    mut chosen: impl FnMut(usize, usize, &[usize]) -> Result<()>,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut selected = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    for round in 0..k {
        let scores = score(round, &remaining, &selected)?;
        let mut best = -1.0;
        let mut pick = 0;
        for (pos, &s) in scores.iter().enumerate() {
            if s > best {
                best = s;
                pick = pos;
            }
        }
        let t = remaining.remove(pick);
        selected.push(t);
        gains.push(scores[pick]);
        chosen(round, t, &remaining)?;
    }
    Ok((selected, gains))
}

/// Runs the randomized greedy algorithm on `instance`.
///
/// With a fixed `seeds` the result is reproducible, with or without worker
/// threads: every random stream is keyed by the set (and round) it serves.
pub fn approximate_maximum_cover(
    instance: &mut CoverageInstance,
    params: &GreedyParams,
    seeds: SeedSequence,
) -> Result<CoverageResult> {
    if params.k != instance.k() {
        return Err(invalid(
            "k",
            format!(
                "parameters were built for k = {}, instance has k = {}",
                params.k,
                instance.k()
            ),
        ));
    }
    let n = instance.len();
    let k = instance.k();
    let start = instance.counters();
    let threads = params.threads;
    let (selected, gains, samples_per_set) = match params.strategy {
        Strategy::MultiRound => {
            let w = params.multi_round_w(n)?;
            let inst = &*instance;
            let (sel, gains) = greedy_rounds(
                n,
                k,
                |round, remaining, selected| {
                    let chosen: Vec<&SetHandle> = selected.iter().map(|&c| inst.handle(c)).collect();
                    let estimate = |&i: &usize| -> Result<f64> {
                        let h = inst.handle(i);
                        if h.is_empty() {
                            return Ok(0.0);
                        }
                        let mut rng = seeds.stream(((round as u64) << 32) | i as u64);
                        Ok(approximate_difference_with(&chosen, h, h.reported_size(), w, &mut rng)?.s)
                    };
                    if threads > 0 {
                        with_pool(threads, || remaining.par_iter().map(estimate).collect())
                    } else {
                        remaining.iter().map(estimate).collect()
                    }
                },
                |_, _, _| Ok(()),
            )?;
            (sel, gains, w)
        }
        Strategy::SingleRound | Strategy::SingleRoundSortOnSelect => {
            let sort = params.strategy == Strategy::SingleRoundSortOnSelect;
            if sort {
                if let Some(h) = instance
                    .handles()
                    .iter()
                    .find(|h| h.backend().kind() != BackendKind::Unsorted)
                {
                    return Err(CoverError::IncompatibleBackend(format!(
                        "sort-on-select needs unsorted arrays, set {} is `{}`",
                        h.set_id(),
                        h.backend().kind().name()
                    )));
                }
            }
            let g = params.single_round_g(n)?;
            let mut cache = SampleCache::init(instance, g, seeds, threads)?;
            let sizes: Vec<f64> = instance.handles().iter().map(SetHandle::reported_size).collect();
            let meter = instance.meter().clone();
            let cache_ref = std::cell::RefCell::new(&mut cache);
            let inst = std::cell::RefCell::new(&mut *instance);
            let (sel, gains) = greedy_rounds(
                n,
                k,
                |_, remaining, _| {
                    let cache = cache_ref.borrow();
                    meter.add_steps(remaining.len() as u64);
                    Ok(remaining
                        .iter()
                        .map(|&i| cache.white_count(i) as f64 / g as f64 * sizes[i])
                        .collect())
                },
                |round, t, remaining| {
                    let mut inst = inst.borrow_mut();
                    if sort {
                        inst.handle_mut(t).backend_mut().prepare_for_queries();
                    }
                    // the last selection is never followed by another estimate
                    if round + 1 < k {
                        cache_ref.borrow_mut().mark_all(remaining, inst.handle(t), threads);
                    }
                    Ok(())
                },
            )?;
            (sel, gains, g)
        }
    };
    let end = instance.counters();
    Ok(CoverageResult {
        z: gains.iter().sum(),
        selected,
        gains,
        counters: CostCounters {
            steps: end.steps - start.steps,
            random_draws: end.random_draws - start.random_draws,
            membership_queries: end.membership_queries - start.membership_queries,
        },
        samples_per_set,
    })
}

/// The greedy skeleton driven by exact gains `|A_i - U(L')|` on the
/// materialized sets: the classical greedy algorithm, charged nothing.
pub fn exact_gain_greedy(instance: &CoverageInstance) -> Result<(Vec<usize>, Vec<f64>)> {
    let sets = instance.materialize();
    let mut covered: HashSet<Element> = HashSet::new();
    let covered_ref = std::cell::RefCell::new(&mut covered);
    greedy_rounds(
        instance.len(),
        instance.k(),
        |_, remaining, _| {
            let covered = covered_ref.borrow();
            Ok(remaining
                .iter()
                .map(|&i| sets[i].iter().filter(|x| !covered.contains(x)).count() as f64)
                .collect())
        },
        |_, t, _| {
            covered_ref.borrow_mut().extend(sets[t].iter().copied());
            Ok(())
        },
    )
}
