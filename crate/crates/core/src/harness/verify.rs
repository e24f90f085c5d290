//! Statistical and exact verification suites.
//!
//! Each measurement function returns raw counts so callers can apply their
//! own tolerances; [`run_suite`] bundles them with default tolerances for
//! the command-line `verify` subcommand.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::generate::{random_instance, twin_instances};
use super::instance_file::InstanceFile;
use crate::backends::{CallTally, CountedBTree, CountingBackend, LatticeRectangle, SkewedSampler, SortedArraySet};
use crate::baselines::{brute_force_optimum, coverage, equal_size_pad, exact_greedy, min_set_cover, PadMode};
use crate::error::{invalid, CoverError, Result};
use crate::estimation::{approximate_difference, sample_count, shared_sample_budget_g};
use crate::greedy::{approximate_maximum_cover, GreedyParams, Strategy};
use crate::oracle::{
    make_handle, BackendKind, BiasProfile, CoverageInstance, Element, Meter, SeedSequence, SetBackend,
};

/// `gamma + 3 sqrt(gamma (1 - gamma) / trials)`: an allowed failure
/// fraction three binomial standard deviations above `gamma`.
pub fn binomial_slack(gamma: f64, trials: usize) -> f64 {
    gamma + 3.0 * (gamma * (1.0 - gamma) / trials as f64).sqrt()
}

/// Pearson statistic of `counts` against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

/// The `p`-quantile of the chi-square distribution with `dof` degrees of
/// freedom.
pub fn chi_square_quantile(dof: u64, p: f64) -> Result<f64> {
    let d = ChiSquared::new(dof as f64).map_err(|e| invalid("dof", e.to_string()))?;
    Ok(d.inverse_cdf(p))
}

const BACKEND_CYCLE: [BackendKind; 4] = [
    BackendKind::Sorted,
    BackendKind::Unsorted,
    BackendKind::BTree,
    BackendKind::Hash,
];

#[derive(Clone, Debug)]
pub struct RatioConfig {
    pub instances: usize,
    pub n: usize,
    pub max_size: usize,
    pub universe: u64,
    pub k: usize,
    pub xi: f64,
    pub gamma: f64,
    pub strategy: Strategy,
    pub seed: u64,
}

impl Default for RatioConfig {
    fn default() -> Self {
        RatioConfig {
            instances: 200,
            n: 15,
            max_size: 40,
            universe: 100,
            k: 3,
            xi: 0.2,
            gamma: 0.1,
            strategy: Strategy::SingleRound,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioTrial {
    pub backend: BackendKind,
    /// `|∪ H|` of the randomized solver.
    pub coverage: u64,
    pub z: f64,
    /// `C*(L, k)`.
    pub optimum: u64,
    /// Coverage of the classical greedy on the same sets.
    pub greedy_coverage: u64,
}

impl RatioTrial {
    pub fn below_ratio(&self, ratio: f64) -> bool {
        (self.coverage as f64) < ratio * self.optimum as f64
    }

    pub fn outside_sandwich(&self, eps: f64) -> bool {
        let u = self.coverage as f64;
        self.z < (1.0 - eps) * u || self.z > (1.0 + eps) * u
    }
}

/// Solves `cfg.instances` seeded random instances, cycling through the
/// explicit-set backends, and evaluates each against brute force.
pub fn ratio_trials(cfg: &RatioConfig) -> Result<Vec<RatioTrial>> {
    let params = GreedyParams::with_xi(cfg.xi, cfg.gamma, cfg.k, cfg.strategy)?;
    let root = SeedSequence::new(cfg.seed);
    (0..cfg.instances)
        .map(|t| {
            let seeds = root.derive(t as u64);
            let file = random_instance(cfg.n, cfg.max_size, cfg.universe, cfg.k, seeds.seed())?;
            let backend = BACKEND_CYCLE[t % BACKEND_CYCLE.len()];
            let mut instance = file.build(backend)?;
            let sets = instance.materialize();
            let optimum = brute_force_optimum(&sets, cfg.k)?.coverage;
            let greedy_coverage = exact_greedy(&sets, cfg.k)?.coverage;
            let r = approximate_maximum_cover(&mut instance, &params, seeds.derive(1))?;
            Ok(RatioTrial {
                backend,
                coverage: coverage(&sets, &r.selected),
                z: r.z,
                optimum,
                greedy_coverage,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct EstimatorConfig {
    /// `|B - A| / |B|` for `B = {1, ..., 100}`.
    pub uncovered: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub bias: BiasProfile,
    pub trials: usize,
    pub seed: u64,
}

/// Counts trials whose difference estimate leaves the envelope
/// `lower |B - A| - eps |B| <= s <= upper |B - A| + eps |B|`.
///
/// `B = {1, ..., 100}`; `A` is its first `(1 - uncovered) * 100` members.
/// Sampling bias comes from a skewed sampler on `B`, and `B`'s reported
/// size is redrawn within the `delta` bounds every trial.
pub fn estimator_failures(cfg: &EstimatorConfig) -> Result<usize> {
    const B: u64 = 100;
    if !(0.0..=1.0).contains(&cfg.uncovered) {
        return Err(invalid("uncovered", "must lie in [0, 1]"));
    }
    let covered = ((1.0 - cfg.uncovered) * B as f64).round() as u64;
    let diff = (B - covered) as f64;
    let lower = cfg.bias.lower_factor() * diff - cfg.epsilon * B as f64;
    let upper = cfg.bias.upper_factor() * diff + cfg.epsilon * B as f64;
    let meter = Meter::new();
    let mut rng = SeedSequence::new(cfg.seed).stream(0);
    let a = (covered > 0).then(|| {
        make_handle(
            1,
            Box::new(SortedArraySet::from_values(1..=covered)),
            &BiasProfile::zero(),
            meter.clone(),
            &mut rng,
        )
    });
    let selected: Vec<_> = a.iter().collect();
    let mut failures = 0;
    for _ in 0..cfg.trials {
        let plain: Box<dyn SetBackend> = Box::new(SortedArraySet::from_values(1..=B));
        let backend: Box<dyn SetBackend> = if cfg.bias.has_sampling_bias() {
            Box::new(SkewedSampler::new(plain, cfg.bias.alpha_l, cfg.bias.alpha_r)?)
        } else {
            plain
        };
        let b = make_handle(0, backend, &cfg.bias, meter.clone(), &mut rng);
        let est = approximate_difference(&selected, &b, b.reported_size(), cfg.epsilon, cfg.gamma, &mut rng)?;
        if est.s < lower || est.s > upper {
            failures += 1;
        }
    }
    Ok(failures)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformityOutcome {
    pub statistic: f64,
    pub threshold: f64,
    /// Whether the exact draw distribution is uniform.
    pub exact_uniform: bool,
}

impl UniformityOutcome {
    pub fn passed(&self) -> bool {
        self.exact_uniform && self.statistic < self.threshold
    }
}

/// Draws from a counted B-tree over `{1, ..., m}` and tests the counts
/// against uniform at the 99.9% quantile.
pub fn btree_uniformity(m: u64, draws: u64, seed: u64) -> Result<UniformityOutcome> {
    let tree = CountedBTree::from_values(1..=m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; m as usize];
    for _ in 0..draws {
        counts[(tree.rand(&mut rng)?.0 - 1) as usize] += 1;
    }
    let exact_uniform = tree
        .exact_draw_distribution()
        .iter()
        .all(|&(_, num, den)| num * m as u128 == den);
    Ok(UniformityOutcome {
        statistic: chi_square_uniform(&counts),
        threshold: chi_square_quantile(m - 1, 0.999)?,
        exact_uniform,
    })
}

/// Uniformity of the lattice sampler on `[lo, hi]`, over its points.
pub fn rectangle_uniformity(lo: Vec<i64>, hi: Vec<i64>, draws: u64, seed: u64) -> Result<UniformityOutcome> {
    let r = LatticeRectangle::new(lo, hi)?;
    let m = r.cardinality();
    let index: std::collections::HashMap<Element, usize> = (0..m)
        .filter_map(|i| r.element_at(i))
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; m as usize];
    for _ in 0..draws {
        counts[index[&r.random_element(&mut rng)?]] += 1;
    }
    Ok(UniformityOutcome {
        statistic: chi_square_uniform(&counts),
        threshold: chi_square_quantile(m - 1, 0.999)?,
        exact_uniform: true,
    })
}

/// Counter readings for one instance under both strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterOutcome {
    pub n: u64,
    pub k: u64,
    /// `g(epsilon', gamma, k, n)`.
    pub g: u64,
    /// `sample_count(epsilon', gamma / (4 k n))`.
    pub w: u64,
    pub single_draws: u64,
    pub single_queries: u64,
    pub multi_draws: u64,
    pub multi_queries: u64,
    /// Whether an independent call tally matched the meters in both runs.
    pub tally_matches: bool,
}

/// Runs both strategies on `file` with every backend wrapped in a call
/// counter and reports the meters.
pub fn counter_readings(file: &InstanceFile, xi: f64, gamma: f64, seed: u64) -> Result<CounterOutcome> {
    let n = file.n();
    let k = file.k;
    let mut tally_matches = true;
    let mut run = |strategy| -> Result<(u64, u64, u64)> {
        let tally = Arc::new(CallTally::default());
        let backends = file
            .backends(BackendKind::Sorted)?
            .into_iter()
            .map(|b| Box::new(CountingBackend::new(b, tally.clone())) as Box<dyn SetBackend>)
            .collect();
        let mut instance = CoverageInstance::from_backends(backends, k, file.bias, &mut ChaCha8Rng::seed_from_u64(0))?;
        let p = GreedyParams::with_xi(xi, gamma, k, strategy)?;
        let r = approximate_maximum_cover(&mut instance, &p, SeedSequence::new(seed))?;
        tally_matches &= r.counters.random_draws == tally.draws() && r.counters.membership_queries == tally.queries();
        Ok((
            r.counters.random_draws,
            r.counters.membership_queries,
            r.samples_per_set,
        ))
    };
    let (single_draws, single_queries, g) = run(Strategy::SingleRound)?;
    let (multi_draws, multi_queries, w) = run(Strategy::MultiRound)?;
    Ok(CounterOutcome {
        n: n as u64,
        k: k as u64,
        g,
        w,
        single_draws,
        single_queries,
        multi_draws,
        multi_queries,
        tally_matches,
    })
}

/// Runs single-round and sort-on-select on `instances` random instances
/// held in unsorted arrays and returns how many disagree on `H` or `z`.
pub fn strategy_mismatches(instances: usize, xi: f64, gamma: f64, seed: u64) -> Result<usize> {
    let root = SeedSequence::new(seed);
    let mut mismatches = 0;
    for t in 0..instances {
        let seeds = root.derive(t as u64);
        let file = random_instance(10, 30, 80, 3, seeds.seed())?;
        let single = GreedyParams::with_xi(xi, gamma, 3, Strategy::SingleRound)?;
        let sort = GreedyParams {
            strategy: Strategy::SingleRoundSortOnSelect,
            ..single
        };
        let mut a = file.build(BackendKind::Unsorted)?;
        let mut b = file.build(BackendKind::Unsorted)?;
        let ra = approximate_maximum_cover(&mut a, &single, seeds.derive(1))?;
        let rb = approximate_maximum_cover(&mut b, &sort, seeds.derive(1))?;
        if ra.selected != rb.selected || ra.z.to_bits() != rb.z.to_bits() {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}

/// Pads `instances` random set systems (`n <= 8`, sets of at most 8 from a
/// universe of 12) and counts those where the minimum cover does not grow
/// by exactly one.
pub fn reduction_mismatches(instances: usize, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for _ in 0..instances {
        let n = rng.gen_range(1..=8);
        let sets: Vec<Vec<Element>> = (0..n)
            .map(|_| {
                let size = rng.gen_range(1..=8);
                let mut s: Vec<Element> = (0..size).map(|_| Element(rng.gen_range(1..=12))).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let padded = equal_size_pad(&sets, PadMode::SetCover)?;
        let t = sets.iter().map(Vec::len).max().unwrap_or(0);
        if padded.iter().any(|s| s.len() != t) || min_set_cover(&sets)? + 1 != min_set_cover(&padded)? {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwinOutcome {
    pub optimum_l: u64,
    pub optimum_l_prime: u64,
    pub trials: usize,
    /// Solver runs on `L'` that covered all `m` elements.
    pub full_coverage: usize,
}

/// Checks the twin optima by brute force and runs the single-round solver
/// on `L'` once per trial, each trial with a freshly generated pair.
#[allow(clippy::too_many_arguments)]
pub fn twin_outcome(
    n: usize,
    m: u64,
    d: usize,
    k: usize,
    xi: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<TwinOutcome> {
    let root = SeedSequence::new(seed);
    let params = GreedyParams::with_xi(xi, gamma, k, Strategy::SingleRound)?;
    let mut optimum_l = None;
    let mut optimum_l_prime = None;
    let mut full_coverage = 0;
    for t in 0..trials.max(1) {
        let seeds = root.derive(t as u64);
        let pair = twin_instances(n, m, d, k, seeds.seed())?;
        let l = pair.l.build(BackendKind::Sorted)?.materialize();
        let mut inst = pair.l_prime.build(BackendKind::Sorted)?;
        let lp = inst.materialize();
        let (ol, olp) = (
            brute_force_optimum(&l, k)?.coverage,
            brute_force_optimum(&lp, k)?.coverage,
        );
        // the optima must not depend on where the blocks landed
        if optimum_l.is_some_and(|o| o != ol) || optimum_l_prime.is_some_and(|o| o != olp) {
            return Err(CoverError::InvalidParameter {
                name: "twin",
                reason: "optimum varies between generated pairs".into(),
            });
        }
        optimum_l = Some(ol);
        optimum_l_prime = Some(olp);
        if t < trials {
            let r = approximate_maximum_cover(&mut inst, &params, seeds.derive(1))?;
            if coverage(&lp, &r.selected) == m {
                full_coverage += 1;
            }
        }
    }
    Ok(TwinOutcome {
        optimum_l: optimum_l.unwrap_or(0),
        optimum_l_prime: optimum_l_prime.unwrap_or(0),
        trials,
        full_coverage,
    })
}

/// Counts instances where the classical greedy falls below
/// `(1 - (1 - 1/k)^k) C*`.
pub fn greedy_floor_violations(trials: &[RatioTrial], k: usize) -> usize {
    let floor = 1.0 - (1.0 - 1.0 / k as f64).powi(k as i32);
    trials
        .iter()
        .filter(|t| (t.greedy_coverage as f64) < floor * t.optimum as f64)
        .count()
}

/// Relative-error check of the sample-size formulas over `pairs` random
/// `(epsilon, gamma)`: returns the number of pairs where `sample_count` is
/// not the least `w` with `mu(epsilon / 3)^w <= gamma / 4`, and the number
/// of `(epsilon, gamma, k, n)` tuples where `g` differs from the direct
/// evaluation.
pub fn formula_mismatches(pairs: usize, seed: u64) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count_bad = 0;
    let mut g_bad = 0;
    for _ in 0..pairs {
        let eps: f64 = rng.gen_range(0.01..0.99);
        let gamma: f64 = rng.gen_range(0.001..0.99);
        let w = sample_count(eps, gamma)?;
        let holds = |w: u64| w as f64 * eps * eps / 18.0 >= (4.0 / gamma).ln();
        if !holds(w) || (w > 1 && holds(w - 1)) {
            count_bad += 1;
        }
        let n = rng.gen_range(1..=40u64);
        let k = rng.gen_range(1..=n);
        let h: f64 = (0..=k).map(|i| crate::baselines::binomial(n, i) as f64).sum();
        if sample_count(eps, gamma / (n as f64 * h))? != shared_sample_budget_g(eps, gamma, k, n)? {
            g_bad += 1;
        }
    }
    Ok((count_bad, g_bad))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Ratio,
    Sandwich,
    Counters,
    Uniformity,
    Reduction,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Ratio,
        Suite::Sandwich,
        Suite::Counters,
        Suite::Uniformity,
        Suite::Reduction,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Ratio => "ratio",
            Suite::Sandwich => "sandwich",
            Suite::Counters => "counters",
            Suite::Uniformity => "uniformity",
            Suite::Reduction => "reduction",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = CoverError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| invalid("suite", format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: String,
    pub tolerance: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: {} (tolerance {})",
            self.name, self.measured, self.tolerance
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides the suite's default trial count.
    pub trials: Option<usize>,
    pub xi: f64,
    pub gamma: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0x5eed,
            trials: None,
            xi: 0.2,
            gamma: 0.1,
        }
    }
}

fn check(name: impl Into<String>, measured: impl Into<String>, tolerance: impl Into<String>, passed: bool) -> Check {
    Check {
        name: name.into(),
        measured: measured.into(),
        tolerance: tolerance.into(),
        passed,
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    match suite {
        Suite::Ratio | Suite::Sandwich => {
            let cfg = RatioConfig {
                instances: opts.trials.unwrap_or(200),
                xi: opts.xi,
                gamma: opts.gamma,
                seed: opts.seed,
                ..RatioConfig::default()
            };
            let trials = ratio_trials(&cfg)?;
            let slack = binomial_slack(cfg.gamma, trials.len());
            let total = trials.len() as f64;
            if suite == Suite::Ratio {
                let ratio = 1.0 - (-1f64).exp();
                let bad = trials.iter().filter(|t| t.below_ratio(ratio)).count();
                checks.push(check(
                    "coverage below (1 - 1/e) C*",
                    format!("{bad}/{} = {:.4}", trials.len(), bad as f64 / total),
                    format!("<= {slack:.4}"),
                    bad as f64 / total <= slack,
                ));
                let floor = greedy_floor_violations(&trials, cfg.k);
                checks.push(check(
                    "classical greedy below its floor",
                    floor.to_string(),
                    "0",
                    floor == 0,
                ));
            } else {
                let bad = trials.iter().filter(|t| t.outside_sandwich(cfg.xi)).count();
                checks.push(check(
                    "z outside (1 +- xi) |union H|",
                    format!("{bad}/{} = {:.4}", trials.len(), bad as f64 / total),
                    format!("<= {slack:.4}"),
                    bad as f64 / total <= slack,
                ));
            }
        }
        Suite::Counters => {
            let file = random_instance(10, 30, 60, 3, opts.seed)?;
            let c = counter_readings(&file, 0.5, opts.gamma, opts.seed)?;
            let per_round: u64 = (1..=c.k).map(|j| c.n - j + 1).sum();
            checks.push(check(
                "single-round draws = n g",
                format!("{} vs {}", c.single_draws, c.n * c.g),
                "exact",
                c.single_draws == c.n * c.g,
            ));
            checks.push(check(
                "multi-round draws = w sum_j (n - j + 1)",
                format!("{} vs {}", c.multi_draws, c.w * per_round),
                "exact",
                c.multi_draws == c.w * per_round,
            ));
            checks.push(check(
                "multi-round draws <= k n w",
                format!("{} vs {}", c.multi_draws, c.k * c.n * c.w),
                "bound",
                c.multi_draws <= c.k * c.n * c.w,
            ));
            checks.push(check(
                "queries <= k n w",
                format!(
                    "single {} / {}, multi {} / {}",
                    c.single_queries,
                    c.k * c.n * c.g,
                    c.multi_queries,
                    c.k * c.n * c.w
                ),
                "bound",
                c.single_queries <= c.k * c.n * c.g && c.multi_queries <= c.k * c.n * c.w,
            ));
            checks.push(check(
                "meters match call tally",
                c.tally_matches.to_string(),
                "exact",
                c.tally_matches,
            ));
            let (count_bad, g_bad) = formula_mismatches(opts.trials.unwrap_or(1000), opts.seed)?;
            checks.push(check(
                "sample_count minimal",
                format!("{count_bad} mismatches"),
                "0",
                count_bad == 0,
            ));
            checks.push(check(
                "g log-space = direct",
                format!("{g_bad} mismatches"),
                "0",
                g_bad == 0,
            ));
        }
        Suite::Uniformity => {
            let draws = opts.trials.map_or(64_000, |t| t as u64);
            let b = btree_uniformity(64, draws, opts.seed)?;
            checks.push(check(
                "b-tree chi-square, 63 dof",
                format!("{:.2}, exact distribution uniform: {}", b.statistic, b.exact_uniform),
                format!("< {:.2}", b.threshold),
                b.passed(),
            ));
            let r = rectangle_uniformity(vec![0, 0], vec![1, 1], 4000, opts.seed)?;
            checks.push(check(
                "rectangle [0,1]^2 chi-square, 3 dof",
                format!("{:.2}", r.statistic),
                format!("< {:.2}", r.threshold),
                r.passed(),
            ));
        }
        Suite::Reduction => {
            let bad = reduction_mismatches(opts.trials.unwrap_or(100), opts.seed)?;
            checks.push(check(
                "padded cover = original + 1",
                format!("{bad} mismatches"),
                "0",
                bad == 0,
            ));
        }
    }
    Ok(SuiteReport { suite, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_quantiles() {
        assert!((chi_square_quantile(63, 0.999).unwrap() - 103.442).abs() < 0.01);
        assert!((chi_square_quantile(3, 0.999).unwrap() - 16.266).abs() < 0.01);
    }

    #[test]
    fn chi_square_of_exact_uniform_counts_is_zero() {
        assert_eq!(chi_square_uniform(&[5, 5, 5, 5]), 0.0);
        assert_eq!(chi_square_uniform(&[6, 4]), 0.4);
    }

    #[test]
    fn slack_value() {
        assert!((binomial_slack(0.1, 200) - 0.16364).abs() < 1e-4);
    }

    #[test]
    fn small_suites_pass() {
        let opts = VerifyOptions {
            trials: Some(20),
            xi: 0.5,
            ..VerifyOptions::default()
        };
        for suite in [Suite::Reduction, Suite::Uniformity] {
            let r = run_suite(
                suite,
                &VerifyOptions {
                    trials: None,
                    ..opts.clone()
                },
            )
            .unwrap();
            assert!(r.passed(), "{:?}", r.checks);
        }
        let r = run_suite(Suite::Ratio, &opts).unwrap();
        assert_eq!(r.checks.len(), 2);
    }

    #[test]
    fn zero_uncovered_fraction_never_fails() {
        let cfg = EstimatorConfig {
            uncovered: 0.0,
            epsilon: 0.3,
            gamma: 0.1,
            bias: BiasProfile::zero(),
            trials: 20,
            seed: 1,
        };
        assert_eq!(estimator_failures(&cfg).unwrap(), 0);
    }
}
