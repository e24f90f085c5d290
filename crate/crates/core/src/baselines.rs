//! Exact references: classical greedy, brute-force optimum, minimum set
//! cover, and the equal-size padding transform.

use std::collections::{BTreeSet, HashMap};

use crate::error::{invalid, CoverError, Result};
use crate::oracle::Element;

/// Default limit on the number of subsets brute force may enumerate.
pub const DEFAULT_SUBSET_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSolution {
    pub indices: Vec<usize>,
    pub coverage: u64,
}

/// Sets re-encoded as bitsets over the dense universe of their elements.
struct Bitsets {
    words: usize,
    sets: Vec<Vec<u64>>,
}

impl Bitsets {
    fn new(sets: &[Vec<Element>]) -> Self {
        let mut ids: HashMap<Element, usize> = HashMap::new();
        for s in sets {
            for &x in s {
                let next = ids.len();
                ids.entry(x).or_insert(next);
            }
        }
        let words = ids.len().div_ceil(64).max(1);
        let sets = sets
            .iter()
            .map(|s| {
                let mut b = vec![0u64; words];
                for x in s {
                    let i = ids[x];
                    b[i / 64] |= 1 << (i % 64);
                }
                b
            })
            .collect();
        Bitsets { words, sets }
    }

    fn empty(&self) -> Vec<u64> {
        vec![0; self.words]
    }
}

fn popcount(b: &[u64]) -> u64 {
    b.iter().map(|w| w.count_ones() as u64).sum()
}

fn or_into(dst: &mut [u64], a: &[u64], b: &[u64]) {
    for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
        *d = x | y;
    }
}

/// `|∪_{i in indices} sets[i]|`.
pub fn coverage(sets: &[Vec<Element>], indices: &[usize]) -> u64 {
    indices
        .iter()
        .flat_map(|&i| sets[i].iter())
        .collect::<BTreeSet<_>>()
        .len() as u64
}

fn check_budget(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("k", "the budget must be positive"));
    }
    if k > n {
        return Err(CoverError::BudgetExceedsSets { k, n });
    }
    Ok(())
}

/// Classical greedy: repeatedly takes the set with the most uncovered
/// elements, the earliest index on ties.
pub fn exact_greedy(sets: &[Vec<Element>], k: usize) -> Result<ExactSolution> {
    check_budget(sets.len(), k)?;
    let bits = Bitsets::new(sets);
    let mut covered = bits.empty();
    let mut taken = vec![false; sets.len()];
    let mut indices = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, u64)> = None;
        for (i, b) in bits.sets.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let gain: u64 = b.iter().zip(&covered).map(|(x, c)| (x & !c).count_ones() as u64).sum();
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        let (i, _) = best.expect("k <= n leaves a set to take");
        taken[i] = true;
        indices.push(i);
        for (c, x) in covered.iter_mut().zip(&bits.sets[i]) {
            *c |= x;
        }
    }
    Ok(ExactSolution {
        indices,
        coverage: popcount(&covered),
    })
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        match c.checked_mul(n as u128 - k as u128 + i) {
            Some(p) => c = p / i,
            None => return u128::MAX,
        }
    }
    c
}

/// `C*(L, k)` by exhaustive search, with the default subset cap.
pub fn brute_force_optimum(sets: &[Vec<Element>], k: usize) -> Result<ExactSolution> {
    brute_force_optimum_capped(sets, k, DEFAULT_SUBSET_CAP)
}

/// Exhaustive maximum over every `k`-subset. Among optimal subsets the
/// lexicographically smallest index list wins. Refuses to enumerate more
/// than `cap` subsets.
pub fn brute_force_optimum_capped(sets: &[Vec<Element>], k: usize, cap: u128) -> Result<ExactSolution> {
    let n = sets.len();
    check_budget(n, k)?;
    let required = binomial(n as u64, k as u64);
    if required > cap {
        return Err(CoverError::CapExceeded { required, cap });
    }
    let bits = Bitsets::new(sets);
    // stack[d] holds the union of the first d chosen sets
    let mut stack = vec![bits.empty(); k + 1];
    let mut chosen = Vec::with_capacity(k);
    let mut best = ExactSolution {
        indices: Vec::new(),
        coverage: 0,
    };
    fn search(
        bits: &Bitsets,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        stack: &mut [Vec<u64>],
        best: &mut ExactSolution,
    ) {
        let d = chosen.len();
        if d == k {
            let c = popcount(&stack[d]);
            if best.indices.is_empty() || c > best.coverage {
                best.coverage = c;
                best.indices = chosen.clone();
            }
            return;
        }
        let n = bits.sets.len();
        for i in start..=n - (k - d) {
            let (lo, hi) = stack.split_at_mut(d + 1);
            or_into(&mut hi[0], &lo[d], &bits.sets[i]);
            chosen.push(i);
            search(bits, k, i + 1, chosen, stack, best);
            chosen.pop();
        }
    }
    search(&bits, k, 0, &mut chosen, &mut stack, &mut best);
    Ok(best)
}

/// Fewest sets whose union is the union of all of `sets`, by exhaustive
/// search over subsets of increasing size. Limited to 24 sets.
pub fn min_set_cover(sets: &[Vec<Element>]) -> Result<usize> {
    let n = sets.len();
    if n == 0 {
        return Ok(0);
    }
    if n > 24 {
        return Err(CoverError::CapExceeded {
            required: 1u128 << n,
            cap: 1 << 24,
        });
    }
    let bits = Bitsets::new(sets);
    let mut full = bits.empty();
    for b in &bits.sets {
        for (f, x) in full.iter_mut().zip(b) {
            *f |= x;
        }
    }
    let total = popcount(&full);
    for k in 1..=n {
        if brute_force_optimum_capped(sets, k, u128::MAX)?.coverage == total {
            return Ok(k);
        }
    }
    unreachable!("all sets together cover the union")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadMode {
    /// Prepend a block `A_0` of fresh elements and top every set up from it.
    SetCover,
    /// Top every set up with elements of the first (largest) set.
    MaxCover,
}

/// Makes all sets the same size.
///
/// In [`PadMode::SetCover`] the output is `[A_0, A_1', ..., A_n']` where
/// `A_0` holds `t = max |A_i|` fresh elements above every input element
/// and `A_i'` adds the first `t - |A_i|` of them to `A_i`. The original has
/// a `k`-cover iff the output has a `(k + 1)`-cover.
///
/// In [`PadMode::MaxCover`] the first set must be a largest one;
/// `A_j* = A_j ∪` the smallest `|A_1| - |A_j|` elements of `A_1 - A_j`.
pub fn equal_size_pad(sets: &[Vec<Element>], mode: PadMode) -> Result<Vec<Vec<Element>>> {
    if sets.is_empty() {
        return Err(invalid("sets", "nothing to pad"));
    }
    if let Some(i) = sets.iter().position(Vec::is_empty) {
        return Err(invalid("sets", format!("set {i} is empty")));
    }
    let sorted: Vec<Vec<Element>> = sets
        .iter()
        .map(|s| {
            let mut v = s.clone();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let t = sorted.iter().map(Vec::len).max().unwrap_or(0);
    match mode {
        PadMode::SetCover => {
            let top = sorted.iter().filter_map(|s| s.last()).max().map_or(0, |e| e.0);
            let first = top
                .checked_add(1)
                .filter(|f| f.checked_add(t as u64 - 1).is_some())
                .ok_or_else(|| CoverError::Overflow("no room for fresh padding elements".into()))?;
            let a0: Vec<Element> = (0..t as u64).map(|i| Element(first + i)).collect();
            let mut out = Vec::with_capacity(sorted.len() + 1);
            out.push(a0.clone());
            for s in sorted {
                let mut p = s.clone();
                p.extend_from_slice(&a0[..t - s.len()]);
                out.push(p);
            }
            Ok(out)
        }
        PadMode::MaxCover => {
            if sorted[0].len() != t {
                return Err(invalid(
                    "sets",
                    format!("the first set has {} elements but the largest has {t}", sorted[0].len()),
                ));
            }
            let a1 = &sorted[0];
            Ok(sorted
                .iter()
                .map(|s| {
                    let mut p = s.clone();
                    let extra = a1.iter().filter(|x| s.binary_search(x).is_err()).take(t - s.len());
                    p.extend(extra.copied());
                    p.sort_unstable();
                    p
                })
                .collect())
        }
    }
}
