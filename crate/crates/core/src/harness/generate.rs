//! Deterministic instance generators.

use rand::seq::index::sample;
use rand::Rng;

use super::instance_file::{InstanceFile, SetSpec};
use crate::error::{invalid, CoverError, Result};
use crate::oracle::{BiasProfile, SeedSequence};

fn check_budget(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n", "need at least one set"));
    }
    if k == 0 {
        return Err(invalid("k", "the budget must be positive"));
    }
    if k > n {
        return Err(CoverError::BudgetExceedsSets { k, n });
    }
    Ok(())
}

fn file(k: usize, seed: u64, sets: Vec<SetSpec>) -> InstanceFile {
    InstanceFile {
        k,
        bias: BiasProfile::zero(),
        seed,
        sets,
    }
}

/// `n` sets, each of a size uniform in `1..=max_size`, drawn without
/// replacement from `1..=universe`.
pub fn random_instance(n: usize, max_size: usize, universe: u64, k: usize, seed: u64) -> Result<InstanceFile> {
    check_budget(n, k)?;
    if max_size == 0 {
        return Err(invalid("m", "sets need at least one element"));
    }
    if (universe as u128) < max_size as u128 || universe > usize::MAX as u64 {
        return Err(invalid(
            "universe",
            format!("{universe} cannot hold sets of {max_size} elements"),
        ));
    }
    let mut rng = SeedSequence::new(seed).stream(0);
    let sets = (0..n)
        .map(|_| {
            let size = rng.gen_range(1..=max_size);
            let mut v: Vec<u64> = sample(&mut rng, universe as usize, size)
                .into_iter()
                .map(|i| i as u64 + 1)
                .collect();
            v.sort_unstable();
            SetSpec::Explicit(v)
        })
        .collect();
    Ok(file(k, seed, sets))
}

/// `n` pairwise disjoint sets of `m` consecutive elements each.
pub fn disjoint_instance(n: usize, m: u64, k: usize, seed: u64) -> Result<InstanceFile> {
    check_budget(n, k)?;
    if m == 0 {
        return Err(invalid("m", "sets need at least one element"));
    }
    (n as u64)
        .checked_mul(m)
        .ok_or_else(|| CoverError::Overflow("n * m exceeds the element range".into()))?;
    let sets = (0..n as u64)
        .map(|i| SetSpec::Explicit((i * m + 1..=(i + 1) * m).collect()))
        .collect();
    Ok(file(k, seed, sets))
}

/// `n` windows of `m` consecutive elements, each overlapping the next in
/// `m / 2` elements.
pub fn overlap_chain_instance(n: usize, m: u64, k: usize, seed: u64) -> Result<InstanceFile> {
    check_budget(n, k)?;
    if m < 2 {
        return Err(invalid("m", "chains need sets of at least two elements"));
    }
    let step = m - m / 2;
    (n as u64)
        .checked_mul(step)
        .and_then(|x| x.checked_add(m))
        .ok_or_else(|| CoverError::Overflow("chain exceeds the element range".into()))?;
    let sets = (0..n as u64)
        .map(|i| SetSpec::Explicit((i * step + 1..=i * step + m).collect()))
        .collect();
    Ok(file(k, seed, sets))
}

/// `n` random integer boxes of dimension `dim` inside `[0, span)^dim`.
pub fn rectangle_instance(n: usize, dim: usize, span: i64, k: usize, seed: u64) -> Result<InstanceFile> {
    check_budget(n, k)?;
    if dim == 0 || dim > 64 {
        return Err(invalid("dim", format!("{dim} is outside 1..=64")));
    }
    if span < 1 {
        return Err(invalid("span", "must be positive"));
    }
    let mut rng = SeedSequence::new(seed).stream(0);
    let sets = (0..n)
        .map(|_| {
            let (mut lo, mut hi) = (Vec::new(), Vec::new());
            for _ in 0..dim {
                let a = rng.gen_range(0..span);
                let b = rng.gen_range(0..span);
                lo.push(a.min(b));
                hi.push(a.max(b));
            }
            SetSpec::Rectangle { lo, hi }
        })
        .collect();
    Ok(file(k, seed, sets))
}

/// The pair of lists that no low-query algorithm can tell apart.
#[derive(Clone, Debug, PartialEq)]
pub struct TwinPair {
    /// Every set is `{1, ..., m/d}`.
    pub l: InstanceFile,
    /// The sets at `block_indices` are the `d` blocks
    /// `{b m/d + 1, ..., (b + 1) m/d}`; the rest equal `{1, ..., m/d}`.
    pub l_prime: InstanceFile,
    pub d: usize,
    pub m: u64,
    pub block_indices: Vec<usize>,
}

pub fn twin_instances(n: usize, m: u64, d: usize, k: usize, seed: u64) -> Result<TwinPair> {
    check_budget(n, k)?;
    if d == 0 || d > n {
        return Err(invalid("d", format!("need 1 <= d <= n, got d = {d}, n = {n}")));
    }
    if m == 0 || !m.is_multiple_of(d as u64) {
        return Err(invalid("m", format!("d = {d} must divide m = {m}")));
    }
    let block = m / d as u64;
    let base = SetSpec::Explicit((1..=block).collect());
    let mut rng = SeedSequence::new(seed).stream(0);
    let mut block_indices = sample(&mut rng, n, d).into_vec();
    block_indices.sort_unstable();
    let mut sets = vec![base.clone(); n];
    for (b, &i) in block_indices.iter().enumerate() {
        let b = b as u64;
        sets[i] = SetSpec::Explicit((b * block + 1..=(b + 1) * block).collect());
    }
    Ok(TwinPair {
        l: file(k, seed, vec![base; n]),
        l_prime: file(k, seed, sets),
        d,
        m,
        block_indices,
    })
}
