//! Monte Carlo estimation of `|B - (A_1 ∪ ... ∪ A_u)|` and the sample-size
//! arithmetic behind it.

use crate::error::{invalid, Result};
use crate::oracle::{SampleRng, SetHandle};

/// `mu(x) = exp(-x^2 / 2)`, the Hoeffding tail base.
pub fn mu(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} is outside (0, 1)")))
    }
}

/// Whether `w` samples reach `mu(epsilon / 3)^w <= exp(-ln_target)`, i.e.
/// `w * epsilon^2 / 18 >= ln_target`.
fn reaches(w: u64, epsilon: f64, ln_target: f64) -> bool {
    w as f64 * epsilon * epsilon / 18.0 >= ln_target
}

/// Least `w >= 1` with `w * epsilon^2 / 18 >= ln_target`. The closed form is
/// nudged by whole steps so rounding in the division cannot leave it off by
/// one.
fn least_count(epsilon: f64, ln_target: f64) -> Result<u64> {
    let guess = (18.0 * ln_target / (epsilon * epsilon)).ceil();
    if !guess.is_finite() || guess >= u64::MAX as f64 / 2.0 {
        return Err(crate::error::CoverError::Overflow(format!(
            "sample count {guess} does not fit in 64 bits"
        )));
    }
    let mut w = (guess as u64).max(1);
    while w > 1 && reaches(w - 1, epsilon, ln_target) {
        w -= 1;
    }
    while !reaches(w, epsilon, ln_target) {
        w += 1;
    }
    Ok(w)
}

/// A validated `(epsilon, gamma)` pair and its sample count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleBudget {
    pub epsilon: f64,
    pub gamma: f64,
    pub w: u64,
}

impl SampleBudget {
    pub fn new(epsilon: f64, gamma: f64) -> Result<Self> {
        Ok(SampleBudget {
            epsilon,
            gamma,
            w: sample_count(epsilon, gamma)?,
        })
    }
}

/// Least `w` with `mu(epsilon / 3)^w <= gamma / 4`, which is
/// `ceil(18 ln(4 / gamma) / epsilon^2)`.
pub fn sample_count(epsilon: f64, gamma: f64) -> Result<u64> {
    check_unit("epsilon", epsilon)?;
    check_unit("gamma", gamma)?;
    least_count(epsilon, (4.0 / gamma).ln())
}

/// `h*(k, n)`, the number of subsets of at most `k` out of `n` items.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsetCount {
    /// Exact count, or `i64::MAX` when saturated.
    pub value: u64,
    pub saturated: bool,
    /// Natural logarithm of the true (unsaturated) count.
    pub ln: f64,
}

pub const SUBSET_COUNT_CAP: u64 = i64::MAX as u64;

fn check_budget(k: u64, n: u64) -> Result<()> {
    if k == 0 || k > n {
        return Err(invalid("k", format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(())
}

pub fn subset_count_h_star(k: u64, n: u64) -> Result<SubsetCount> {
    check_budget(k, n)?;
    // exact pass in u128 until something no longer fits under the cap
    let mut total: u128 = 1;
    let mut binom: u128 = 1;
    let mut saturated = false;
    for i in 1..=k as u128 {
        // C(n, i) = C(n, i - 1) * (n - i + 1) / i stays integral
        match binom.checked_mul(n as u128 - i + 1) {
            Some(p) => binom = p / i,
            None => {
                saturated = true;
                break;
            }
        }
        total += binom;
        if total > SUBSET_COUNT_CAP as u128 {
            saturated = true;
            break;
        }
    }
    if !saturated {
        return Ok(SubsetCount {
            value: total as u64,
            saturated: false,
            ln: (total as f64).ln(),
        });
    }
    // log-sum-exp over ln C(n, i)
    let mut ln_binoms = Vec::with_capacity(k as usize + 1);
    let mut ln_c = 0.0f64;
    ln_binoms.push(0.0);
    for i in 1..=k {
        ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        ln_binoms.push(ln_c);
    }
    let top = ln_binoms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln = top + ln_binoms.iter().map(|&l| (l - top).exp()).sum::<f64>().ln();
    Ok(SubsetCount {
        value: SUBSET_COUNT_CAP,
        saturated: true,
        ln,
    })
}

/// `g(epsilon, gamma, k, n) = sample_count(epsilon, gamma / (n h*(k, n)))`,
/// evaluated in log space so huge `h*` cannot overflow.
pub fn shared_sample_budget_g(epsilon: f64, gamma: f64, k: u64, n: u64) -> Result<u64> {
    check_unit("epsilon", epsilon)?;
    check_unit("gamma", gamma)?;
    let h = subset_count_h_star(k, n)?;
    least_count(epsilon, (4.0 / gamma).ln() + (n as f64).ln() + h.ln)
}

/// Runs the randomized membership test: draws `w` samples from `b` and
/// counts those outside every set of `selected`. Membership is checked set
/// by set in order and stops at the first set containing the sample.
pub fn random_test(selected: &[&SetHandle], b: &SetHandle, w: u64, rng: &mut SampleRng) -> Result<u64> {
    if w == 0 {
        return Err(invalid("w", "at least one sample is needed"));
    }
    let mut xs = Vec::with_capacity(w as usize);
    b.sample_into(rng, w, &mut xs)?;
    // Each sample is tested against the selected sets in order until one
    // contains it, so later sets only see the survivors.
    let mut t = xs.len();
    for a in selected {
        if t == 0 {
            break;
        }
        a.meter().record(0, t as u64);
        t = a.backend().retain_non_members(&mut xs[..t]);
    }
    Ok(t as u64)
}

/// Outcome of [`approximate_difference`]: `t` of `w` samples fell outside
/// the union and `s = (t / w) s2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffEstimate {
    pub t: u64,
    pub w: u64,
    pub s: f64,
}

/// Estimates `|B - (A_1 ∪ ... ∪ A_u)|` from `sample_count(epsilon, gamma)`
/// samples of `b`, scaled by its reported size `s2`.
pub fn approximate_difference(
    selected: &[&SetHandle],
    b: &SetHandle,
    s2: f64,
    epsilon: f64,
    gamma: f64,
    rng: &mut SampleRng,
) -> Result<DiffEstimate> {
    let w = sample_count(epsilon, gamma)?;
    approximate_difference_with(selected, b, s2, w, rng)
}

/// [`approximate_difference`] with a precomputed sample count.
pub fn approximate_difference_with(
    selected: &[&SetHandle],
    b: &SetHandle,
    s2: f64,
    w: u64,
    rng: &mut SampleRng,
) -> Result<DiffEstimate> {
    b.meter().add_steps(1);
    let t = random_test(selected, b, w, rng)?;
    Ok(DiffEstimate {
        t,
        w,
        s: t as f64 / w as f64 * s2,
    })
}
