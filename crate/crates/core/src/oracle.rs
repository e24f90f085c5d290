//! The black-box set model shared by every backend and algorithm.
//!
//! A set is only reachable through three operations: its (possibly
//! approximate) size, a random-element generator and a membership query.
//! Every draw and query made through a [`SetHandle`] is charged to a shared
//! [`Meter`], which yields the `(T, R, Q)` cost triple of a run.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, CoverError, Result};

/// One member of the universe. Multi-dimensional points are packed into this
/// encoding by the backend that owns them.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Element(pub u64);

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for Element {
    fn from(v: u64) -> Self {
        Element(v)
    }
}

/// Sampling bias `(alpha_l, alpha_r)` and size-approximation error
/// `(delta_l, delta_r)` of a type-1 input list.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BiasProfile {
    pub alpha_l: f64,
    pub alpha_r: f64,
    pub delta_l: f64,
    pub delta_r: f64,
}

impl BiasProfile {
    pub fn new(alpha_l: f64, alpha_r: f64, delta_l: f64, delta_r: f64) -> Result<Self> {
        for (name, v) in [
            ("alpha_l", alpha_l),
            ("alpha_r", alpha_r),
            ("delta_l", delta_l),
            ("delta_r", delta_r),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(invalid(name, format!("{v} is outside [0, 1)")));
            }
        }
        Ok(BiasProfile {
            alpha_l,
            alpha_r,
            delta_l,
            delta_r,
        })
    }

    /// Exact sizes and uniform sampling.
    pub fn zero() -> Self {
        BiasProfile::default()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha_l == 0.0 && self.alpha_r == 0.0 && self.delta_l == 0.0 && self.delta_r == 0.0
    }

    pub fn has_sampling_bias(&self) -> bool {
        self.alpha_l != 0.0 || self.alpha_r != 0.0
    }

    /// `(1 - alpha_l)(1 - delta_l) / ((1 + alpha_r)(1 + delta_r))`, in `(0, 1]`.
    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha_l) * (1.0 - self.delta_l) / ((1.0 + self.alpha_r) * (1.0 + self.delta_r))
    }

    /// Lower multiplier of the estimate envelope, `(1 - alpha_l)(1 - delta_l)`.
    pub fn lower_factor(&self) -> f64 {
        (1.0 - self.alpha_l) * (1.0 - self.delta_l)
    }

    /// Upper multiplier of the estimate envelope, `(1 + alpha_r)(1 + delta_r)`.
    pub fn upper_factor(&self) -> f64 {
        (1.0 + self.alpha_r) * (1.0 + self.delta_r)
    }
}

/// Snapshot of the cost triple: abstract steps `T`, random draws `R` and
/// membership queries `Q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostCounters {
    pub steps: u64,
    pub random_draws: u64,
    pub membership_queries: u64,
}

/// Thread-safe accumulator behind [`CostCounters`].
#[derive(Debug, Default)]
pub struct Meter {
    steps: AtomicU64,
    draws: AtomicU64,
    queries: AtomicU64,
}

impl Meter {
    pub fn new() -> Arc<Meter> {
        Arc::new(Meter::default())
    }

    /// Charges `draws` random draws and `queries` membership queries. Each
    /// access is also one step.
    pub fn record(&self, draws: u64, queries: u64) {
        if draws > 0 {
            self.draws.fetch_add(draws, Ordering::Relaxed);
        }
        if queries > 0 {
            self.queries.fetch_add(queries, Ordering::Relaxed);
        }
        self.add_steps(draws + queries);
    }

    /// Charges bookkeeping steps that are neither draws nor queries.
    pub fn add_steps(&self, steps: u64) {
        if steps > 0 {
            self.steps.fetch_add(steps, Ordering::Relaxed);
        }
    }

    pub fn snapshot(&self) -> CostCounters {
        CostCounters {
            steps: self.steps.load(Ordering::Relaxed),
            random_draws: self.draws.load(Ordering::Relaxed),
            membership_queries: self.queries.load(Ordering::Relaxed),
        }
    }
}

/// Deterministic source of independent random streams.
///
/// Each stream is a ChaCha8 generator keyed by the root seed with its own
/// stream id, so `(seed, tag)` always reproduces the same sequence no matter
/// which thread consumes it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedSequence {
    seed: u64,
}

impl SeedSequence {
    pub fn new(seed: u64) -> Self {
        SeedSequence { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, tag: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(tag);
        rng
    }

    /// A child sequence whose streams do not overlap with the parent's.
    pub fn derive(&self, tag: u64) -> SeedSequence {
        SeedSequence {
            seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d))),
        }
    }
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Sorted,
    Unsorted,
    BTree,
    Hash,
    Rectangle,
    Custom,
}

impl BackendKind {
    pub fn name(&self) -> &'static str {
        match self {
            BackendKind::Sorted => "sorted",
            BackendKind::Unsorted => "unsorted",
            BackendKind::BTree => "btree",
            BackendKind::Hash => "hash",
            BackendKind::Rectangle => "rect",
            BackendKind::Custom => "custom",
        }
    }
}

/// Generator behind every random stream.
pub type SampleRng = ChaCha8Rng;

/// Moves the elements of `xs` that fail `member` to the front and returns
/// how many there are. The resulting order depends only on the input order
/// and the membership answers.
pub fn partition_non_members(xs: &mut [Element], mut member: impl FnMut(Element) -> bool) -> usize {
    let mut end = xs.len();
    let mut i = 0;
    while i < end {
        if member(xs[i]) {
            end -= 1;
            xs.swap(i, end);
        } else {
            i += 1;
        }
    }
    end
}

/// A concrete set representation.
///
/// `element_at` enumerates members in a backend-defined order; it is used
/// for materialization and by the skewed sampler, never by the algorithms.
pub trait SetBackend: Send + Sync + fmt::Debug {
    fn cardinality(&self) -> u64;

    fn random_element(&self, rng: &mut dyn RngCore) -> Result<Element>;

    fn contains(&self, x: Element) -> bool;

    fn element_at(&self, index: u64) -> Option<Element>;

    fn kind(&self) -> BackendKind;

    /// Key comparisons made by membership queries so far, for backends that
    /// search.
    fn comparison_count(&self) -> u64 {
        0
    }

    /// Hook run when the set joins the partial solution. Returns true if the
    /// backend reorganized itself.
    fn prepare_for_queries(&mut self) -> bool {
        false
    }

    fn is_empty(&self) -> bool {
        self.cardinality() == 0
    }

    /// Appends `w` draws to `out`. Backends override this to skip a virtual
    /// call per draw.
    fn sample_many(&self, rng: &mut SampleRng, w: u64, out: &mut Vec<Element>) -> Result<()> {
        for _ in 0..w {
            out.push(self.random_element(rng)?);
        }
        Ok(())
    }

    /// Moves the non-members of `xs` to the front and returns their number,
    /// as [`partition_non_members`] does with [`contains`](Self::contains).
    fn retain_non_members(&self, xs: &mut [Element]) -> usize {
        partition_non_members(xs, |x| self.contains(x))
    }

    fn materialize(&self) -> Vec<Element> {
        (0..self.cardinality())
            .map(|i| self.element_at(i).expect("index below cardinality"))
            .collect()
    }
}

/// Black-box view of one input set: its reported size `s_i` plus metered
/// access to the backend.
#[derive(Debug)]
pub struct SetHandle {
    set_id: usize,
    reported_size: f64,
    backend: Box<dyn SetBackend>,
    meter: Arc<Meter>,
}

impl SetHandle {
    pub fn set_id(&self) -> usize {
        self.set_id
    }

    pub fn reported_size(&self) -> f64 {
        self.reported_size
    }

    pub fn backend(&self) -> &dyn SetBackend {
        self.backend.as_ref()
    }

    pub fn backend_mut(&mut self) -> &mut dyn SetBackend {
        self.backend.as_mut()
    }

    pub fn meter(&self) -> &Arc<Meter> {
        &self.meter
    }

    pub fn is_empty(&self) -> bool {
        self.backend.is_empty()
    }

    pub fn random_element(&self, rng: &mut dyn RngCore) -> Result<Element> {
        let x = self.backend.random_element(rng)?;
        self.meter.record(1, 0);
        Ok(x)
    }

    pub fn member(&self, x: Element) -> bool {
        self.meter.record(0, 1);
        self.backend.contains(x)
    }

    /// Appends `w` independent draws to `out`, charging `w` draws at once.
    pub fn sample_into(&self, rng: &mut SampleRng, w: u64, out: &mut Vec<Element>) -> Result<()> {
        if self.backend.is_empty() {
            return Err(CoverError::EmptySet);
        }
        out.reserve(w as usize);
        self.backend.sample_many(rng, w, out)?;
        self.meter.record(w, 0);
        Ok(())
    }
}

/// Builds a handle whose reported size honours the `delta` bounds of `bias`.
///
/// For a nonzero `delta` the size is drawn uniformly from
/// `[(1 - delta_l)|A|, (1 + delta_r)|A|]`; the zero profile reports `|A|`.
pub fn make_handle(
    set_id: usize,
    backend: Box<dyn SetBackend>,
    bias: &BiasProfile,
    meter: Arc<Meter>,
    rng: &mut dyn RngCore,
) -> SetHandle {
    let exact = backend.cardinality() as f64;
    let lo = (1.0 - bias.delta_l) * exact;
    let hi = (1.0 + bias.delta_r) * exact;
    let reported_size = if exact == 0.0 || lo == hi {
        exact
    } else {
        rng.gen_range(lo..=hi)
    };
    SetHandle {
        set_id,
        reported_size,
        backend,
        meter,
    }
}

/// The input of a maximum-coverage run: `n` handles sharing one meter, the
/// budget `k` and the bias profile they were built under.
#[derive(Debug)]
pub struct CoverageInstance {
    handles: Vec<SetHandle>,
    k: usize,
    bias: BiasProfile,
    meter: Arc<Meter>,
}

impl CoverageInstance {
    /// Wraps prepared handles. They must all charge `meter`.
    pub fn new(
        handles: Vec<SetHandle>,
        k: usize,
        bias: BiasProfile,
        meter: Arc<Meter>,
        allow_empty: bool,
    ) -> Result<Self> {
        let n = handles.len();
        if n == 0 {
            return Err(invalid("sets", "an instance needs at least one set"));
        }
        if k == 0 {
            return Err(invalid("k", "the budget must be positive"));
        }
        if k > n {
            return Err(CoverError::BudgetExceedsSets { k, n });
        }
        if !allow_empty {
            if let Some(h) = handles.iter().find(|h| h.is_empty()) {
                return Err(invalid(
                    "sets",
                    format!("set {} is empty and empty sets were not permitted", h.set_id),
                ));
            }
        }
        if handles.iter().any(|h| !Arc::ptr_eq(&h.meter, &meter)) {
            return Err(invalid("handles", "every handle must share the instance meter"));
        }
        Ok(CoverageInstance {
            handles,
            k,
            bias,
            meter,
        })
    }

    /// Builds handles for `backends` in order, drawing reported sizes from
    /// `size_rng`.
    pub fn from_backends(
        backends: Vec<Box<dyn SetBackend>>,
        k: usize,
        bias: BiasProfile,
        size_rng: &mut dyn RngCore,
    ) -> Result<Self> {
        let meter = Meter::new();
        let handles = backends
            .into_iter()
            .enumerate()
            .map(|(i, b)| make_handle(i, b, &bias, meter.clone(), size_rng))
            .collect();
        CoverageInstance::new(handles, k, bias, meter, false)
    }

    pub fn len(&self) -> usize {
        self.handles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.handles.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bias(&self) -> &BiasProfile {
        &self.bias
    }

    pub fn handles(&self) -> &[SetHandle] {
        &self.handles
    }

    pub fn handle(&self, i: usize) -> &SetHandle {
        &self.handles[i]
    }

    pub fn handle_mut(&mut self, i: usize) -> &mut SetHandle {
        &mut self.handles[i]
    }

    pub fn meter(&self) -> &Arc<Meter> {
        &self.meter
    }

    pub fn counters(&self) -> CostCounters {
        self.meter.snapshot()
    }

    /// Largest exact cardinality `m`.
    pub fn max_set_size(&self) -> u64 {
        self.handles.iter().map(|h| h.backend.cardinality()).max().unwrap_or(0)
    }

    /// Every set as a sorted element list.
    pub fn materialize(&self) -> Vec<Vec<Element>> {
        self.handles
            .iter()
            .map(|h| {
                let mut v = h.backend.materialize();
                v.sort_unstable();
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::SortedArraySet;

    fn sorted(xs: &[u64]) -> Box<dyn SetBackend> {
        Box::new(SortedArraySet::from_values(xs.iter().copied()))
    }

    #[test]
    fn beta_of_zero_profile_is_one() {
        assert_eq!(BiasProfile::zero().beta(), 1.0);
        let b = BiasProfile::new(0.1, 0.0, 0.0, 0.0).unwrap();
        assert!(b.beta() < 1.0 && b.beta() > 0.0);
    }

    #[test]
    fn bias_rejects_out_of_range() {
        assert!(BiasProfile::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(BiasProfile::new(0.0, -0.1, 0.0, 0.0).is_err());
        assert!(BiasProfile::new(0.0, 0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn singleton_always_draws_its_member() {
        let meter = Meter::new();
        let mut rng = SeedSequence::new(1).stream(0);
        let h = make_handle(0, sorted(&[7]), &BiasProfile::zero(), meter.clone(), &mut rng);
        for _ in 0..20 {
            assert_eq!(h.random_element(&mut rng).unwrap(), Element(7));
        }
        assert_eq!(meter.snapshot().random_draws, 20);
    }

    #[test]
    fn empty_set_draw_is_an_error() {
        let meter = Meter::new();
        let mut rng = SeedSequence::new(1).stream(0);
        let h = make_handle(0, sorted(&[]), &BiasProfile::zero(), meter, &mut rng);
        assert_eq!(h.reported_size(), 0.0);
        assert_eq!(h.random_element(&mut rng), Err(CoverError::EmptySet));
    }

    #[test]
    fn member_counts_queries() {
        let meter = Meter::new();
        let mut rng = SeedSequence::new(1).stream(0);
        let h = make_handle(0, sorted(&[1, 2, 3]), &BiasProfile::zero(), meter.clone(), &mut rng);
        assert!(h.member(Element(2)));
        assert!(!h.member(Element(5)));
        let c = meter.snapshot();
        assert_eq!(c.membership_queries, 2);
        assert_eq!(c.random_draws, 0);
        assert_eq!(c.steps, 2);
    }

    #[test]
    fn reported_size_respects_delta_envelope() {
        let bias = BiasProfile::new(0.0, 0.0, 0.1, 0.1).unwrap();
        let values: Vec<u64> = (0..100).collect();
        let mut rng = SeedSequence::new(9).stream(3);
        for _ in 0..200 {
            let h = make_handle(0, sorted(&values), &bias, Meter::new(), &mut rng);
            assert!((90.0..=110.0).contains(&h.reported_size()));
        }
        let exact = make_handle(0, sorted(&values[..10]), &BiasProfile::zero(), Meter::new(), &mut rng);
        assert_eq!(exact.reported_size(), 10.0);
    }

    #[test]
    fn instance_rejects_k_above_n() {
        let mut rng = SeedSequence::new(0).stream(0);
        let err = CoverageInstance::from_backends(vec![sorted(&[1]), sorted(&[2])], 3, BiasProfile::zero(), &mut rng)
            .unwrap_err();
        assert_eq!(err, CoverError::BudgetExceedsSets { k: 3, n: 2 });
    }

    #[test]
    fn instance_rejects_empty_sets_unless_permitted() {
        let mut rng = SeedSequence::new(0).stream(0);
        assert!(
            CoverageInstance::from_backends(vec![sorted(&[1]), sorted(&[])], 1, BiasProfile::zero(), &mut rng).is_err()
        );
        let meter = Meter::new();
        let handles = vec![
            make_handle(0, sorted(&[1]), &BiasProfile::zero(), meter.clone(), &mut rng),
            make_handle(1, sorted(&[]), &BiasProfile::zero(), meter.clone(), &mut rng),
        ];
        assert!(CoverageInstance::new(handles, 2, BiasProfile::zero(), meter, true).is_ok());
    }

    #[test]
    fn seed_streams_are_reproducible_and_distinct() {
        let s = SeedSequence::new(42);
        let a: Vec<u64> = (0..4).map(|_| 0).scan(s.stream(1), |r, _| Some(r.next_u64())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(s.stream(1), |r, _| Some(r.next_u64())).collect();
        let c: Vec<u64> = (0..4).map(|_| 0).scan(s.stream(2), |r, _| Some(r.next_u64())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(s.derive(1), s.derive(2));
    }
}
