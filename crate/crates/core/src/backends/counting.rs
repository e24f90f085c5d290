use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::RngCore;

use crate::error::Result;
use crate::oracle::{BackendKind, Element, SampleRng, SetBackend};

/// Call tallies kept by a [`CountingBackend`], independent of any
/// [`Meter`](crate::oracle::Meter).
#[derive(Debug, Default)]
pub struct CallTally {
    pub draws: AtomicU64,
    pub queries: AtomicU64,
}

impl CallTally {
    pub fn draws(&self) -> u64 {
        self.draws.load(Ordering::Relaxed)
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Transparent wrapper that counts every draw and membership call reaching
/// the wrapped backend. Used to audit the meters.
#[derive(Debug)]
pub struct CountingBackend {
    inner: Box<dyn SetBackend>,
    tally: Arc<CallTally>,
}

impl CountingBackend {
    pub fn new(inner: Box<dyn SetBackend>, tally: Arc<CallTally>) -> Self {
        CountingBackend { inner, tally }
    }
}

impl SetBackend for CountingBackend {
    fn cardinality(&self) -> u64 {
        self.inner.cardinality()
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Result<Element> {
        self.tally.draws.fetch_add(1, Ordering::Relaxed);
        self.inner.random_element(rng)
    }

    fn contains(&self, x: Element) -> bool {
        self.tally.queries.fetch_add(1, Ordering::Relaxed);
        self.inner.contains(x)
    }

    fn sample_many(&self, rng: &mut SampleRng, w: u64, out: &mut Vec<Element>) -> Result<()> {
        self.tally.draws.fetch_add(w, Ordering::Relaxed);
        self.inner.sample_many(rng, w, out)
    }

    fn retain_non_members(&self, xs: &mut [Element]) -> usize {
        self.tally.queries.fetch_add(xs.len() as u64, Ordering::Relaxed);
        self.inner.retain_non_members(xs)
    }

    fn element_at(&self, index: u64) -> Option<Element> {
        self.inner.element_at(index)
    }

    fn kind(&self) -> BackendKind {
        self.inner.kind()
    }

    fn comparison_count(&self) -> u64 {
        self.inner.comparison_count()
    }

    fn prepare_for_queries(&mut self) -> bool {
        self.inner.prepare_for_queries()
    }

    fn materialize(&self) -> Vec<Element> {
        self.inner.materialize()
    }
}
