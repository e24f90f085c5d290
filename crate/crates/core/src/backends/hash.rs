use rand::{Rng, RngCore};

use crate::error::{CoverError, Result};
use crate::oracle::{partition_non_members, splitmix64, BackendKind, Element, SampleRng, SetBackend};

const MIN_BUCKETS: usize = 8;

/// A set kept twice: in an unsorted backing array for `O(1)` draws and in a
/// chained hash table for membership.
///
/// Each chain entry remembers its element's slot in the backing array, so a
/// delete can swap the last array element into the hole and patch its chain
/// entry. The table doubles when it holds more elements than buckets and
/// halves when fewer than half the buckets' worth remain.
#[derive(Clone, Debug)]
pub struct BucketHashSet {
    backing: Vec<Element>,
    buckets: Vec<Vec<(Element, usize)>>,
    seed: u64,
}

impl BucketHashSet {
    pub fn new(seed: u64) -> Self {
        BucketHashSet {
            backing: Vec::new(),
            buckets: vec![Vec::new(); MIN_BUCKETS],
            seed,
        }
    }

    pub fn from_values(seed: u64, values: impl IntoIterator<Item = u64>) -> Self {
        let mut s = BucketHashSet::new(seed);
        for v in values {
            s.insert(Element(v));
        }
        s
    }

    pub fn len(&self) -> usize {
        self.backing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backing.is_empty()
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    /// Longest chain, the empirical `beta` of the table.
    pub fn max_chain(&self) -> usize {
        self.buckets.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn backing_array(&self) -> &[Element] {
        &self.backing
    }

    fn bucket_of(&self, x: Element) -> usize {
        // bucket count is a power of two
        (splitmix64(x.0 ^ self.seed) as usize) & (self.buckets.len() - 1)
    }

    pub fn contains(&self, x: Element) -> bool {
        self.buckets[self.bucket_of(x)].iter().any(|&(y, _)| y == x)
    }

    pub fn insert(&mut self, x: Element) -> bool {
        if self.contains(x) {
            return false;
        }
        let b = self.bucket_of(x);
        self.buckets[b].push((x, self.backing.len()));
        self.backing.push(x);
        if self.backing.len() > self.buckets.len() {
            self.rebuild(self.buckets.len() * 2);
        }
        true
    }

    pub fn remove(&mut self, x: Element) -> bool {
        let b = self.bucket_of(x);
        let Some(pos) = self.buckets[b].iter().position(|&(y, _)| y == x) else {
            return false;
        };
        let (_, slot) = self.buckets[b].swap_remove(pos);
        let last = self.backing.len() - 1;
        if slot != last {
            let moved = self.backing[last];
            self.backing[slot] = moved;
            let mb = self.bucket_of(moved);
            let entry = self.buckets[mb]
                .iter_mut()
                .find(|(y, _)| *y == moved)
                .expect("moved element is indexed");
            entry.1 = slot;
        }
        self.backing.pop();
        if self.buckets.len() > MIN_BUCKETS && self.backing.len() < self.buckets.len() / 2 {
            self.rebuild(self.buckets.len() / 2);
        }
        true
    }

    fn rebuild(&mut self, size: usize) {
        self.buckets = vec![Vec::new(); size.max(MIN_BUCKETS)];
        for (slot, &x) in self.backing.iter().enumerate() {
            let b = self.bucket_of(x);
            self.buckets[b].push((x, slot));
        }
    }

    /// Verifies that array and table index each other exactly once.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let indexed: usize = self.buckets.iter().map(Vec::len).sum();
        if indexed != self.backing.len() {
            return Err(format!("{indexed} chain entries for {} elements", self.backing.len()));
        }
        for (b, chain) in self.buckets.iter().enumerate() {
            for &(x, slot) in chain {
                if self.bucket_of(x) != b {
                    return Err(format!("{x} filed under the wrong bucket"));
                }
                if self.backing.get(slot) != Some(&x) {
                    return Err(format!("{x} points at a stale slot {slot}"));
                }
            }
        }
        if self.backing.len() > self.buckets.len() {
            return Err("table is over capacity".into());
        }
        if self.buckets.len() > MIN_BUCKETS && self.backing.len() < self.buckets.len() / 2 {
            return Err("table is under half use".into());
        }
        Ok(())
    }
}

impl SetBackend for BucketHashSet {
    fn cardinality(&self) -> u64 {
        self.backing.len() as u64
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Result<Element> {
        if self.backing.is_empty() {
            return Err(CoverError::EmptySet);
        }
        Ok(self.backing[rng.gen_range(0..self.backing.len())])
    }

    fn contains(&self, x: Element) -> bool {
        BucketHashSet::contains(self, x)
    }

    fn sample_many(&self, rng: &mut SampleRng, w: u64, out: &mut Vec<Element>) -> Result<()> {
        super::uniform_draws(&self.backing, rng, w, out)
    }

    fn retain_non_members(&self, xs: &mut [Element]) -> usize {
        partition_non_members(xs, |x| BucketHashSet::contains(self, x))
    }

    fn element_at(&self, index: u64) -> Option<Element> {
        usize::try_from(index).ok().and_then(|i| self.backing.get(i).copied())
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Hash
    }

    fn materialize(&self) -> Vec<Element> {
        self.backing.clone()
    }
}
