use rand::{Rng, RngCore};

use crate::error::{invalid, CoverError, Result};
use crate::oracle::{partition_non_members, BackendKind, Element, SampleRng, SetBackend};

/// A set stored as a strictly increasing array. Draws are `O(1)`, membership
/// is a binary search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortedArraySet {
    items: Vec<Element>,
}

impl SortedArraySet {
    /// Takes ownership of `items`, which must already be strictly increasing.
    pub fn new(items: Vec<Element>) -> Result<Self> {
        if let Some(w) = items.windows(2).find(|w| w[0] >= w[1]) {
            return Err(invalid(
                "items",
                format!("not strictly increasing at {} >= {}", w[0], w[1]),
            ));
        }
        Ok(SortedArraySet { items })
    }

    /// Sorts and deduplicates arbitrary values.
    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Self {
        let mut items: Vec<Element> = values.into_iter().map(Element).collect();
        items.sort_unstable();
        items.dedup();
        SortedArraySet { items }
    }

    pub fn items(&self) -> &[Element] {
        &self.items
    }

    /// Membership together with the number of three-way key comparisons
    /// spent, at most `floor(log2 m) + 1`.
    pub fn member_with_comparisons(&self, x: Element) -> (bool, u32) {
        binary_search(&self.items, x)
    }
}

/// Three-way binary search that reports how many comparisons it made.
pub(crate) fn binary_search(items: &[Element], x: Element) -> (bool, u32) {
    use std::cmp::Ordering::*;
    let (mut lo, mut hi) = (0usize, items.len());
    let mut comparisons = 0;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        comparisons += 1;
        match items[mid].cmp(&x) {
            Less => lo = mid + 1,
            Greater => hi = mid,
            Equal => return (true, comparisons),
        }
    }
    (false, comparisons)
}

impl SetBackend for SortedArraySet {
    fn cardinality(&self) -> u64 {
        self.items.len() as u64
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Result<Element> {
        if self.items.is_empty() {
            return Err(CoverError::EmptySet);
        }
        Ok(self.items[rng.gen_range(0..self.items.len())])
    }

    fn contains(&self, x: Element) -> bool {
        self.items.binary_search(&x).is_ok()
    }

    fn sample_many(&self, rng: &mut SampleRng, w: u64, out: &mut Vec<Element>) -> Result<()> {
        super::uniform_draws(&self.items, rng, w, out)
    }

    fn retain_non_members(&self, xs: &mut [Element]) -> usize {
        partition_non_members(xs, |x| self.items.binary_search(&x).is_ok())
    }

    fn element_at(&self, index: u64) -> Option<Element> {
        usize::try_from(index).ok().and_then(|i| self.items.get(i).copied())
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Sorted
    }

    fn materialize(&self) -> Vec<Element> {
        self.items.clone()
    }
}
