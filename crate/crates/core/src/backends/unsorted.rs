use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, RngCore};

use super::sorted::binary_search;
use crate::error::{invalid, CoverError, Result};
use crate::oracle::{partition_non_members, BackendKind, Element, SampleRng, SetBackend};

/// A set stored as an array in arbitrary order. Membership is a linear scan
/// until [`sort_in_place`](UnsortedArraySet::sort_in_place) runs, after which
/// it is a binary search.
#[derive(Debug, Default)]
pub struct UnsortedArraySet {
    items: Vec<Element>,
    sorted: bool,
    comparisons: AtomicU64,
}

impl Clone for UnsortedArraySet {
    fn clone(&self) -> Self {
        UnsortedArraySet {
            items: self.items.clone(),
            sorted: self.sorted,
            comparisons: AtomicU64::new(self.comparisons.load(Ordering::Relaxed)),
        }
    }
}

impl UnsortedArraySet {
    pub fn new(items: Vec<Element>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(items.len());
        if let Some(dup) = items.iter().find(|x| !seen.insert(**x)) {
            return Err(invalid("items", format!("duplicate element {dup}")));
        }
        let sorted = items.windows(2).all(|w| w[0] < w[1]);
        Ok(UnsortedArraySet {
            items,
            sorted,
            comparisons: AtomicU64::new(0),
        })
    }

    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Result<Self> {
        UnsortedArraySet::new(values.into_iter().map(Element).collect())
    }

    pub fn items(&self) -> &[Element] {
        &self.items
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    /// Sorts the array once; later membership queries binary-search.
    pub fn sort_in_place(&mut self) {
        if !self.sorted {
            self.items.sort_unstable();
            self.sorted = true;
        }
    }
}

impl UnsortedArraySet {
    fn lookup(&self, x: Element) -> (bool, u32) {
        if self.sorted {
            binary_search(&self.items, x)
        } else {
            match self.items.iter().position(|&y| y == x) {
                Some(p) => (true, p as u32 + 1),
                None => (false, self.items.len() as u32),
            }
        }
    }
}

impl SetBackend for UnsortedArraySet {
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
        let (found, comparisons) = self.lookup(x);
        self.comparisons.fetch_add(comparisons as u64, Ordering::Relaxed);
        found
    }

    fn sample_many(&self, rng: &mut SampleRng, w: u64, out: &mut Vec<Element>) -> Result<()> {
        super::uniform_draws(&self.items, rng, w, out)
    }

    fn retain_non_members(&self, xs: &mut [Element]) -> usize {
        let mut total = 0u64;
        let white = partition_non_members(xs, |x| {
            let (found, comparisons) = self.lookup(x);
            total += comparisons as u64;
            found
        });
        self.comparisons.fetch_add(total, Ordering::Relaxed);
        white
    }

    fn element_at(&self, index: u64) -> Option<Element> {
        usize::try_from(index).ok().and_then(|i| self.items.get(i).copied())
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Unsorted
    }

    fn comparison_count(&self) -> u64 {
        self.comparisons.load(Ordering::Relaxed)
    }

    fn prepare_for_queries(&mut self) -> bool {
        let was_sorted = self.sorted;
        self.sort_in_place();
        !was_sorted
    }

    fn materialize(&self) -> Vec<Element> {
        self.items.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sorts_in_place() {
        let mut s = UnsortedArraySet::from_values([3, 1, 2]).unwrap();
        assert!(!s.is_sorted());
        s.sort_in_place();
        assert_eq!(s.items(), &[Element(1), Element(2), Element(3)]);
        assert!(s.is_sorted());
    }

    #[test]
    fn already_sorted_input_is_unchanged() {
        let mut s = UnsortedArraySet::from_values([1, 2, 5]).unwrap();
        assert!(s.is_sorted());
        assert!(!s.prepare_for_queries());
        assert_eq!(s.items(), &[Element(1), Element(2), Element(5)]);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(UnsortedArraySet::from_values([4, 1, 4]).is_err());
    }

    #[test]
    fn membership_is_identical_before_and_after_sorting() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut raw: Vec<u64> = (0..300).collect();
            for i in (1..raw.len()).rev() {
                raw.swap(i, rng.gen_range(0..=i));
            }
            raw.truncate(rng.gen_range(0..120));
            let mut s = UnsortedArraySet::from_values(raw.iter().copied()).unwrap();
            let before: Vec<bool> = (0..310).map(|q| s.contains(Element(q))).collect();
            s.sort_in_place();
            let after: Vec<bool> = (0..310).map(|q| s.contains(Element(q))).collect();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn sorted_queries_use_few_comparisons() {
        let mut s = UnsortedArraySet::from_values((0..64).rev()).unwrap();
        s.sort_in_place();
        let before = s.comparison_count();
        for q in 0..100 {
            s.contains(Element(q));
        }
        assert!(s.comparison_count() - before <= 100 * 7);
    }
}
