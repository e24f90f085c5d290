//! Concrete set representations.

mod btree;
mod counting;
mod hash;
mod lattice;
mod skewed;
mod sorted;
mod unsorted;

pub use btree::{CountedBTree, DEFAULT_ORDER};
pub use counting::{CallTally, CountingBackend};
pub use hash::BucketHashSet;
pub use lattice::{rect_cardinality, LatticePacking, LatticeRectangle};
pub use skewed::SkewedSampler;
pub use sorted::SortedArraySet;
pub use unsorted::UnsortedArraySet;

use rand::distributions::{Distribution, Uniform};

use crate::error::{CoverError, Result};
use crate::oracle::{BackendKind, Element, SampleRng, SetBackend};

/// Appends `w` uniform draws from `items` to `out`.
pub(crate) fn uniform_draws(items: &[Element], rng: &mut SampleRng, w: u64, out: &mut Vec<Element>) -> Result<()> {
    if items.is_empty() {
        return Err(CoverError::EmptySet);
    }
    let index = Uniform::from(0..items.len());
    out.extend((0..w).map(|_| items[index.sample(rng)]));
    Ok(())
}

/// Builds an element-list backend of the given kind. `hash_seed` keys the
/// hash backend's mixing function.
pub fn explicit_backend(kind: BackendKind, values: &[u64], hash_seed: u64) -> Result<Box<dyn SetBackend>> {
    Ok(match kind {
        BackendKind::Sorted => Box::new(SortedArraySet::from_values(values.iter().copied())),
        BackendKind::Unsorted => Box::new(UnsortedArraySet::from_values(values.iter().copied())?),
        BackendKind::BTree => Box::new(CountedBTree::from_values(values.iter().copied())),
        BackendKind::Hash => Box::new(BucketHashSet::from_values(hash_seed, values.iter().copied())),
        other => {
            return Err(CoverError::IncompatibleBackend(format!(
                "`{}` cannot hold an explicit element list",
                other.name()
            )))
        }
    })
}
